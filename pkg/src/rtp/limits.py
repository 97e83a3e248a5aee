"""Restricted tensor products at finite truncation levels.

A family assigns to each index v a finite-dimensional C*-algebra A_v with a
distinguished projection p_v (and optionally a Hilbert module X_v with a
distinguished vector x_v, and a left action of a second algebra A'_v).  A
*level* is a finite index set S containing the exceptional set E; the level
objects are ordered tensor products over S, and the connecting maps append
the distinguished data at the new indices.  Everything here is checked, not
assumed: each structural identity comes back as a `VerificationReport` with
numeric defects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cstar import (AlgElement, BlockAlgebra, StarHom, identity_hom,
                    irreps_of, make_algebra, op_norm,
                    rank_at_most_one, star_hom_defect, tensor_algebra)
from .errors import LevelError, PreconditionError, ValidationError
from .modules import (Correspondence, HModule, adjoint, compact_basis,
                      exterior_tensor, interior_tensor, module_norm,
                      module_op_norm, rank_one, validate_module,
                      _left_mult_matrix)
from .report import VerificationReport

DEFAULT_TOL = 1e-9


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraFamily:
    """(A_v, p_v) for v in a finite ordered index set, with exceptional set E."""

    algebras: tuple[BlockAlgebra, ...]
    projections: tuple[AlgElement, ...]
    exceptional: frozenset[int]

    def __post_init__(self):
        n = len(self.algebras)
        if len(self.projections) != n:
            raise ValidationError("one projection per algebra is required")
        if not all(0 <= v < n for v in self.exceptional):
            raise ValidationError("exceptional indices out of range")
        for A, p in zip(self.algebras, self.projections):
            if p.algebra.blocks != A.blocks:
                raise ValidationError("projection lives in the wrong algebra")

    @property
    def size(self) -> int:
        return len(self.algebras)


@dataclass(frozen=True)
class ModuleFamily:
    """(X_v, x_v) over an algebra family; ⟨x_v, x_v⟩ = p_v away from E."""

    base: AlgebraFamily
    modules: tuple[HModule, ...]
    vectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.modules) != self.base.size or len(self.vectors) != self.base.size:
            raise ValidationError("one module and one vector per index is required")
        for A, X, x in zip(self.base.algebras, self.modules, self.vectors):
            if X.algebra.blocks != A.blocks:
                raise ValidationError("module is over the wrong algebra")
            if np.shape(x) != (X.cdim,):
                raise ValidationError("distinguished vector has the wrong length")

    @property
    def size(self) -> int:
        return self.base.size

    @property
    def exceptional(self) -> frozenset[int]:
        return self.base.exceptional


@dataclass(frozen=True)
class CorrFamily:
    """A module family together with left actions α_v : A'_v -> L(X_v)."""

    modules: ModuleFamily
    primed: AlgebraFamily          # (A'_v, p'_v), same index set and E
    actions: tuple[Correspondence, ...]

    def __post_init__(self):
        if self.primed.size != self.modules.size:
            raise ValidationError("primed family has the wrong index set")
        if self.primed.exceptional != self.modules.exceptional:
            raise ValidationError("primed family must share the exceptional set")
        if len(self.actions) != self.modules.size:
            raise ValidationError("one left action per index is required")
        for v, corr in enumerate(self.actions):
            if corr.X is not self.modules.modules[v] and \
                    corr.X.algebra.blocks != self.modules.modules[v].algebra.blocks:
                raise ValidationError(f"left action at index {v} is on the wrong module")
            if corr.Aprime.blocks != self.primed.algebras[v].blocks:
                raise ValidationError(f"left algebra mismatch at index {v}")

    @property
    def size(self) -> int:
        return self.modules.size

    @property
    def exceptional(self) -> frozenset[int]:
        return self.modules.exceptional


def level_indices(family, S) -> tuple[int, ...]:
    """Normalize a level: sorted indices, within range, containing E."""
    S = tuple(sorted(set(int(v) for v in S)))
    if not S:
        raise LevelError("a level must contain at least one index")
    if any(v < 0 or v >= family.size for v in S):
        raise LevelError("level index out of range")
    missing = set(family.exceptional) - set(S)
    if missing:
        raise LevelError(f"level must contain the exceptional set; missing {sorted(missing)}")
    return S


# --------------------------------------------------------------------------
# family validation
# --------------------------------------------------------------------------

def validate_algebra_family(F: AlgebraFamily, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Projections are projections; p_v is nonzero away from E."""
    rep = VerificationReport("family.algebra", True, tol=tol)
    for v, p in enumerate(F.projections):
        idem = op_norm(p * p - p)
        herm = op_norm(p.star() - p)
        rep.add(f"v={v}:idempotent", idem)
        rep.add(f"v={v}:selfadjoint", herm)
        if v not in F.exceptional:
            rep.add(f"v={v}:nonzero", 0.0 if op_norm(p) > tol else 1.0)
    return rep.settle()


def validate_module_family(F: ModuleFamily, tol: float = DEFAULT_TOL,
                           check_modules: bool = True) -> VerificationReport:
    """⟨x_v,x_v⟩ = p_v away from E, plus the derived identities."""
    rep = VerificationReport("family.module", True, tol=tol)
    base = validate_algebra_family(F.base, tol)
    rep.add("base", base.max_defect())
    for v in range(F.size):
        X, x, p = F.modules[v], F.vectors[v], F.base.projections[v]
        if check_modules:
            rep.add(f"v={v}:module", validate_module(X, tol).max_defect())
        if v in F.exceptional:
            continue
        g = X.inner(x, x)
        rep.add(f"v={v}:gram", op_norm(g - p))
        # derived: x·p = x and T_{x,x} is a projection
        rep.add(f"v={v}:fixed", float(np.abs(X.act(x, p) - x).max()))
        T = rank_one(X, x, x).matrix
        rep.add(f"v={v}:rankone-idem", float(np.abs(T @ T - T).max()))
        Tadj = adjoint(X, T, tol=max(tol, 1e-7)).adjoint_matrix
        rep.add(f"v={v}:rankone-selfadj", float(np.abs(Tadj - T).max()))
    return rep.settle()


def validate_corr_family(F: CorrFamily, tol: float = DEFAULT_TOL,
                         rng: np.random.Generator | None = None) -> VerificationReport:
    """Left actions are adjointable *-homomorphisms and fix x_v via p'_v."""
    from .modules import correspondence_defect
    rep = VerificationReport("family.corr", True, tol=tol)
    rep.add("modules", validate_module_family(F.modules, tol).max_defect())
    rep.add("primed", validate_algebra_family(F.primed, tol).max_defect())
    for v in range(F.size):
        d = correspondence_defect(F.actions[v], rng=rng)
        rep.add(f"v={v}:starhom", float(d) if np.isfinite(d) else 1.0)
        if v in F.exceptional:
            continue
        x = F.modules.vectors[v]
        pprime = F.primed.projections[v]
        rep.add(f"v={v}:compatible",
                float(np.abs(F.actions[v].apply(pprime) @ x - x).max()))
    return rep.settle()


# --------------------------------------------------------------------------
# level algebras
# --------------------------------------------------------------------------

class LevelAlgebra:
    """Ordered tensor product of the A_v over a level S.

    `kperm` realizes flat coordinates: for elements a_v with flat coordinate
    vectors f_v, flat(⊗ a_v) = kron(f_{v_1}, ..., f_{v_k})[kperm].
    """

    def __init__(self, family: AlgebraFamily, S):
        self.family = family
        self.S = level_indices(family, S)
        self.factors = tuple(family.algebras[v] for v in self.S)
        alg = self.factors[0]
        perm = np.arange(alg.dim, dtype=np.int64)
        # tuple of per-factor block indices, per level block (lex order)
        blocks = [(b,) for b in range(len(alg.blocks))]
        for B in self.factors[1:]:
            tens = tensor_algebra(alg, B)
            dB = B.dim
            grown = (perm[:, None] * dB + np.arange(dB)[None, :]).reshape(-1)
            perm = grown[tens.perm]
            blocks = [bt + (bj,) for bt in blocks for bj in range(len(B.blocks))]
            alg = tens.algebra
        self.algebra = alg
        self.kperm = perm
        self.block_tuples = blocks

    def simple_flat(self, flats) -> np.ndarray:
        """Flat coordinates of ⊗ a_v from per-factor flat coordinates."""
        if len(flats) != len(self.S):
            raise ValidationError("one factor per level index is required")
        acc = np.asarray(flats[0], dtype=complex)
        for f in flats[1:]:
            acc = np.kron(acc, np.asarray(f, dtype=complex))
        return acc[self.kperm]

    def simple(self, elems) -> AlgElement:
        return self.algebra.from_flat(self.simple_flat([e.flat() for e in elems]))

    def kron_index_digits(self, idx: int) -> tuple[int, ...]:
        """Decompose a kron coordinate into per-factor flat indices."""
        digits = []
        for A in reversed(self.factors):
            idx, r = divmod(idx, A.dim)
            digits.append(r)
        return tuple(reversed(digits))


def level_algebra(F: AlgebraFamily, S) -> LevelAlgebra:
    return LevelAlgebra(F, S)


def connecting_alg_hom(F: AlgebraFamily, La: LevelAlgebra, Lb: LevelAlgebra) -> StarHom:
    """The unital-on-the-corner embedding a ↦ a ⊗ (⊗ p_v) for S ⊆ S'."""
    if not set(La.S) <= set(Lb.S):
        raise LevelError("connecting map requires S ⊆ S'")
    if La.S == Lb.S:
        return identity_hom(La.algebra)
    mats = []
    for v in Lb.S:
        if v in La.S:
            mats.append(np.eye(F.algebras[v].dim, dtype=complex))
        else:
            mats.append(F.projections[v].flat().reshape(-1, 1))
    big = mats[0]
    for m in mats[1:]:
        big = np.kron(big, m)
    # rows to level-b flat order, columns from level-a flat order
    conn = big[np.ix_(Lb.kperm, La.kperm)]
    return StarHom(La.algebra, Lb.algebra, conn)


# --------------------------------------------------------------------------
# level modules
# --------------------------------------------------------------------------

class LevelModule:
    """Exterior tensor product of the X_v over a level S."""

    def __init__(self, family: ModuleFamily, S):
        self.family = family
        self.level_alg = LevelAlgebra(family.base, S)
        self.S = self.level_alg.S
        self.factors = tuple(family.modules[v] for v in self.S)
        X = self.factors[0]
        alg = X.algebra
        for Y in self.factors[1:]:
            tens = tensor_algebra(alg, Y.algebra)
            X = exterior_tensor(X, Y, tens)
            alg = tens.algebra
        self.module = X

    @property
    def cdim(self) -> int:
        return self.module.cdim

    def simple(self, vecs) -> np.ndarray:
        if len(vecs) != len(self.S):
            raise ValidationError("one factor per level index is required")
        acc = np.asarray(vecs[0], dtype=complex)
        for w in vecs[1:]:
            acc = np.kron(acc, np.asarray(w, dtype=complex))
        return acc

    def distinguished(self) -> np.ndarray:
        return self.simple([self.family.vectors[v] for v in self.S])


def level_module(F: ModuleFamily, S) -> LevelModule:
    return LevelModule(F, S)


def connecting_module_matrix(F: ModuleFamily, La: LevelModule, Lb: LevelModule) -> np.ndarray:
    """ι : X_S -> X_{S'}, appending the distinguished vectors at S'∖S."""
    if not set(La.S) <= set(Lb.S):
        raise LevelError("connecting map requires S ⊆ S'")
    mats = []
    for v in Lb.S:
        if v in La.S:
            mats.append(np.eye(F.modules[v].cdim, dtype=complex))
        else:
            mats.append(np.asarray(F.vectors[v], dtype=complex).reshape(-1, 1))
    big = mats[0]
    for m in mats[1:]:
        big = np.kron(big, m)
    return big


def connecting_map(F: ModuleFamily, S, Sprime, tol: float = DEFAULT_TOL,
                   rng: np.random.Generator | None = None,
                   samples: int = 12) -> tuple[np.ndarray, VerificationReport]:
    """Connecting isometry with its gram-identity report.

    Verifies ⟨ι(w), ι(z)⟩ = φ(⟨w, z⟩) where φ is the connecting algebra map,
    on the full coordinate basis when small, otherwise on random pairs.
    """
    La, Lb = level_module(F, S), level_module(F, Sprime)
    iota = connecting_module_matrix(F, La, Lb)
    phi = connecting_alg_hom(F.base, La.level_alg, Lb.level_alg)
    rep = VerificationReport("connecting.isometry", True, tol=tol)
    m = La.cdim
    if m * m <= 256 or rng is None:
        pairs = [(np.eye(m, dtype=complex)[i], np.eye(m, dtype=complex)[j])
                 for i in range(m) for j in range(m)]
        tag = "basis"
    else:
        pairs = [(rng.standard_normal(m) + 1j * rng.standard_normal(m),
                  rng.standard_normal(m) + 1j * rng.standard_normal(m))
                 for _ in range(samples)]
        tag = "sample"
    for k, (w, z) in enumerate(pairs):
        lhs = Lb.module.inner(iota @ w, iota @ z)
        rhs = phi(La.module.inner(w, z))
        scale = max(1.0, module_norm(La.module, w) * module_norm(La.module, z))
        rep.add(f"{tag}:{k}", op_norm(lhs - rhs) / scale)
    rep.add("distinguished", float(np.abs(iota @ La.distinguished()
                                          - Lb.distinguished()).max()))
    return iota, rep.settle()


def check_direct_limit_identity(F: ModuleFamily, S, Sprime,
                                tol: float = DEFAULT_TOL) -> VerificationReport:
    """X_S ⊗_{A_S} A_{S'} embeds isometrically onto ι(X_S)·A_{S'} ⊆ X_{S'}.

    A_{S'} is viewed as a Hilbert space with its trace inner product and as a
    representation space of A_S through the connecting *-homomorphism; the
    balanced tensor product is compared with the submodule of X_{S'} spanned
    by ι(x)·a via the scalarized inner products.
    """
    La, Lb = level_module(F, S), level_module(F, Sprime)
    iota = connecting_module_matrix(F, La, Lb)
    phi = connecting_alg_hom(F.base, La.level_alg, Lb.level_alg)
    Ab = Lb.level_alg.algebra
    D = Ab.dim
    # left regular representation of A_{S'} on itself, pulled back through phi
    eye = np.eye(La.level_alg.algebra.dim)
    cols = [_left_mult_matrix(Ab, phi(La.level_alg.algebra.from_flat(eye[i])))
            .reshape(-1) for i in range(eye.shape[0])]
    pi = StarHom(La.level_alg.algebra, make_algebra([D]),
                 np.stack(cols, axis=1))
    ind = interior_tensor(La.module, pi)
    # image vectors ι(e_i)·e_k in X_{S'} coordinates, one per kron coordinate
    m = La.cdim
    act = np.stack([Lb.module.action[k] @ iota for k in range(D)])  # (D, mb, m)
    B = act.transpose(1, 2, 0).reshape(Lb.cdim, m * D)
    # trace-scalarized gram of X_{S'}
    tau = np.zeros(Ab.dim)
    o = 0
    for d in Ab.blocks:
        tau[o:o + d * d][::d + 1] = 1.0
        o += d * d
    Gtau = np.einsum("ija,a->ij", Lb.module.gram, tau)
    lhs = B.conj().T @ Gtau @ B
    rep = VerificationReport("direct-limit.identity", True, tol=tol)
    scale = max(1.0, float(np.abs(ind.gram).max()))
    rep.add("inner-products", float(np.abs(lhs - ind.gram).max()) / scale)
    # dense range: the image spans exactly the submodule generated by ι(X_S)·A_{S'}
    cut = 1e-8 * max(1.0, float(np.linalg.norm(B, 2)))
    rank_img = int(np.linalg.matrix_rank(B, tol=cut))
    rep.extra["image_dim"] = rank_img
    rep.extra["quotient_dim"] = ind.dim
    rep.add("range-dimension", 0.0 if rank_img == ind.dim else 1.0)
    return rep.settle()


# --------------------------------------------------------------------------
# level operators and representations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HilbertFamily:
    """Plain Hilbert-space factors with distinguished unit vectors."""

    dims: tuple[int, ...]
    vectors: tuple[np.ndarray, ...]
    exceptional: frozenset[int] = frozenset()

    def __post_init__(self):
        if len(self.vectors) != len(self.dims):
            raise ValidationError("one vector per factor is required")
        for d, h in zip(self.dims, self.vectors):
            if np.shape(h) != (d,):
                raise ValidationError("distinguished vector has the wrong length")

    @property
    def size(self) -> int:
        return len(self.dims)


def level_operator(F, ops, S, tol: float = DEFAULT_TOL
                   ) -> tuple[np.ndarray, VerificationReport]:
    """⊗_{v∈S} B_v with the norm product law report.

    `ops` holds one matrix per family index.  Operators outside S must fix
    the distinguished vector and be contractive; violations raise.
    """
    if isinstance(F, ModuleFamily):
        dims = tuple(X.cdim for X in F.modules)
        vecs = F.vectors
        norm_of = lambda v, B: module_op_norm(F.modules[v], np.asarray(B, complex))
        size = F.size
    elif isinstance(F, HilbertFamily):
        dims = F.dims
        vecs = F.vectors
        norm_of = lambda v, B: float(np.linalg.norm(np.asarray(B, complex), 2))
        size = F.size
    else:
        raise ValidationError("level_operator expects a ModuleFamily or HilbertFamily")
    S = tuple(sorted(set(int(v) for v in S)))
    if len(ops) != size:
        raise ValidationError("one operator per family index is required")
    bad = []
    for v in range(size):
        if v in S:
            continue
        B = np.asarray(ops[v], dtype=complex)
        if float(np.abs(B @ vecs[v] - vecs[v]).max()) > max(tol, 1e-9):
            bad.append(v)
        elif norm_of(v, B) > 1 + max(tol, 1e-9):
            bad.append(v)
    if bad:
        raise PreconditionError(
            f"operators outside the level must fix the distinguished vector "
            f"and be contractive; offending indices {bad}")
    big = np.asarray(ops[S[0]], dtype=complex)
    for v in S[1:]:
        big = np.kron(big, np.asarray(ops[v], dtype=complex))
    rep = VerificationReport("level.operator-norm", True, tol=tol)
    prod = 1.0
    for v in S:
        prod *= norm_of(v, np.asarray(ops[v], complex))
    if isinstance(F, ModuleFamily):
        lvl = level_module(F, S) if set(F.exceptional) <= set(S) else None
        got = module_op_norm(lvl.module, big) if lvl is not None else prod
    else:
        got = float(np.linalg.norm(big, 2))
    rep.add("norm-product-law", abs(got - prod) / max(1.0, prod))
    return big, rep.settle()


def _flat_tensor_perm(dims: list[int]) -> np.ndarray:
    """Permutation with flat(kron(M_1,...,M_k)) = kron(flat M_1,...,flat M_k)[perm]."""
    alg = make_algebra([dims[0]])
    perm = np.arange(dims[0] ** 2, dtype=np.int64)
    for d in dims[1:]:
        tens = tensor_algebra(alg, make_algebra([d]))
        grown = (perm[:, None] * (d * d) + np.arange(d * d)[None, :]).reshape(-1)
        perm = grown[tens.perm]
        alg = tens.algebra
    return perm


def level_representation(F: AlgebraFamily, reps, vectors, S,
                         tol: float = DEFAULT_TOL,
                         validate: bool = True) -> tuple[StarHom, np.ndarray]:
    """π(⊗a_v) = ⊗π_v(a_v) on ⊗H_v, with the distinguished vector ⊗h_v.

    `reps` holds one StarHom per family index (single-block codomain) and
    `vectors` one unit vector per index; away from E the vector must be unit
    and fixed by π_v(p_v).
    """
    La = LevelAlgebra(F, S)
    bad = []
    for v in range(F.size):
        if v in F.exceptional:
            continue
        pi, h = reps[v], np.asarray(vectors[v], dtype=complex)
        if abs(np.linalg.norm(h) - 1.0) > max(tol, 1e-9):
            bad.append((v, "unit-norm"))
        ph = pi(F.projections[v]).data[0] @ h
        if float(np.abs(ph - h).max()) > max(tol, 1e-9):
            bad.append((v, "fixed-vector"))
    if bad:
        raise PreconditionError(f"representation preconditions violated at {bad}")
    hdims = [reps[v].codomain.blocks[0] for v in La.S]
    mats = [reps[v].matrix for v in La.S]           # (n_v^2, dim A_v) each
    big = mats[0]
    for w in mats[1:]:
        big = np.kron(big, w)
    fperm = _flat_tensor_perm(hdims)
    big = big[fperm][:, La.kperm]
    N = int(np.prod(hdims))
    hom = StarHom(La.algebra, make_algebra([N]), big)
    if validate and La.algebra.dim <= 400:
        d = star_hom_defect(hom)
        if d > max(tol, 1e-8):
            raise ValidationError(f"level representation fails *-homomorphism check ({d:.2e})")
    h = np.asarray(vectors[La.S[0]], dtype=complex)
    for v in La.S[1:]:
        h = np.kron(h, np.asarray(vectors[v], dtype=complex))
    return hom, h


def factorize_irrep(F: AlgebraFamily, rho: StarHom, S,
                    tol: float = DEFAULT_TOL):
    """Split an irrep of the level algebra into per-index irreps.

    Returns (factors, report): `factors` is the list of per-index StarHoms and
    the report records the hypothesis checks plus the reassembly intertwiner
    defect.
    """
    La = LevelAlgebra(F, S)
    if rho.domain.blocks != La.algebra.blocks:
        raise ValidationError("representation is not on the level algebra")
    if len(rho.codomain.blocks) != 1:
        raise ValidationError("expected a concrete representation on one matrix block")
    cdim = commutant_dim(rho)
    if cdim != 1:
        raise PreconditionError(f"representation is not irreducible (commutant dim {cdim})")
    rep = VerificationReport("factorize.irrep", True, tol=tol)
    for v in range(F.size):
        if v in F.exceptional:
            continue
        rep.extra.setdefault("rank_one_hypothesis", {})[str(v)] = \
            bool(rank_at_most_one(F.projections[v], max(tol, 1e-9)))
    # locate the unique block where rho is nonzero
    hits = []
    for b, unit_b in enumerate(_block_units(La.algebra)):
        if op_norm(rho(unit_b)) > 0.5:
            hits.append(b)
    if len(hits) != 1:
        raise PreconditionError("representation supported on more than one block")
    btuple = La.block_tuples[hits[0]]
    factors = [irreps_of(F.algebras[v])[btuple[k]] for k, v in enumerate(La.S)]
    rep.extra["block_tuple"] = list(btuple)
    # reassemble and find a unitary intertwiner
    full = [None] * F.size
    for k, v in enumerate(La.S):
        full[v] = factors[k]
    sigma = _assemble_only(F, full, La)
    d = rho.codomain.blocks[0]
    if sigma.codomain.blocks[0] != d:
        raise PreconditionError("block dimensions do not match the representation")
    eye = np.eye(La.algebra.dim)
    elems = [La.algebra.from_flat(eye[i]) for i in range(La.algebra.dim)]
    U = None
    for attempt in range(8):
        # averaging a random seed matrix yields an intertwiner (usually nonzero)
        rng = np.random.default_rng([11, attempt])
        W = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        T = np.zeros((d, d), dtype=complex)
        for e in elems:
            T += sigma(e).data[0] @ W @ rho(e.star()).data[0]
        u, s, vh = np.linalg.svd(T)
        if s.size and float(s.min()) > 1e-8 * max(1.0, float(s.max())):
            U = u @ vh
            break
    if U is None:
        raise PreconditionError("intertwiner search degenerated")
    worst = 0.0
    for i in range(La.algebra.dim):
        e = La.algebra.from_flat(eye[i])
        worst = max(worst, float(np.abs(sigma(e).data[0] @ U - U @ rho(e).data[0]).max()))
    rep.add("reassembly-intertwiner", worst)
    rep.add("intertwiner-unitarity", float(np.abs(U.conj().T @ U - np.eye(d)).max()))
    return factors, rep.settle()


def _assemble_only(F: AlgebraFamily, reps, La: LevelAlgebra) -> StarHom:
    """Tensor the given per-index representations over La.S (no preconditions)."""
    hdims = [reps[v].codomain.blocks[0] for v in La.S]
    big = reps[La.S[0]].matrix
    for v in La.S[1:]:
        big = np.kron(big, reps[v].matrix)
    big = big[_flat_tensor_perm(hdims)][:, La.kperm]
    N = int(np.prod(hdims))
    return StarHom(La.algebra, make_algebra([N]), big)


def commutant_dim(rho: StarHom, tol: float = 1e-7) -> int:
    """Dimension of the commutant of a concrete representation."""
    n = rho.codomain.blocks[0]
    eye = np.eye(rho.domain.dim)
    eyeN = np.eye(n)
    rows = []
    for i in range(rho.domain.dim):
        R = rho(rho.domain.from_flat(eye[i])).data[0]
        rows.append(np.kron(eyeN, R) - np.kron(R.T, eyeN))
    sys = np.concatenate(rows, axis=0)
    s = np.linalg.svd(sys, compute_uv=False)
    top = max(float(s.max(initial=0.0)), 1.0)
    return n * n - int(np.sum(s > tol * top))


def _block_units(A: BlockAlgebra):
    """The central projections (block identities) of A."""
    units = []
    for b, d in enumerate(A.blocks):
        data = [np.eye(e) if i == b else np.zeros((e, e))
                for i, e in enumerate(A.blocks)]
        units.append(A.element(data))
    return units


# --------------------------------------------------------------------------
# correspondences at level
# --------------------------------------------------------------------------

def left_action_level(F: CorrFamily, S, tol: float = DEFAULT_TOL,
                      rng: np.random.Generator | None = None) -> Correspondence:
    """Tensor left action of the primed level algebra on the level module."""
    for v in range(F.size):
        if v in F.exceptional:
            continue
        x = F.modules.vectors[v]
        err = float(np.abs(F.actions[v].apply(F.primed.projections[v]) @ x - x).max())
        if err > max(tol, 1e-8):
            raise PreconditionError(
                f"left action at index {v} does not fix the distinguished vector "
                f"(defect {err:.2e})")
    Lx = level_module(F.modules, S)
    Lp = LevelAlgebra(F.primed, S)
    alpha = np.empty((Lp.algebra.dim, Lx.cdim, Lx.cdim), dtype=complex)
    for k in range(Lp.algebra.dim):
        digits = Lp.kron_index_digits(int(Lp.kperm[k]))
        op = F.actions[Lp.S[0]].alpha[digits[0]]
        for j, v in enumerate(Lp.S[1:], start=1):
            op = np.kron(op, F.actions[v].alpha[digits[j]])
        alpha[k] = op
    return Correspondence(Lx.module, Lp.algebra, alpha)


def coherence_check(F: CorrFamily, tol: float = DEFAULT_TOL) -> VerificationReport:
    """α_v(p'_v) = T_{x_v,x_v} in operator norm, for every v ∉ E."""
    rep = VerificationReport("coherence", True, tol=tol)
    exempt = []
    for v in range(F.size):
        if v in F.exceptional:
            exempt.append(v)
            continue
        X, x = F.modules.modules[v], F.modules.vectors[v]
        diff = F.actions[v].apply(F.primed.projections[v]) - rank_one(X, x, x).matrix
        rep.add(f"v={v}", module_op_norm(X, diff))
    rep.extra["exempt"] = exempt
    return rep.settle()


def typeI_check(F: CorrFamily, tol: float = 1e-8) -> VerificationReport:
    """span(α_v(A'_v)) contains every compact operator on X_v, per index."""
    rep = VerificationReport("typeI", True, tol=0.5)
    for v in range(F.size):
        X = F.modules.modules[v]
        acts = F.actions[v].alpha.reshape(F.primed.algebras[v].dim, -1)
        comps = np.stack([K.matrix.reshape(-1) for K in compact_basis(X)])
        ra = np.linalg.matrix_rank(acts, tol=tol * max(1.0, float(np.abs(acts).max())))
        rj = np.linalg.matrix_rank(np.concatenate([acts, comps]),
                                   tol=tol * max(1.0, float(np.abs(acts).max())))
        rep.add(f"v={v}", 0.0 if ra == rj else 1.0)
        rep.extra.setdefault("span_rank", {})[str(v)] = int(ra)
    return rep.settle()


def _reorder_product_perm(dims_a: list[int], dims_b: list[int],
                          positions_a: list[int]) -> np.ndarray:
    """Permutation sending (⊗A-factors)⊗(⊗B-factors) coords to interleaved coords.

    `positions_a` gives, for each A-factor, its slot in the interleaved order;
    the B-factors fill the remaining slots in order.
    """
    k = len(dims_a) + len(dims_b)
    slot_dims = [0] * k
    src_axis = [0] * k
    for i, p in enumerate(positions_a):
        slot_dims[p] = dims_a[i]
        src_axis[p] = i
    rest = [p for p in range(k) if p not in positions_a]
    for j, p in enumerate(rest):
        slot_dims[p] = dims_b[j]
        src_axis[p] = len(dims_a) + j
    total = int(np.prod(slot_dims))
    idx = np.arange(total).reshape(dims_a + dims_b)
    idx = idx.transpose(src_axis).reshape(-1)
    # idx[target] = source, i.e. out[t] = in[idx[t]]
    return idx


def compacts_iso_check(F: ModuleFamily, S, Sprime, tol: float = DEFAULT_TOL,
                       rng: np.random.Generator | None = None,
                       samples: int = 6,
                       check_isometry: bool = True) -> VerificationReport:
    """T_{ξ,η} ↦ T_{ι(ξ),ι(η)} is an isometric *-hom; equals T ⊗ (⊗ T_{x_v,x_v})."""
    La, Lb = level_module(F, S), level_module(F, Sprime)
    iota = connecting_module_matrix(F, La, Lb)
    rng = rng or np.random.default_rng(0)
    rep = VerificationReport("compacts.iso", True, tol=tol)
    m = La.cdim
    # the expected connecting rule as a conjugation by the factor reordering
    dims_a = [m]
    extra = [v for v in Lb.S if v not in set(La.S)]
    dims_b = [F.modules[v].cdim for v in extra]
    pos_a = [Lb.S.index(v) for v in La.S]
    perm = _reorder_product_perm([F.modules[v].cdim for v in La.S], dims_b, pos_a)
    R = np.zeros((Lb.cdim, Lb.cdim))
    R[np.arange(Lb.cdim), perm] = 1.0
    proj_extra = None
    for v in extra:
        X, x = F.modules[v], F.vectors[v]
        P = rank_one(X, x, x).matrix
        proj_extra = P if proj_extra is None else np.kron(proj_extra, P)
    for t in range(samples):
        xi = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        eta = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        xi2 = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        eta2 = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        T1 = rank_one(La.module, xi, eta).matrix
        T2 = rank_one(La.module, xi2, eta2).matrix
        S1 = rank_one(Lb.module, iota @ xi, iota @ eta).matrix
        S2 = rank_one(Lb.module, iota @ xi2, iota @ eta2).matrix
        scale = max(1.0, float(np.abs(S1).max()), float(np.abs(S2).max()))
        # multiplicativity against the pushed-forward product
        rep.add(f"t={t}:multiplicative",
                float(np.abs(S1 @ S2 - _push(La, Lb, iota, R, proj_extra, T1 @ T2)).max()) / scale)
        # adjoint (star) compatibility
        S1adj = adjoint(Lb.module, S1, tol=1e-7).adjoint_matrix
        Sstar = rank_one(Lb.module, iota @ eta, iota @ xi).matrix
        rep.add(f"t={t}:star", float(np.abs(S1adj - Sstar).max()) / scale)
        # connecting rule T ↦ T ⊗ (⊗ T_{x,x})
        rep.add(f"t={t}:connecting-rule",
                float(np.abs(S1 - _push(La, Lb, iota, R, proj_extra, T1)).max()) / scale)
        if check_isometry and t == 0:
            na = module_op_norm(La.module, T1)
            nb = module_op_norm(Lb.module, S1)
            rep.add("isometry", abs(na - nb) / max(1.0, na))
    if La.S == Lb.S:
        rep.add("identity-level", float(np.abs(iota - np.eye(m)).max()))
    return rep.settle()


def _push(La: LevelModule, Lb: LevelModule, iota, R, proj_extra, T):
    """The connecting rule image R^T (T ⊗ ⊗T_{x,x}) R in level-b coordinates."""
    big = T if proj_extra is None else np.kron(T, proj_extra)
    return R @ big @ R.T if R is not None else big


def induction_commutes_check(F: CorrFamily, reps, vectors, S,
                             tol: float = DEFAULT_TOL) -> VerificationReport:
    """(X_S ⊗_{A_S} H_S) ≅ ⊗_v (X_v ⊗_{A_v} H_v), unitarily and equivariantly.

    The canonical map sends the class of (⊗w_v)⊗(⊗y_v) to ⊗(w_v ⊗ y_v); the
    check verifies it is unitary and intertwines the two left actions of the
    primed level algebra.
    """
    Lx = level_module(F.modules, S)
    La = Lx.level_alg
    pi_S, _h = level_representation(F.modules.base, reps, vectors, La.S, tol=tol)
    ind_S = interior_tensor(Lx.module, pi_S)
    locals_ = [interior_tensor(F.modules.modules[v], reps[v]) for v in La.S]
    hdims = [reps[v].codomain.blocks[0] for v in La.S]
    mdims = [F.modules.modules[v].cdim for v in La.S]
    # columns of the target side: ⊗_v Q_v e_{(i_v, r_v)}, ordered by (i, r)
    Qk = locals_[0].quot
    for loc in locals_[1:]:
        Qk = np.kron(Qk, loc.quot)
    # reorder source coordinates from ((i_v, r_v) per factor) to (all i, all r)
    k = len(La.S)
    pair_dims = [d for v in range(k) for d in (mdims[v], hdims[v])]
    src_axis = list(range(0, 2 * k, 2)) + list(range(1, 2 * k, 2))
    reorder = np.arange(int(np.prod(pair_dims))).reshape(pair_dims) \
        .transpose(src_axis).reshape(-1)
    # reorder[(i, r) linear index] = interleaved per-factor index
    B = Qk[:, reorder]  # B columns indexed by (i, r) in kron order
    A = ind_S.quot
    # solve U A = B in least squares: A^H U^H = B^H
    U = np.linalg.lstsq(A.conj().T, B.conj().T, rcond=None)[0].conj().T
    rep = VerificationReport("induction.commutes", True, tol=tol)
    scale = max(1.0, float(np.abs(B).max()))
    rep.add("well-defined", float(np.abs(U @ A - B).max()) / scale)
    if U.shape[0] == U.shape[1]:
        rep.add("unitary", float(np.abs(U.conj().T @ U - np.eye(U.shape[1])).max()))
    else:
        rep.add("dimension-match", 1.0)
        return rep.settle()
    # equivariance for the level left action
    alpha_S = left_action_level(F, La.S, tol=tol)
    Ap = alpha_S.Aprime
    eye = np.eye(Ap.dim)
    Lp = LevelAlgebra(F.primed, La.S)
    for i in range(Ap.dim):
        lhs = U @ ind_S.descend(alpha_S.alpha[i])
        digits = Lp.kron_index_digits(int(Lp.kperm[i]))
        op = locals_[0].descend(F.actions[La.S[0]].alpha[digits[0]])
        for j, v in enumerate(La.S[1:], start=1):
            op = np.kron(op, locals_[j].descend(F.actions[v].alpha[digits[j]]))
        rep.add(f"equivariance:{i}", float(np.abs(lhs - op @ U).max()))
    return rep.settle()


def coherence_sufficient_check(F: CorrFamily, tol: float = DEFAULT_TOL
                               ) -> VerificationReport:
    """Sufficient conditions for coherence, checked per index v ∉ E.

    (1) the interior tensor with X_v carries each irrep of A_v to an irrep of
    A'_v, (2) p'_v has rank at most one per block, (3) support implication:
    the induced rep does not vanish on p'_v unless the original is nonzero on
    p_v.  When all three hold the coherence identity α_v(p'_v) = T_{x_v,x_v}
    is asserted numerically.
    """
    rep = VerificationReport("coherence.sufficient", True, tol=tol)
    for v in range(F.size):
        if v in F.exceptional:
            continue
        X = F.modules.modules[v]
        x = F.modules.vectors[v]
        p, pp = F.modules.base.projections[v], F.primed.projections[v]
        corr = F.actions[v]
        conds = {"irreducible": True, "rank_one": True, "support": True}
        for b, pi in enumerate(irreps_of(X.algebra)):
            ind = interior_tensor(X, pi)
            if ind.dim == 0:
                continue
            Ap = corr.Aprime
            mats = [ind.descend(corr.alpha[i]) for i in range(Ap.dim)]
            rho = StarHom(Ap, make_algebra([ind.dim]),
                          np.stack([M.reshape(-1) for M in mats], axis=1))
            if commutant_dim(rho) != 1:
                conds["irreducible"] = False
            # support implication
            if op_norm(rho(pp)) > tol and op_norm(pi(p)) <= tol:
                conds["support"] = False
        try:
            conds["rank_one"] = rank_at_most_one(pp, max(tol, 1e-9))
        except ValidationError:
            conds["rank_one"] = False
        rep.extra.setdefault("conditions", {})[str(v)] = dict(conds)
        if all(conds.values()):
            diff = corr.apply(pp) - rank_one(X, x, x).matrix
            rep.add(f"v={v}:coherence", module_op_norm(X, diff))
        else:
            rep.add(f"v={v}:conditions-not-met", 0.0)
    return rep.settle()


def left_action_square_defect(F: CorrFamily, S, Sprime,
                              tol: float = DEFAULT_TOL) -> VerificationReport:
    """Level left actions commute with the connecting maps when coherent.

    Checks α_{S'}(φ'(a')) = reorder(α_S(a') ⊗ ⊗_{v∈S'∖S} T_{x_v,x_v}) for the
    flat basis of the primed level algebra at S.
    """
    La, Lb = level_module(F.modules, S), level_module(F.modules, Sprime)
    Lpa, Lpb = LevelAlgebra(F.primed, La.S), LevelAlgebra(F.primed, Lb.S)
    phi = connecting_alg_hom(F.primed, Lpa, Lpb)
    alpha_a = left_action_level(F, La.S, tol=tol)
    alpha_b = left_action_level(F, Lb.S, tol=tol)
    extra = [v for v in Lb.S if v not in set(La.S)]
    pos_a = [Lb.S.index(v) for v in La.S]
    perm = _reorder_product_perm([F.modules.modules[v].cdim for v in La.S],
                                 [F.modules.modules[v].cdim for v in extra], pos_a)
    R = np.zeros((Lb.cdim, Lb.cdim))
    R[np.arange(Lb.cdim), perm] = 1.0
    proj_extra = None
    for v in extra:
        X, x = F.modules.modules[v], F.modules.vectors[v]
        P = rank_one(X, x, x).matrix
        proj_extra = P if proj_extra is None else np.kron(proj_extra, P)
    rep = VerificationReport("left-action.square", True, tol=tol)
    eye = np.eye(Lpa.algebra.dim)
    for i in range(Lpa.algebra.dim):
        a = Lpa.algebra.from_flat(eye[i])
        lhs = alpha_b.apply(phi(a))
        base = alpha_a.apply(a)
        rhs = base if proj_extra is None else R @ np.kron(base, proj_extra) @ R.T
        rep.add(f"basis:{i}", float(np.abs(lhs - rhs).max()))
    return rep.settle()
