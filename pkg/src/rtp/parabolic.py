"""Parabolic induction for GL2 over a prime field, as a C*-correspondence.

G = GL2(F_q) with the Borel B = LN (L diagonal, N strictly upper unipotent).
The coset space G/N carries commuting left G- and right L-translation
actions; the space of functions on G/N becomes a Hilbert module over the
group C*-algebra of L with the matrix-coefficient inner product

    <f1, f2>(l) = sum_{x in G/N}  conj(f1(x)) f2(x l),

and a correspondence from the group C*-algebra of G.  Tensoring with a
representation of L over this module implements induction from B to G, and
the correspondences over several primes glue into a compatible family.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cstar import StarHom, make_algebra, op_norm
from .errors import IncompatibilityError, PreconditionError, ValidationError
from .groups import (FiniteGroup, GroupAlgebraElement, GroupCStar, Rep,
                     Subgroup, convolve, decompose_rep, direct_product,
                     induce, proj_pK, subgroup_as_group)
from .limits import (AlgebraFamily, CorrFamily, ModuleFamily, LevelAlgebra,
                     _assemble_only, left_action_level, level_module,
                     coherence_check, validate_corr_family,
                     validate_module_family)
from .modules import (Correspondence, HModule, interior_tensor, rank_one,
                      validate_module)
from .report import VerificationReport

DEFAULT_TOL = 1e-9


def delta_modular(_l: int) -> float:
    """Modular factor of the Levi; identically 1 for a finite group."""
    return 1.0


# --------------------------------------------------------------------------
# the group GL2(F_q) and its parabolic subgroups
# --------------------------------------------------------------------------

def _gl2_elements(q: int):
    """Invertible 2x2 matrices over F_q, identity first, then lexicographic."""
    elems = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    if (a * d - b * c) % q != 0:
                        elems.append((a, b, c, d))
    ident = (1, 0, 0, 1)
    elems.remove(ident)
    elems.sort()
    return [ident] + elems


def gl2_group(q: int) -> FiniteGroup:
    """GL2(F_q) as a multiplication table (element 0 = identity)."""
    if q < 2 or any(q % k == 0 for k in range(2, q)):
        raise ValidationError("q must be prime at this scale")
    elems = _gl2_elements(q)
    idx = {m: i for i, m in enumerate(elems)}
    n = len(elems)
    mult = np.empty((n, n), dtype=np.int64)
    for i, (a, b, c, d) in enumerate(elems):
        for j, (e, f, g, h) in enumerate(elems):
            prod = ((a * e + b * g) % q, (a * f + b * h) % q,
                    (c * e + d * g) % q, (c * f + d * h) % q)
            mult[i, j] = idx[prod]
    labels = [f"[{a},{b};{c},{d}]" for a, b, c, d in elems]
    return FiniteGroup(mult, labels=labels, validate=True)


@dataclass(frozen=True)
class ParabolicDatum:
    """GL2(F_q) with its Borel decomposition B = LN and a chosen K."""

    q: int
    G: FiniteGroup
    B: Subgroup
    L: Subgroup
    N: Subgroup
    K: Subgroup
    matrices: tuple[tuple[int, int, int, int], ...]   # entry tuple per element


def build_datum(q: int, K_choice: str | Subgroup = "full") -> ParabolicDatum:
    """Construct and validate the parabolic datum for GL2(F_q)."""
    G = gl2_group(q)
    elems = tuple(_gl2_elements(q))
    def members(pred):
        return tuple(i for i, m in enumerate(elems) if pred(*m))
    B = Subgroup(G, members(lambda a, b, c, d: c == 0))
    L = Subgroup(G, members(lambda a, b, c, d: b == 0 and c == 0))
    N = Subgroup(G, members(lambda a, b, c, d: a == 1 and d == 1 and c == 0))
    if K_choice == "full":
        K = Subgroup(G, tuple(range(G.n)))
    elif isinstance(K_choice, Subgroup):
        K = K_choice
    else:
        raise ValidationError("K_choice must be 'full' or a Subgroup")
    # B = L N with L ∩ N = {e}
    prods = {int(G.mult[l, n]) for l in L.members for n in N.members}
    if prods != set(B.members):
        raise ValidationError("B is not L·N")
    if set(L.members) & set(N.members) != {0}:
        raise ValidationError("L ∩ N is not trivial")
    # K B = G (transitivity on G/B)
    kb = {int(G.mult[k, b]) for k in K.members for b in B.members}
    if kb != set(range(G.n)):
        raise PreconditionError("K·B ≠ G: chosen K is not transitive on G/B")
    return ParabolicDatum(q, G, B, L, N, K, elems)


# --------------------------------------------------------------------------
# the correspondence E(G/N)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalCorrespondence:
    """Functions on G/N as a correspondence from C*(G) to C*(L)."""

    datum: ParabolicDatum
    CL: GroupCStar
    CG: GroupCStar
    corr: Correspondence            # module over CL.algebra, left CG.algebra action
    cosets: tuple[int, ...]         # minimal-element representative per coset
    coset_of: np.ndarray            # coset index per group element

    @property
    def module(self) -> HModule:
        return self.corr.X

    def right_perm(self, l: int) -> np.ndarray:
        """The coset permutation of the right action of l in L."""
        G, cidx = self.datum.G, {r: i for i, r in enumerate(self.cosets)}
        return np.array([cidx[int(self.coset_of[G.mult[r, l]])] for r in self.cosets])

    def left_perm(self, g: int) -> np.ndarray:
        G, cidx = self.datum.G, {r: i for i, r in enumerate(self.cosets)}
        return np.array([cidx[int(self.coset_of[G.mult[g, r]])] for r in self.cosets])


def build_EGN(datum: ParabolicDatum, seed: int = 0,
              tol: float = DEFAULT_TOL) -> LocalCorrespondence:
    """The module of functions on G/N with its two translation actions."""
    G, L, N = datum.G, datum.L, datum.N
    Lg = subgroup_as_group(L)
    CL = GroupCStar(Lg, seed=seed)
    CG = GroupCStar(G, seed=seed)
    nmem = list(N.members)
    coset_of = np.array([min(int(G.mult[g, n]) for n in nmem) for g in range(G.n)])
    cosets = tuple(sorted(set(coset_of.tolist())))
    cidx = {r: i for i, r in enumerate(cosets)}
    m = len(cosets)
    # right action of L on cosets: (gN)·l = glN  (L normalizes N inside B)
    # module action of the group algebra: (f·δ_l)(x) = f(x l^{-1}), i.e. δ_c ↦ δ_{c·l}
    act_grp = np.zeros((Lg.n, m, m), dtype=complex)
    for li, l in enumerate(L.members):
        for i, r in enumerate(cosets):
            act_grp[li, cidx[int(coset_of[G.mult[r, l]])], i] = 1.0
    action = np.einsum("lk,lij->kij", CL.iso_inv, act_grp)
    # gram: <δ_i, δ_j>(l) = [ coset_i · l == coset_j ]
    gram_grp = np.zeros((m, m, Lg.n), dtype=complex)
    for li, l in enumerate(L.members):
        for i, r in enumerate(cosets):
            gram_grp[i, cidx[int(coset_of[G.mult[r, l]])], li] = 1.0
    gram = np.einsum("ijl,al->ija", gram_grp, CL.iso)
    X = HModule(CL.algebra, m, action, gram)
    # left action of the group algebra of G: α(δ_g)f(x) = f(g^{-1} x)
    left_grp = np.zeros((G.n, m, m), dtype=complex)
    for g in range(G.n):
        for i, r in enumerate(cosets):
            left_grp[g, cidx[int(coset_of[G.mult[g, r]])], i] = 1.0
    alpha = np.einsum("gk,gij->kij", CG.iso_inv, left_grp)
    corr = Correspondence(X, CG.algebra, alpha)
    rep = validate_module(X, tol=max(tol, 1e-8))
    if not rep.passed:
        raise ValidationError(
            f"E(G/N) fails the module axioms (defect {rep.max_defect():.2e})")
    return LocalCorrespondence(datum, CL, CG, corr, cosets, coset_of)


def distinguished_vector(E: LocalCorrespondence,
                         tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """x = c · (indicator of the K-orbit image in G/N), with ⟨x,x⟩ = p_{K∩L}.

    The constant c is solved, not assumed; if no positive constant achieves
    compatibility the incompatibility defect is raised.
    """
    datum = E.datum
    G, K, L = datum.G, datum.K, datum.L
    ind = np.zeros(len(E.cosets), dtype=complex)
    kcosets = {int(E.coset_of[k]) for k in K.members}
    cidx = {r: i for i, r in enumerate(E.cosets)}
    for r in kcosets:
        ind[cidx[r]] = 1.0
    KL = Subgroup(G, tuple(sorted(set(K.members) & set(L.members))))
    Lg = E.CL.group
    lpos = {g: i for i, g in enumerate(L.members)}
    target = np.zeros(Lg.n, dtype=complex)
    for g in KL.members:
        target[lpos[g]] = 1.0 / KL.order
    gram_ind = E.CL.from_alg(E.module.inner(ind, ind)).coeffs
    # solve c^2 * gram_ind = target in least squares and measure the residual
    num = float(np.real(np.vdot(gram_ind, target)))
    den = float(np.real(np.vdot(gram_ind, gram_ind)))
    if den <= 0 or num <= 0:
        raise IncompatibilityError("the K-orbit indicator has a degenerate gram")
    c2 = num / den
    resid = float(np.abs(c2 * gram_ind - target).max())
    if resid > max(tol, 1e-9):
        raise IncompatibilityError(
            f"no positive constant makes ⟨x,x⟩ = p_K∩L (defect {resid:.2e})")
    c = float(np.sqrt(c2))
    return c * ind, c


def asspar_check(E: LocalCorrespondence, x: np.ndarray,
                 tol: float = DEFAULT_TOL) -> VerificationReport:
    """α(p_K)·X equals x·C*(L) as complex subspaces of the module."""
    datum = E.datum
    pk = proj_pK(datum.G, datum.K)
    P = E.corr.apply(E.CG.to_alg(pk))
    xL = np.stack([E.module.act_mat(E.CL.to_alg(
        GroupAlgebraElement(E.CL.group, np.eye(E.CL.group.n)[l]))) @ x
        for l in range(E.CL.group.n)], axis=1)
    rep = VerificationReport("parabolic.asspar", True, tol=0.5)
    rtol = 1e-9
    rank_P = np.linalg.matrix_rank(P, tol=rtol)
    rank_xL = np.linalg.matrix_rank(xL, tol=rtol)
    joint = np.concatenate([P, xL], axis=1)
    rank_joint = np.linalg.matrix_rank(joint, tol=rtol)
    rep.add("dim-equal", 0.0 if rank_P == rank_xL else 1.0)
    rep.add("mutual-containment", 0.0 if rank_joint == rank_P else 1.0)
    rep.extra["dims"] = {"alpha_pK_X": int(rank_P), "x_CL": int(rank_xL)}
    return rep.settle()


def _rep_on_B(datum: ParabolicDatum, rho: Rep) -> Rep:
    """Extend a representation of L to B = LN, trivially on N."""
    G, B, L, N = datum.G, datum.B, datum.L, datum.N
    lpos = {g: i for i, g in enumerate(L.members)}
    nset = set(N.members)
    mats = np.zeros((B.order, rho.dim, rho.dim), dtype=complex)
    for i, b in enumerate(B.members):
        # unique l in L with b ∈ lN
        hits = [l for l in L.members if int(G.mult[G.inv[l], b]) in nset]
        if len(hits) != 1:
            raise ValidationError("Langlands decomposition is not unique on B")
        mats[i] = rho.matrices[lpos[hits[0]]]
    return Rep(subgroup_as_group(B), mats)


def induced_rep_from_module(E: LocalCorrespondence, rho: Rep) -> tuple[Rep, object]:
    """The G-representation on E(G/N) ⊗_{C*(L)} H_rho."""
    rho_hom = E.CL.rep_hom(rho)
    ind = interior_tensor(E.module, rho_hom)
    G = E.datum.G
    m = E.module.cdim
    mats = np.empty((G.n, ind.dim, ind.dim), dtype=complex)
    for g in range(G.n):
        Pg = np.zeros((m, m), dtype=complex)
        Pg[E.left_perm(g), np.arange(m)] = 1.0
        mats[g] = ind.descend(Pg)
    return Rep(G, mats), ind


def _unitary_intertwiner(sigma: Rep, pi: Rep, attempts: int = 8) -> np.ndarray:
    """A unitary U with σ(g) U = U π(g), via group averaging + polar part."""
    if sigma.dim != pi.dim or sigma.group is not pi.group:
        raise PreconditionError("representations are not comparable")
    G, d = sigma.group, sigma.dim
    for attempt in range(attempts):
        rng = np.random.default_rng([23, attempt])
        W = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        T = np.einsum("gij,jk,gmk->im", sigma.matrices, W, pi.matrices.conj()) / G.n
        u, s, vh = np.linalg.svd(T)
        if s.size and float(s.min()) > 1e-8 * max(1.0, float(s.max())):
            return u @ vh
    raise PreconditionError("no invertible intertwiner found (reps inequivalent?)")


def local_induction_check(datum: ParabolicDatum, rho: Rep,
                          seed: int = 0,
                          tol: float = DEFAULT_TOL) -> VerificationReport:
    """E(G/N) ⊗_{C*(L)} H_rho  ≅  Ind_B^G(rho extended trivially on N)."""
    E = build_EGN(datum, seed=seed)
    mod_rep, ind_space = induced_rep_from_module(E, rho)
    rhoB = _rep_on_B(datum, rho)
    classical = induce(datum.G, datum.B, rhoB)
    rep = VerificationReport("parabolic.local-induction", True, tol=tol)
    rep.extra["dims"] = {"module_side": int(mod_rep.dim),
                         "induced_side": int(classical.dim),
                         "index_GB": datum.G.n // datum.B.order}
    if mod_rep.dim != classical.dim:
        rep.add("dimension", 1.0)
        return rep.settle()
    rep.add("character", float(np.abs(mod_rep.character()
                                      - classical.character()).max()))
    rep.add("module-rep-defect", mod_rep.defect())
    rep.add("induced-rep-defect", classical.defect())
    U = _unitary_intertwiner(classical, mod_rep)
    worst = float(np.abs(np.einsum("gij,jk->gik", classical.matrices, U)
                         - np.einsum("ij,gjk->gik", U, mod_rep.matrices)).max())
    rep.add("intertwiner", worst)
    rep.add("intertwiner-unitary",
            float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()))
    return rep.settle()


# --------------------------------------------------------------------------
# the glued family over several primes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AdelicFamily:
    """The parabolic correspondences over several primes as one CorrFamily."""

    family: CorrFamily
    data: tuple[ParabolicDatum, ...]
    locals: tuple[LocalCorrespondence, ...]
    vectors: tuple[np.ndarray, ...]
    constants: tuple[float, ...]


def adelic_family(primes, K_choices=None, seed: int = 0,
                  tol: float = DEFAULT_TOL) -> AdelicFamily:
    """Per prime: A_v = C*(L), p_v = p_{K∩L}, A'_v = C*(G), p'_v = p_K, X_v = E(G/N)."""
    primes = list(primes)
    if K_choices is None:
        K_choices = ["full"] * len(primes)
    algs, projs, mods, vecs = [], [], [], []
    palgs, pprojs, corrs = [], [], []
    data, louts, consts = [], [], []
    for q, kc in zip(primes, K_choices):
        datum = build_datum(q, kc)
        E = build_EGN(datum, seed=seed)
        x, c = distinguished_vector(E, tol=tol)
        KL = Subgroup(datum.G,
                      tuple(sorted(set(datum.K.members) & set(datum.L.members))))
        lpos = {g: i for i, g in enumerate(datum.L.members)}
        pkl = np.zeros(E.CL.group.n, dtype=complex)
        for g in KL.members:
            pkl[lpos[g]] = 1.0 / KL.order
        p_v = E.CL.to_alg(GroupAlgebraElement(E.CL.group, pkl))
        pprime = E.CG.to_alg(proj_pK(datum.G, datum.K))
        algs.append(E.CL.algebra)
        projs.append(p_v)
        mods.append(E.module)
        vecs.append(x)
        palgs.append(E.CG.algebra)
        pprojs.append(pprime)
        corrs.append(E.corr)
        data.append(datum)
        louts.append(E)
        consts.append(c)
    base = AlgebraFamily(tuple(algs), tuple(projs), frozenset())
    MF = ModuleFamily(base, tuple(mods), tuple(vecs))
    PF = AlgebraFamily(tuple(palgs), tuple(pprojs), frozenset())
    fam = CorrFamily(MF, PF, tuple(corrs))
    mrep = validate_module_family(MF, tol=max(tol, 1e-8))
    if not mrep.passed:
        raise ValidationError(
            f"glued module family is invalid (defect {mrep.max_defect():.2e})")
    crep = validate_corr_family(fam, tol=max(tol, 1e-7))
    if not crep.passed:
        raise ValidationError(
            f"glued correspondence family is invalid (defect {crep.max_defect():.2e})")
    return AdelicFamily(fam, tuple(data), tuple(louts), tuple(vecs), tuple(consts))


def global_induction_check(A: AdelicFamily, rhos, S=None,
                           tol: float = DEFAULT_TOL) -> VerificationReport:
    """Three realizations of global parabolic induction agree unitarily.

    (a) the interior tensor of the level module with ⊗ρ_v, carrying the level
    left action; (b) the tensor product of the local inductions; (c) classical
    induction over the product group from the product Borel.  All three are
    compared as representations of the product group.
    """
    F = A.family
    S = tuple(range(F.size)) if S is None else tuple(sorted(set(S)))
    if S != tuple(range(F.size)):
        raise PreconditionError("the level must cover the whole family")
    rep = VerificationReport("parabolic.global-induction", True, tol=tol)

    # (a) level module ⊗ (⊗ρ_v) with the level left action
    Lx = level_module(F.modules, S)
    La = Lx.level_alg
    rho_homs = [A.locals[v].CL.rep_hom(rhos[v]) for v in range(F.size)]
    pi_S = _assemble_only(F.modules.base, rho_homs, La)
    ind_S = interior_tensor(Lx.module, pi_S)
    alpha_S = left_action_level(F, S, tol=tol)

    # the product group and its embedding into the primed level algebra
    Gp = A.data[0].G
    for datum in A.data[1:]:
        Gp = direct_product(Gp, datum.G)
    Lp = LevelAlgebra(F.primed, S)

    def primed_of_group(gtuple):
        flats = []
        for v, gv in enumerate(gtuple):
            E = A.locals[v]
            flats.append(E.CG.iso[:, gv])
        return Lp.algebra.from_flat(Lp.simple_flat(flats))

    orders = [d.G.n for d in A.data]

    def unrank(g):
        out = []
        for n in reversed(orders):
            g, r = divmod(g, n)
            out.append(r)
        return tuple(reversed(out))

    mats_a = np.empty((Gp.n, ind_S.dim, ind_S.dim), dtype=complex)
    for g in range(Gp.n):
        a = primed_of_group(unrank(g))
        mats_a[g] = ind_S.descend(alpha_S.apply(a))
    rep_a = Rep(Gp, mats_a)

    # (b) tensor of the local inductions
    local_reps = []
    for v in range(F.size):
        r, _ = induced_rep_from_module(A.locals[v], rhos[v])
        local_reps.append(r)
    dims = [r.dim for r in local_reps]
    mats_b = np.empty((Gp.n, int(np.prod(dims)), int(np.prod(dims))), dtype=complex)
    for g in range(Gp.n):
        gs = unrank(g)
        M = local_reps[0].matrices[gs[0]]
        for v in range(1, F.size):
            M = np.kron(M, local_reps[v].matrices[gs[v]])
        mats_b[g] = M
    rep_b = Rep(Gp, mats_b)

    # (c) classical induction over the product group from the product Borel
    rank_of = {}
    for g in range(Gp.n):
        rank_of[unrank(g)] = g
    bmem = []
    bsets = [set(d.B.members) for d in A.data]
    for g in range(Gp.n):
        if all(gv in bs for gv, bs in zip(unrank(g), bsets)):
            bmem.append(g)
    Bp = Subgroup(Gp, tuple(bmem))
    rhoBs = [_rep_on_B(A.data[v], rhos[v]) for v in range(F.size)]
    bpos = [{g: i for i, g in enumerate(A.data[v].B.members)} for v in range(F.size)]
    d_rho = int(np.prod([r.dim for r in rhoBs]))
    matsB = np.empty((Bp.order, d_rho, d_rho), dtype=complex)
    for i, b in enumerate(Bp.members):
        bs = unrank(b)
        M = rhoBs[0].matrices[bpos[0][bs[0]]]
        for v in range(1, F.size):
            M = np.kron(M, rhoBs[v].matrices[bpos[v][bs[v]]])
        matsB[i] = M
    rho_Bp = Rep(subgroup_as_group(Bp), matsB)
    rep_c = induce(Gp, Bp, rho_Bp)

    rep.extra["dims"] = {"interior": int(rep_a.dim), "local-tensor": int(rep_b.dim),
                         "product-induced": int(rep_c.dim)}
    if not (rep_a.dim == rep_b.dim == rep_c.dim):
        rep.add("dimension", 1.0)
        return rep.settle()
    for name, (s, p) in {"a-vs-b": (rep_a, rep_b),
                         "b-vs-c": (rep_b, rep_c)}.items():
        U = _unitary_intertwiner(s, p)
        worst = float(np.abs(np.einsum("gij,jk->gik", s.matrices, U)
                             - np.einsum("ij,gjk->gik", U, p.matrices)).max())
        rep.add(f"intertwiner:{name}", worst)
        rep.add(f"unitary:{name}",
                float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()))
    rep.add("character:a-vs-b", float(np.abs(rep_a.character() - rep_b.character()).max()))
    rep.add("character:b-vs-c", float(np.abs(rep_b.character() - rep_c.character()).max()))
    # equivariance of side (a) under the full primed level algebra is by
    # construction; spot-check that the group embedding is multiplicative
    rng = np.random.default_rng([int(1e6) + 17])
    for t in range(4):
        g, h = int(rng.integers(Gp.n)), int(rng.integers(Gp.n))
        lhs = primed_of_group(unrank(int(Gp.mult[g, h])))
        rhs = primed_of_group(unrank(g)) * primed_of_group(unrank(h))
        rep.add(f"embedding:{t}", op_norm(lhs - rhs))
    return rep.settle()
