"""Finite groups as multiplication tables, group algebras, and representations.

Element 0 is always the identity.  Irreducible representations are computed
numerically: eigenspaces of a seeded random self-adjoint element of the
commutant of the left regular representation are irreducible subrepresentations,
and are deduplicated by character.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cstar import AlgElement, BlockAlgebra, StarHom, make_algebra
from .errors import ValidationError


class FiniteGroup:
    def __init__(self, mult: np.ndarray, labels: Sequence[str] | None = None,
                 validate: bool = True):
        mult = np.asarray(mult, dtype=np.int64)
        n = mult.shape[0]
        if mult.shape != (n, n):
            raise ValidationError("multiplication table must be square")
        if mult.min() < 0 or mult.max() >= n:
            raise ValidationError("table entries out of range")
        self.n = n
        self.mult = mult
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        if validate:
            self._validate()
        self.inv = self._inverses()
        self._classes: list[np.ndarray] | None = None
        self._irreps: dict[int, list["Rep"]] = {}

    def _validate(self):
        n, m = self.n, self.mult
        if not (np.array_equal(m[0], np.arange(n)) and np.array_equal(m[:, 0], np.arange(n))):
            raise ValidationError("element 0 is not a two-sided identity")
        # associativity: m[m[a,b],c] == m[a,m[b,c]]
        # m[m,:][a,b,c] = m[m[a,b],c] and m[:,m][a,b,c] = m[a,m[b,c]]
        if not np.array_equal(m[m, :], m[:, m]):
            raise ValidationError("multiplication table is not associative")
        for r in m:
            if len(set(r.tolist())) != n:
                raise ValidationError("rows must be permutations (no inverses)")

    def _inverses(self) -> np.ndarray:
        inv = np.argwhere(self.mult == 0)
        out = np.empty(self.n, dtype=np.int64)
        out[inv[:, 0]] = inv[:, 1]
        return out

    def op(self, a: int, b: int) -> int:
        return int(self.mult[a, b])

    def conjugacy_classes(self) -> list[np.ndarray]:
        if self._classes is None:
            seen = np.zeros(self.n, dtype=bool)
            classes = []
            for g in range(self.n):
                if seen[g]:
                    continue
                orbit = np.unique([self.mult[self.mult[h, g], self.inv[h]]
                                   for h in range(self.n)])
                seen[orbit] = True
                classes.append(orbit)
            self._classes = classes
        return self._classes

    def irreps(self, seed: int = 0) -> list["Rep"]:
        if seed not in self._irreps:
            self._irreps[seed] = _compute_irreps(self, seed)
        return self._irreps[seed]


def group_from_table(table, labels=None) -> FiniteGroup:
    return FiniteGroup(np.asarray(table), labels=labels, validate=True)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    nh = H.n
    mult = (G.mult[:, None, :, None] * nh + H.mult[None, :, None, :])
    mult = mult.reshape(G.n * nh, G.n * nh)
    labels = [f"({a},{b})" for a in G.labels for b in H.labels]
    # built from two valid tables, axioms hold by construction
    return FiniteGroup(mult, labels=labels, validate=False)


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        mem = tuple(sorted(set(int(m) for m in self.members)))
        object.__setattr__(self, "members", mem)
        G = self.parent
        ms = set(mem)
        if 0 not in ms:
            raise ValidationError("subgroup must contain the identity")
        for a in mem:
            if int(G.inv[a]) not in ms:
                raise ValidationError("subgroup not closed under inverse")
            for b in mem:
                if int(G.mult[a, b]) not in ms:
                    raise ValidationError("subgroup not closed under multiplication")

    @property
    def order(self) -> int:
        return len(self.members)


def subgroup_generate(G: FiniteGroup, generators: Sequence[int]) -> Subgroup:
    cur = {0} | {int(g) for g in generators}
    while True:
        new = {int(G.mult[a, b]) for a in cur for b in cur} | {int(G.inv[a]) for a in cur}
        if new <= cur:
            return Subgroup(G, tuple(sorted(cur)))
        cur |= new


@dataclass(frozen=True)
class GroupAlgebraElement:
    group: FiniteGroup
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.group.n,):
            raise ValidationError("coefficient vector has the wrong length")
        object.__setattr__(self, "coeffs", c)

    def __add__(self, other):
        self._same(other)
        return GroupAlgebraElement(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._same(other)
        return GroupAlgebraElement(self.group, self.coeffs - other.coeffs)

    def __rmul__(self, scalar):
        return GroupAlgebraElement(self.group, complex(scalar) * self.coeffs)

    def _same(self, other):
        if other.group is not self.group:
            raise ValidationError("elements of different group algebras")


def delta(G: FiniteGroup, g: int) -> GroupAlgebraElement:
    c = np.zeros(G.n, dtype=complex)
    c[g] = 1.0
    return GroupAlgebraElement(G, c)


def convolve(f: GroupAlgebraElement, g: GroupAlgebraElement) -> GroupAlgebraElement:
    """(f * g)(x) = sum_y f(y) g(y^-1 x), counting weights."""
    f._same(g)
    G = f.group
    shifted = g.coeffs[G.mult[G.inv, :]]          # shifted[y, x] = g(y^-1 x)
    return GroupAlgebraElement(G, f.coeffs @ shifted)


def star(f: GroupAlgebraElement) -> GroupAlgebraElement:
    """f*(g) = conj(f(g^-1))."""
    return GroupAlgebraElement(f.group, f.coeffs[f.group.inv].conj())


def proj_pK(G: FiniteGroup, K: Subgroup) -> GroupAlgebraElement:
    """p_K(g) = 1/|K| on K, 0 elsewhere; idempotent and self-adjoint."""
    if K.parent is not G:
        raise ValidationError("subgroup of a different group")
    c = np.zeros(G.n, dtype=complex)
    c[list(K.members)] = 1.0 / K.order
    return GroupAlgebraElement(G, c)


def regular_rep_matrix(f: GroupAlgebraElement) -> np.ndarray:
    """Left regular representation: lambda(f)[x, y] = f(x y^-1)."""
    G = f.group
    return f.coeffs[G.mult[:, G.inv]]


class RegularEmbedding:
    """Concrete faithful realization of C*(G) inside M_{|G|}."""

    def __init__(self, G: FiniteGroup):
        self.group = G
        self.codomain = make_algebra([G.n], label=f"M_{G.n}")

    def __call__(self, f: GroupAlgebraElement) -> AlgElement:
        if f.group is not self.group:
            raise ValidationError("element of a different group algebra")
        return self.codomain.element([regular_rep_matrix(f)])


def regular_rep_embed(G: FiniteGroup) -> RegularEmbedding:
    return RegularEmbedding(G)


@dataclass(frozen=True)
class Rep:
    group: FiniteGroup
    matrices: np.ndarray  # (n, d, d) unitary

    def __post_init__(self):
        M = np.asarray(self.matrices, dtype=complex)
        if M.ndim != 3 or M.shape[0] != self.group.n or M.shape[1] != M.shape[2]:
            raise ValidationError("representation matrices have the wrong shape")
        object.__setattr__(self, "matrices", M)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def character(self) -> np.ndarray:
        """One value per conjugacy class."""
        return np.array([np.trace(self.matrices[int(c[0])])
                         for c in self.group.conjugacy_classes()])

    def defect(self) -> float:
        """Max multiplicativity / unitarity defect over the full table."""
        G, M = self.group, self.matrices
        worst = float(np.abs(np.einsum("gij,gkj->gik", M, M.conj())
                             - np.eye(self.dim)).max())
        for a in range(G.n):
            worst = max(worst, float(np.abs(M[a] @ M - M[G.mult[a]]).max()))
        return worst

    def apply(self, f: GroupAlgebraElement) -> np.ndarray:
        return np.einsum("g,gij->ij", f.coeffs, self.matrices)


def trivial_rep(G: FiniteGroup) -> Rep:
    return Rep(G, np.ones((G.n, 1, 1), dtype=complex))


def regular_rep(G: FiniteGroup) -> Rep:
    mats = np.zeros((G.n, G.n, G.n), dtype=complex)
    for g in range(G.n):
        mats[g, G.mult[g], np.arange(G.n)] = 1.0
    return Rep(G, mats)


def restrict_rep(pi: Rep, H: Subgroup, Hgroup: FiniteGroup | None = None) -> Rep:
    """Restriction to a subgroup, reindexed to the subgroup's own table."""
    mem = list(H.members)
    if Hgroup is None:
        Hgroup = subgroup_as_group(H)
    return Rep(Hgroup, pi.matrices[mem])


def subgroup_as_group(H: Subgroup) -> FiniteGroup:
    mem = list(H.members)  # sorted; identity 0 is first
    pos = {g: i for i, g in enumerate(mem)}
    table = [[pos[int(H.parent.mult[a, b])] for b in mem] for a in mem]
    return FiniteGroup(np.array(table), labels=[H.parent.labels[g] for g in mem],
                       validate=False)


def _compute_irreps(G: FiniteGroup, seed: int) -> list[Rep]:
    n = G.n
    lam_perm = G.mult[G.inv]       # (lambda(g) v)[x] = v[g^-1 x]
    for attempt in range(12):
        rng = np.random.default_rng([seed, attempt, 7321])
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        # random element of the commutant (right regular rep), made self-adjoint
        B = np.zeros((n, n), dtype=complex)
        for g in range(n):
            rho = np.zeros((n, n))
            rho[G.mult[:, G.inv[g]], np.arange(n)] = 1.0
            B += c[g] * rho
        H = B + B.conj().T
        w, U = np.linalg.eigh(H)
        clusters = _cluster(w, 1e-7 * max(1.0, float(np.abs(w).max())))
        reps: list[Rep] = []
        ok = True
        for cl in clusters:
            V = U[:, cl]
            d = V.shape[1]
            mats = np.stack([V.conj().T @ V[lam_perm[g]] for g in range(n)])
            cand = Rep(G, mats)
            chi = cand.character()
            sizes = np.array([len(c_) for c_ in G.conjugacy_classes()])
            norm2 = float(np.sum(sizes * np.abs(chi) ** 2).real) / n
            if abs(norm2 - 1.0) > 1e-6:
                ok = False
                break
            reps.append(cand)
        if not ok:
            continue
        uniq: list[Rep] = []
        for r in reps:
            if not any(_same_character(r, u) for u in uniq):
                uniq.append(r)
        if sum(r.dim ** 2 for r in uniq) == n:
            uniq.sort(key=lambda r: (r.dim, _char_key(r)))
            return uniq
    raise ValidationError("irrep computation failed to converge; re-seed")


def _cluster(w: np.ndarray, tol: float) -> list[list[int]]:
    groups, cur = [], [0]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= tol:
            cur.append(i)
        else:
            groups.append(cur)
            cur = [i]
    groups.append(cur)
    return groups


def _same_character(a: Rep, b: Rep) -> bool:
    return a.dim == b.dim and np.abs(a.character() - b.character()).max() < 1e-6


def _char_key(r: Rep):
    chi = r.character()
    return tuple(np.round(np.concatenate([chi.real, chi.imag]), 6))


def decompose_rep(pi: Rep, seed: int = 0) -> list[tuple[str, int]]:
    """Multiplicities of the irreducible constituents, via character pairing."""
    G = pi.group
    sizes = np.array([len(c) for c in G.conjugacy_classes()])
    chi = pi.character()
    out = []
    for k, irr in enumerate(G.irreps(seed)):
        ip = np.sum(sizes * chi * irr.character().conj()) / G.n
        mult = int(round(ip.real))
        if abs(ip - mult) > 1e-6:
            raise ValidationError(f"non-integral multiplicity {ip} in decomposition")
        if mult:
            out.append((f"{irr.dim}d-{k}", mult))
    return out


def induce(G: FiniteGroup, H: Subgroup, pi: Rep) -> Rep:
    """Induced representation on V-valued functions with f(gh) = pi(h^-1) f(g).

    ``pi`` must be a representation of the subgroup reindexed (see
    subgroup_as_group); coset representatives are minimal element indices.
    """
    if H.parent is not G:
        raise ValidationError("H is not a subgroup of G")
    mem = list(H.members)
    pos = {g: i for i, g in enumerate(mem)}
    if pi.group.n != len(mem):
        raise ValidationError("pi is not a representation of H")
    # coset id: minimal element of gH
    coset_of = np.array([min(int(G.mult[g, h]) for h in mem) for g in range(G.n)])
    reps_ = sorted(set(coset_of.tolist()))
    cidx = {r: i for i, r in enumerate(reps_)}
    t, d = len(reps_), pi.dim
    mats = np.zeros((G.n, t * d, t * d), dtype=complex)
    for g in range(G.n):
        ginv = int(G.inv[g])
        for i, ri in enumerate(reps_):
            gi = int(G.mult[ginv, ri])          # g^-1 r_i = r_j h
            j = cidx[int(coset_of[gi])]
            h = int(G.mult[G.inv[reps_[j]], gi])
            mats[g, i * d:(i + 1) * d, j * d:(j + 1) * d] = \
                pi.matrices[pos[int(G.inv[h])]]
    return Rep(G, mats)


def invariant_subspace(pi: Rep, K: Subgroup) -> np.ndarray:
    """Orthonormal basis (columns) of the K-fixed vectors of pi."""
    if K.parent is not pi.group:
        raise ValidationError("K is not a subgroup of pi's group")
    P = pi.matrices[list(K.members)].mean(axis=0)
    w, U = np.linalg.eigh((P + P.conj().T) / 2)
    return U[:, w > 0.5]


def double_cosets(G: FiniteGroup, K: Subgroup) -> list[np.ndarray]:
    mem = list(K.members)
    seen = np.zeros(G.n, dtype=bool)
    out = []
    for g in range(G.n):
        if seen[g]:
            continue
        left = np.unique(G.mult[mem, g])
        orbit = np.unique(G.mult[np.ix_(left, mem)])
        seen[orbit] = True
        out.append(orbit)
    return out


def hecke(G: FiniteGroup, K: Subgroup) -> list[GroupAlgebraElement]:
    """Indicator basis of the double-coset algebra p_K * C[G] * p_K."""
    out = []
    for dc in double_cosets(G, K):
        c = np.zeros(G.n, dtype=complex)
        c[dc] = 1.0 / (K.order ** 2)
        out.append(GroupAlgebraElement(G, c))
    return out


def gelfand_check(G: FiniteGroup, K: Subgroup) -> tuple[bool, float]:
    """Is the bi-K-invariant convolution algebra commutative?"""
    basis = hecke(G, K)
    defect = 0.0
    for i, f in enumerate(basis):
        for g in basis[i + 1:]:
            d = convolve(f, g) - convolve(g, f)
            defect = max(defect, float(np.abs(d.coeffs).max()))
    return defect <= 1e-9 * max(1.0, G.n / K.order), defect


def frobenius_induced_character(G: FiniteGroup, H: Subgroup,
                                chi_H: np.ndarray) -> np.ndarray:
    """Frobenius formula for the induced character, one value per class of G.

    chi_H is indexed by subgroup elements in H.members order.
    """
    pos = {g: i for i, g in enumerate(H.members)}
    vals = np.zeros(len(G.conjugacy_classes()), dtype=complex)
    for ci, cls in enumerate(G.conjugacy_classes()):
        g = int(cls[0])
        s = 0.0 + 0j
        for t in range(G.n):
            x = int(G.mult[G.mult[G.inv[t], g], t])
            if x in pos:
                s += chi_H[pos[x]]
        vals[ci] = s / H.order
    return vals


class GroupCStar:
    """The *-isomorphism C[G] -> direct sum of matrix blocks (one per irrep)."""

    def __init__(self, G: FiniteGroup, seed: int = 0):
        self.group = G
        self.irreps = G.irreps(seed)
        self.algebra = make_algebra([r.dim for r in self.irreps],
                                    label=f"C*({G.n})")
        cols = []
        for g in range(G.n):
            cols.append(np.concatenate([r.matrices[g].ravel() for r in self.irreps]))
        self.iso = np.stack(cols, axis=1)          # (dim, n)
        self.iso_inv = np.linalg.inv(self.iso)

    def to_alg(self, f: GroupAlgebraElement) -> AlgElement:
        if f.group is not self.group:
            raise ValidationError("element of a different group algebra")
        return self.algebra.from_flat(self.iso @ f.coeffs)

    def from_alg(self, a: AlgElement) -> GroupAlgebraElement:
        if a.algebra.blocks != self.algebra.blocks:
            raise ValidationError("element of a different algebra")
        return GroupAlgebraElement(self.group, self.iso_inv @ a.flat())

    def rep_hom(self, pi: Rep) -> StarHom:
        """A group representation as a StarHom out of the block algebra."""
        if pi.group.n != self.group.n or \
                not np.array_equal(pi.group.mult, self.group.mult):
            raise ValidationError("representation of a different group")
        P = np.stack([pi.matrices[g].ravel() for g in range(self.group.n)], axis=1)
        return StarHom(self.algebra, make_algebra([pi.dim]), P @ self.iso_inv)
