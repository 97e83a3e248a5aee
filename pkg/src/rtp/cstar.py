"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An algebra is a list of block dimensions; an element is one complex matrix
per block.  Elements carry a flat coordinate layout (blocks concatenated,
row-major) so that linear maps between algebras can be stored as plain
matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class BlockAlgebra:
    """Direct sum of full matrix algebras M_{d_1} + ... + M_{d_k}."""

    blocks: tuple[int, ...]
    label: str | None = None

    def __post_init__(self):
        if len(self.blocks) == 0:
            raise ValidationError("algebra needs at least one block")
        if any(d < 1 for d in self.blocks):
            raise ValidationError(f"block dimensions must be >= 1, got {self.blocks}")
        object.__setattr__(self, "blocks", tuple(int(d) for d in self.blocks))

    @property
    def dim(self) -> int:
        """Linear dimension, sum of d_i^2."""
        return sum(d * d for d in self.blocks)

    def block_offsets(self) -> list[int]:
        offs, o = [], 0
        for d in self.blocks:
            offs.append(o)
            o += d * d
        return offs

    def element(self, data: Sequence[np.ndarray]) -> "AlgElement":
        return AlgElement(self, tuple(np.asarray(m, dtype=complex) for m in data))

    def zero(self) -> "AlgElement":
        return self.element([np.zeros((d, d)) for d in self.blocks])

    def unit(self) -> "AlgElement":
        return self.element([np.eye(d) for d in self.blocks])

    def from_flat(self, v: np.ndarray) -> "AlgElement":
        v = np.asarray(v, dtype=complex).ravel()
        if v.size != self.dim:
            raise ValidationError(f"flat vector has length {v.size}, expected {self.dim}")
        data, o = [], 0
        for d in self.blocks:
            data.append(v[o:o + d * d].reshape(d, d))
            o += d * d
        return self.element(data)

    def basis(self):
        """Matrix-unit basis, in flat-coordinate order."""
        for b, d in enumerate(self.blocks):
            for i in range(d):
                for j in range(d):
                    m = [np.zeros((e, e), dtype=complex) for e in self.blocks]
                    m[b][i, j] = 1.0
                    yield self.element(m)

    def random_element(self, rng: np.random.Generator) -> "AlgElement":
        return self.element([
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            for d in self.blocks
        ])

    def random_projection(self, rng: np.random.Generator,
                          ranks: Sequence[int] | None = None) -> "AlgElement":
        """Random projection; rank in each block drawn uniformly unless given."""
        data = []
        for b, d in enumerate(self.blocks):
            r = int(rng.integers(0, d + 1)) if ranks is None else int(ranks[b])
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            q, _ = np.linalg.qr(g)
            data.append(q[:, :r] @ q[:, :r].conj().T)
        return self.element(data)


@dataclass(frozen=True)
class AlgElement:
    algebra: BlockAlgebra
    data: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.data) != len(self.algebra.blocks):
            raise ValidationError("element has wrong number of blocks")
        for m, d in zip(self.data, self.algebra.blocks):
            if m.shape != (d, d):
                raise ValidationError(f"block shape {m.shape} does not match dimension {d}")

    def flat(self) -> np.ndarray:
        return np.concatenate([m.ravel() for m in self.data])

    def star(self) -> "AlgElement":
        return self.algebra.element([m.conj().T for m in self.data])

    def __add__(self, other: "AlgElement") -> "AlgElement":
        self._same(other)
        return self.algebra.element([a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        self._same(other)
        return self.algebra.element([a - b for a, b in zip(self.data, other.data)])

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            self._same(other)
            return self.algebra.element([a @ b for a, b in zip(self.data, other.data)])
        return self.algebra.element([complex(other) * m for m in self.data])

    def __rmul__(self, scalar):
        return self.algebra.element([complex(scalar) * m for m in self.data])

    def _same(self, other: "AlgElement"):
        if other.algebra.blocks != self.algebra.blocks:
            raise ValidationError("elements live in different algebras")


def make_algebra(dims: Sequence[int], label: str | None = None) -> BlockAlgebra:
    """Build the algebra with the given list of block dimensions."""
    if len(dims) == 0:
        raise ValidationError("dims must be nonempty")
    return BlockAlgebra(tuple(dims), label)


def op_norm(a: AlgElement) -> float:
    """The C*-norm: max over blocks of the largest singular value."""
    return max(float(np.linalg.norm(m, 2)) if m.size else 0.0 for m in a.data)


def is_positive(a: AlgElement, tol: float = DEFAULT_TOL) -> bool:
    for m in a.data:
        if np.abs(m - m.conj().T).max() > tol:
            return False
        if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -tol:
            return False
    return True


def is_projection(p: AlgElement, tol: float = DEFAULT_TOL) -> bool:
    return op_norm(p * p - p) <= tol and op_norm(p.star() - p) <= tol


def is_zero(a: AlgElement, tol: float = DEFAULT_TOL) -> bool:
    return op_norm(a) <= tol


@dataclass(frozen=True)
class StarHom:
    """Linear map between block algebras, stored on flat coordinates.

    Multiplicativity / star-preservation are contract, not construction:
    use validate_star_hom to measure defects.
    """

    domain: BlockAlgebra
    codomain: BlockAlgebra
    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise ValidationError(
                f"map matrix has shape {m.shape}, expected "
                f"({self.codomain.dim}, {self.domain.dim})")
        object.__setattr__(self, "matrix", m)

    def __call__(self, a: AlgElement) -> AlgElement:
        if a.algebra.blocks != self.domain.blocks:
            raise ValidationError("element not in the domain algebra")
        return self.codomain.from_flat(self.matrix @ a.flat())

    def compose(self, inner: "StarHom") -> "StarHom":
        if inner.codomain.blocks != self.domain.blocks:
            raise ValidationError("composition domains do not match")
        return StarHom(inner.domain, self.codomain, self.matrix @ inner.matrix)


def identity_hom(A: BlockAlgebra) -> StarHom:
    return StarHom(A, A, np.eye(A.dim, dtype=complex))


def validate_star_hom(phi: StarHom, tol: float = DEFAULT_TOL) -> bool:
    """Check multiplicativity and star-preservation on the matrix-unit basis."""
    return star_hom_defect(phi) <= tol


def star_hom_defect(phi: StarHom) -> float:
    basis = list(phi.domain.basis())
    images = [phi(e) for e in basis]
    worst = 0.0
    for e, fe in zip(basis, images):
        worst = max(worst, op_norm(phi(e.star()) - fe.star()))
    for i, e in enumerate(basis):
        for j, f in enumerate(basis):
            worst = max(worst, op_norm(phi(e * f) - images[i] * images[j]))
    return worst


class TensorAlgebra:
    """Spatial tensor product A (x) B with its element-level map.

    Blocks are d_i * e_j in lexicographic (i, j) order.  `perm` realizes the
    canonical flat-coordinate identification: flat(a (x) b) = kron(flat a,
    flat b)[perm].
    """

    def __init__(self, A: BlockAlgebra, B: BlockAlgebra):
        self.A = A
        self.B = B
        self.algebra = make_algebra(
            [d * e for d in A.blocks for e in B.blocks])
        self.perm = self._build_perm()

    def _build_perm(self) -> np.ndarray:
        dimB = self.B.dim
        offsA = self.A.block_offsets()
        offsB = self.B.block_offsets()
        perm = np.empty(self.algebra.dim, dtype=np.int64)
        pos = 0
        for bi, d in enumerate(self.A.blocks):
            for bj, e in enumerate(self.B.blocks):
                # kron(a_i, b_j): entry ((r,s),(t,u)) = a_i[r,t] * b_j[s,u]
                r = np.arange(d)[:, None, None, None]
                s = np.arange(e)[None, :, None, None]
                t = np.arange(d)[None, None, :, None]
                u = np.arange(e)[None, None, None, :]
                ia = offsA[bi] + r * d + t
                ib = offsB[bj] + s * e + u
                idx = (ia * dimB + ib).reshape(-1)
                perm[pos:pos + idx.size] = idx
                pos += idx.size
        return perm

    def elem(self, a: AlgElement, b: AlgElement) -> AlgElement:
        """Kronecker product element a (x) b."""
        return self.algebra.element(
            [np.kron(ma, mb) for ma in a.data for mb in b.data])

    def flat_of_kron(self, kron_vec: np.ndarray) -> np.ndarray:
        """Flat coordinates of the tensor element with kron(a, b)-coefficients."""
        return np.asarray(kron_vec, dtype=complex)[self.perm]

    def factor_pairs(self) -> np.ndarray:
        """For each flat basis index k of A(x)B, the (flatA, flatB) indices."""
        return np.stack(divmod(self.perm, self.B.dim), axis=1)


def tensor_algebra(A: BlockAlgebra, B: BlockAlgebra) -> TensorAlgebra:
    return TensorAlgebra(A, B)


def embed_corner(A_F: BlockAlgebra, A_k: BlockAlgebra, p_k: AlgElement,
                 tol: float = DEFAULT_TOL) -> StarHom:
    """The *-homomorphism a -> a (x) p_k into A_F (x) A_k."""
    if not is_projection(p_k, tol):
        raise ValidationError("p_k is not a projection")
    tens = tensor_algebra(A_F, A_k)
    pflat = p_k.flat()
    m = np.zeros((tens.algebra.dim, A_F.dim), dtype=complex)
    i, j = divmod(tens.perm, A_k.dim)
    m[np.arange(tens.algebra.dim), i] = pflat[j]
    return StarHom(A_F, tens.algebra, m)


def irreps_of(A: BlockAlgebra) -> list[StarHom]:
    """One irreducible representation per block: the coordinate projection."""
    reps = []
    o = 0
    for d in A.blocks:
        target = make_algebra([d])
        m = np.zeros((d * d, A.dim), dtype=complex)
        m[:, o:o + d * d] = np.eye(d * d)
        reps.append(StarHom(A, target, m))
        o += d * d
    return reps


def rank_at_most_one(p: AlgElement, tol: float = DEFAULT_TOL) -> bool:
    """True iff every block component of the projection p has rank <= 1."""
    if not is_projection(p, tol):
        raise ValidationError("rank_at_most_one expects a projection")
    for m in p.data:
        # for a projection, rank = trace up to roundoff
        if m.trace().real > 1 + 100 * tol:
            return False
    return True
