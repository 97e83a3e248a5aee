"""Hilbert C*-modules over block algebras.

A module is a raw complex coordinate space of dimension ``cdim`` together
with explicit action and gram tensors:

* ``action[k]`` is the matrix of the right action of the k-th flat basis
  element of the algebra, so ``x . a`` has coordinates ``act_mat(a) @ x``;
* ``gram[i, j]`` is the flat vector of the algebra-valued inner product
  ``<e_i, e_j>``, conjugate-linear in the first argument.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cstar import (AlgElement, BlockAlgebra, StarHom, TensorAlgebra,
                    is_projection, make_algebra, op_norm, tensor_algebra)
from .errors import NotAdjointableError, ValidationError
from .report import VerificationReport

DEFAULT_TOL = 1e-9


def _star_perm(A: BlockAlgebra) -> np.ndarray:
    """Permutation p with flat(a*) = conj(flat(a))[p]."""
    idx = []
    for off, d in zip(A.block_offsets(), A.blocks):
        idx.append((off + (np.arange(d * d).reshape(d, d)).T).ravel())
    return np.concatenate(idx)


@dataclass(frozen=True)
class HModule:
    algebra: BlockAlgebra
    cdim: int
    action: np.ndarray  # (dimA, m, m)
    gram: np.ndarray    # (m, m, dimA)

    def __post_init__(self):
        m, dA = self.cdim, self.algebra.dim
        if self.action.shape != (dA, m, m):
            raise ValidationError(
                f"action tensor has shape {self.action.shape}, expected {(dA, m, m)}")
        if self.gram.shape != (m, m, dA):
            raise ValidationError(
                f"gram tensor has shape {self.gram.shape}, expected {(m, m, dA)}")

    def act_mat(self, a: AlgElement) -> np.ndarray:
        return np.einsum("k,kij->ij", a.flat(), self.action)

    def act(self, x: np.ndarray, a: AlgElement) -> np.ndarray:
        return self.act_mat(a) @ np.asarray(x, dtype=complex)

    def inner(self, x: np.ndarray, y: np.ndarray) -> AlgElement:
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return self.algebra.from_flat(
            np.einsum("i,j,ija->a", x.conj(), y, self.gram))

    def basis(self) -> np.ndarray:
        return np.eye(self.cdim, dtype=complex)


def module_norm(X: HModule, x: np.ndarray) -> float:
    """||x|| = ||<x,x>||^(1/2)."""
    return float(np.sqrt(max(op_norm(X.inner(x, x)), 0.0)))


@dataclass(frozen=True)
class ModOperator:
    module: HModule
    matrix: np.ndarray
    adjoint_matrix: np.ndarray

    def star(self) -> "ModOperator":
        return ModOperator(self.module, self.adjoint_matrix, self.matrix)

    def __matmul__(self, other: "ModOperator") -> "ModOperator":
        return ModOperator(self.module, self.matrix @ other.matrix,
                           other.adjoint_matrix @ self.adjoint_matrix)


def rank_one(X: HModule, xi: np.ndarray, eta: np.ndarray) -> ModOperator:
    """T_{xi,eta}: x -> xi <eta, x>; its adjoint is T_{eta,xi}."""
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if xi.shape != (X.cdim,) or eta.shape != (X.cdim,):
        raise ValidationError("vectors do not live in this module")
    return ModOperator(X, _rank_one_matrix(X, xi, eta),
                       _rank_one_matrix(X, eta, xi))


def _rank_one_matrix(X: HModule, xi, eta) -> np.ndarray:
    # column l is xi . <eta, e_l>
    g = np.einsum("j,jla->la", eta.conj(), X.gram)         # (m, dimA)
    ax = np.einsum("akm,m->ka", X.action, xi)              # (m, dimA)
    return ax @ g.T


def a_linearity_defect(X: HModule, T: np.ndarray) -> float:
    lhs = np.einsum("aij,jk->aik", X.action, T)
    rhs = np.einsum("ij,ajk->aik", T, X.action)
    d = lhs - rhs
    return max(
        (float(np.linalg.norm(d[k], 2)) for k in range(d.shape[0])), default=0.0)


def adjoint(X: HModule, T: np.ndarray, tol: float = DEFAULT_TOL) -> ModOperator:
    """Attach the gram-adjoint to an A-linear matrix, or fail."""
    T = np.asarray(T, dtype=complex)
    lin = a_linearity_defect(X, T)
    if lin > tol:
        raise NotAdjointableError(f"map is not A-linear (defect {lin:.3e})")
    m, dA = X.cdim, X.algebra.dim
    # solve <T e_k, e_j> = <e_k, S e_j> for S
    lhs = X.gram.transpose(1, 0, 2).reshape(m, m * dA).T      # (m*dA, m): sum_l gram[k,l,:] S[l,j]
    rhs = np.einsum("ik,ija->kja", T.conj(), X.gram) \
        .transpose(0, 2, 1).reshape(m * dA, m)
    S, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    res = float(np.abs(lhs @ S - rhs).max())
    if res > max(tol, tol * np.abs(X.gram).max()):
        raise NotAdjointableError(f"no gram-adjoint exists (residual {res:.3e})")
    return ModOperator(X, T, S)


def validate_module(X: HModule, tol: float = DEFAULT_TOL,
                    rng: np.random.Generator | None = None) -> VerificationReport:
    """Measure all module-axiom defects on a basis (sampled when large)."""
    rep = VerificationReport(check="validate_module", passed=False, tol=tol)
    A, m = X.algebra, X.cdim
    basis = list(A.basis())
    flats = np.eye(A.dim)

    rep.add("unit", float(np.abs(X.act_mat(A.unit()) - np.eye(m)).max()))

    # <x,y>* = <y,x>: flat(gram[j,i]*) = conj(gram[j,i])[star permutation]
    sp = _star_perm(A)
    herm = X.gram - X.gram.transpose(1, 0, 2).conj()[:, :, sp]
    rep.add("hermitian", float(np.abs(herm).max()))

    exhaustive = A.dim <= 36 and m <= 40
    if exhaustive:
        pairs = [(i, j) for i in range(A.dim) for j in range(A.dim)]
    else:
        rng = rng or np.random.default_rng(0)
        pairs = [tuple(rng.integers(0, A.dim, 2)) for _ in range(64)]
    assoc = 0.0
    for i, j in pairs:
        Rij = X.act_mat(basis[i] * basis[j])
        assoc = max(assoc, float(np.abs(Rij - X.action[j] @ X.action[i]).max()))
    rep.add("associativity", assoc)

    # <e_p, e_q . e_j> = <e_p, e_q> e_j for every basis element e_j
    alin = 0.0
    for j in range(A.dim):
        lhs = np.einsum("pqa,qr->pra", X.gram, X.action[j])
        rhs = np.einsum("pqa,ab->pqb", X.gram, _right_mult_matrix(A, basis[j]).T)
        alin = max(alin, float(np.abs(lhs - rhs).max()))
    rep.add("a_linearity", alin)

    # positivity and nondegeneracy through the block representations
    total = np.zeros((m, m), dtype=complex)
    for b, g in enumerate(_block_grams(X)):
        w = np.linalg.eigvalsh((g + g.conj().T) / 2)
        rep.add(f"positivity_block_{b}", float(max(0.0, -w.min())))
        n = g.shape[0] // m
        total += np.einsum("irjr->ij", g.reshape(m, n, m, n)) / n
    wmin = float(np.linalg.eigvalsh((total + total.conj().T) / 2).min())
    rep.add("nondegeneracy",
            0.0 if wmin > 1e-12 * max(1.0, float(np.abs(X.gram).max())) else 1.0)
    return rep.settle()


def _right_mult_matrix(A: BlockAlgebra, a: AlgElement) -> np.ndarray:
    """Matrix of x -> x.a on flat coordinates."""
    out = np.zeros((A.dim, A.dim), dtype=complex)
    for off, d, blk in zip(A.block_offsets(), A.blocks, a.data):
        out[off:off + d * d, off:off + d * d] = np.kron(np.eye(d), blk.T)
    return out


def _left_mult_matrix(A: BlockAlgebra, a: AlgElement) -> np.ndarray:
    out = np.zeros((A.dim, A.dim), dtype=complex)
    for off, d, blk in zip(A.block_offsets(), A.blocks, a.data):
        out[off:off + d * d, off:off + d * d] = np.kron(blk, np.eye(d))
    return out


def _block_grams(X: HModule):
    """Localized gram matrix of X for each block representation of A."""
    A, m = X.algebra, X.cdim
    for off, d in zip(A.block_offsets(), A.blocks):
        g = X.gram[:, :, off:off + d * d].reshape(m, m, d, d)
        yield g.transpose(0, 2, 1, 3).reshape(m * d, m * d)


def canonical_module(A: BlockAlgebra) -> HModule:
    """A as a module over itself with <a, b> = a* b."""
    dA = A.dim
    action = np.stack([_right_mult_matrix(A, e) for e in A.basis()])
    gram = np.zeros((dA, dA, dA), dtype=complex)
    basis = list(A.basis())
    for i, ei in enumerate(basis):
        si = ei.star()
        for j in range(dA):
            gram[i, j] = (si * basis[j]).flat()
    return HModule(A, dA, action, gram)


def standard_module(A: BlockAlgebra, mults: Sequence[int]) -> HModule:
    """Direct sum over blocks i of k_i x d_i matrices, <x,y>_i = x_i* y_i."""
    if len(mults) != len(A.blocks):
        raise ValidationError("need one multiplicity per block")
    if any(k < 1 for k in mults):
        raise ValidationError("multiplicities must be >= 1")
    m = sum(k * d for k, d in zip(mults, A.blocks))
    dA = A.dim
    action = np.zeros((dA, m, m), dtype=complex)
    gram = np.zeros((m, m, dA), dtype=complex)
    moff = 0
    for off, d, k in zip(A.block_offsets(), A.blocks, mults):
        for t in range(d):
            for u in range(d):
                a_idx = off + t * d + u
                # right multiplication by E_tu on row-major k x d coordinates
                blk = np.kron(np.eye(k), _unit(d, t, u).T)
                action[a_idx, moff:moff + k * d, moff:moff + k * d] = blk
        # <E_(r,t), E_(r,u)> = E_tu
        for r in range(k):
            for t in range(d):
                for u in range(d):
                    gram[moff + r * d + t, moff + r * d + u, off + t * d + u] = 1.0
        moff += k * d
    return HModule(A, m, action, gram)


def _unit(d, i, j):
    e = np.zeros((d, d))
    e[i, j] = 1.0
    return e


def exterior_tensor(X: HModule, Y: HModule,
                    tens: TensorAlgebra | None = None) -> HModule:
    """Exterior tensor product, a module over the spatial tensor algebra."""
    tens = tens or tensor_algebra(X.algebra, Y.algebra)
    if tens.A.blocks != X.algebra.blocks or tens.B.blocks != Y.algebra.blocks:
        raise ValidationError("tensor algebra does not match the factors")
    m = X.cdim * Y.cdim
    gk = np.einsum("ija,IJb->iIjJab", X.gram, Y.gram).reshape(
        m, m, X.algebra.dim * Y.algebra.dim)
    gram = gk[:, :, tens.perm]
    pairs = tens.factor_pairs()
    action = np.stack([np.kron(X.action[a], Y.action[b]) for a, b in pairs])
    return HModule(tens.algebra, m, action, gram)


@dataclass(frozen=True)
class InducedSpace:
    """Quotient Hilbert space of X (x) H under the balanced semi-inner product."""

    module: HModule
    rep: StarHom          # A -> operators on C^n (single-block codomain)
    hdim: int
    gram: np.ndarray      # (m n, m n) positive semidefinite pairing
    quot: np.ndarray      # (dim, m n): maps X (x) H coordinates to orthonormal ones
    embed: np.ndarray     # (m n, dim): right inverse of quot

    @property
    def dim(self) -> int:
        return self.quot.shape[0]

    def vector(self, x: np.ndarray, h: np.ndarray) -> np.ndarray:
        return self.quot @ np.kron(np.asarray(x, complex), np.asarray(h, complex))

    def descend(self, op: np.ndarray) -> np.ndarray:
        """Push an A-linear operator on X down to the quotient."""
        return self.quot @ np.kron(op, np.eye(self.hdim)) @ self.embed

    def descend_rep_op(self, op_on_h: np.ndarray) -> np.ndarray:
        return self.quot @ np.kron(np.eye(self.module.cdim), op_on_h) @ self.embed


def interior_tensor(X: HModule, pi: StarHom, cutoff: float = 1e-8) -> InducedSpace:
    """Balanced tensor product X (x)_A H for a representation pi of A on H.

    Eigenvalues of the semi-inner-product gram below cutoff * (largest
    eigenvalue) are treated as null directions.
    """
    if pi.domain.blocks != X.algebra.blocks:
        raise ValidationError("representation domain does not match the module algebra")
    if len(pi.codomain.blocks) != 1:
        raise ValidationError("representation must land in a single matrix block")
    n = pi.codomain.blocks[0]
    m = X.cdim
    P = np.einsum("pq,ijq->ijp", pi.matrix, X.gram)
    big = P.reshape(m, m, n, n).transpose(0, 2, 1, 3).reshape(m * n, m * n)
    big = (big + big.conj().T) / 2
    w, U = np.linalg.eigh(big)
    top = max(float(w.max(initial=0.0)), 0.0)
    keep = w > cutoff * top if top > 0 else np.zeros_like(w, dtype=bool)
    Ur, wr = U[:, keep], w[keep]
    # quotient coords are orthonormal: (Q v)^H (Q w) = v^H gram w up to cutoff
    quot = (Ur * np.sqrt(wr)).conj().T if wr.size else np.zeros((0, m * n))
    embed = Ur / np.sqrt(wr) if wr.size else np.zeros((m * n, 0))
    return InducedSpace(X, pi, n, big, quot, embed)


def compact_basis(X: HModule) -> list[ModOperator]:
    """Rank-one operators on the basis-pair grid; their span is K_A(X)."""
    eye = np.eye(X.cdim, dtype=complex)
    return [rank_one(X, eye[i], eye[j])
            for i in range(X.cdim) for j in range(X.cdim)]


def module_op_norm(X: HModule, T: np.ndarray) -> float:
    """C*-norm of an adjointable operator, via the block representations of A."""
    from .cstar import irreps_of
    best = 0.0
    for pi in irreps_of(X.algebra):
        ind = interior_tensor(X, pi)
        if ind.dim:
            best = max(best, float(np.linalg.norm(ind.descend(T), 2)))
    return best


@dataclass(frozen=True)
class Correspondence:
    """Hilbert A-module with a left action of A' by adjointable operators.

    ``alpha[k]`` is the operator of the k-th flat basis element of A'.
    """

    X: HModule
    Aprime: BlockAlgebra
    alpha: np.ndarray  # (dimA', m, m)

    def __post_init__(self):
        if self.alpha.shape != (self.Aprime.dim, self.X.cdim, self.X.cdim):
            raise ValidationError("left-action tensor has the wrong shape")

    def apply(self, a: AlgElement) -> np.ndarray:
        if a.algebra.blocks != self.Aprime.blocks:
            raise ValidationError("element not in the left algebra")
        return np.einsum("k,kij->ij", a.flat(), self.alpha)

    def apply_op(self, a: AlgElement, tol: float = DEFAULT_TOL) -> ModOperator:
        return adjoint(self.X, self.apply(a), tol)


def correspondence_defect(corr: Correspondence,
                          rng: np.random.Generator | None = None,
                          samples: int = 24) -> float:
    """Multiplicativity, star and adjointability defects of the left action."""
    A, X = corr.Aprime, corr.X
    sp = _star_perm(A)
    worst = 0.0
    # star: alpha(a*) must be the gram-adjoint of alpha(a)
    exhaustive = A.dim <= 64
    if exhaustive:
        idx_pairs = [(i, j) for i in range(A.dim) for j in range(A.dim)]
        singles = [np.eye(A.dim)[i] for i in range(A.dim)]
    else:
        rng = rng or np.random.default_rng(0)
        singles = [rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim)
                   for _ in range(samples)]
        idx_pairs = None
    basis_ops = corr.alpha
    if idx_pairs is not None:
        for i, j in idx_pairs:
            ei = A.from_flat(np.eye(A.dim)[i])
            ej = A.from_flat(np.eye(A.dim)[j])
            prod = corr.apply(ei * ej)
            worst = max(worst, float(np.abs(prod - basis_ops[i] @ basis_ops[j]).max()))
    else:
        for _ in range(samples):
            u = rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim)
            v = rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim)
            a, b = A.from_flat(u), A.from_flat(v)
            prod = corr.apply(a * b)
            scale = max(1.0, float(np.abs(corr.apply(a)).max() * np.abs(corr.apply(b)).max()))
            worst = max(worst, float(np.abs(prod - corr.apply(a) @ corr.apply(b)).max()) / scale)
    for u in singles:
        a = A.from_flat(u)
        Ta = corr.apply(a)
        try:
            op = adjoint(X, Ta, tol=max(1e-7, 1e-9 * max(1.0, float(np.abs(Ta).max()))))
        except NotAdjointableError:
            return np.inf
        Tstar = corr.apply(a.star())
        scale = max(1.0, float(np.abs(Ta).max()))
        worst = max(worst, float(np.abs(op.adjoint_matrix - Tstar).max()) / scale)
    return worst
