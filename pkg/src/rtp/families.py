"""Seeded generators of compatible families for randomized verification sweeps.

All generators are deterministic functions of an `np.random.Generator`; suite
code derives one generator per item from (seed, item index) so results are
independent of evaluation order and parallelism.
"""
from __future__ import annotations

import numpy as np

from .cstar import BlockAlgebra, make_algebra
from .modules import Correspondence, HModule, standard_module
from .limits import AlgebraFamily, CorrFamily, ModuleFamily

__all__ = [
    "random_module_family", "random_corr_family", "counterexample_family",
    "block_irreps_with_vectors",
]


def _unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _random_shape(rng: np.random.Generator, budget: int):
    """Block sizes and multiplicities with dim(A) and cdim(X) kept small."""
    nblocks = int(rng.integers(1, 3))
    blocks, mults = [], []
    for _ in range(nblocks):
        blocks.append(int(rng.integers(1, 3 if budget > 2 else 2)))
        mults.append(int(rng.integers(1, 3 if budget > 2 else 2)))
    return blocks, mults


def random_module_family(rng: np.random.Generator, n_indices: int = 3,
                         exceptional: tuple[int, ...] = ()) -> ModuleFamily:
    """A compatible (X_v, x_v) family with ⟨x_v, x_v⟩ = p_v exactly.

    Each factor is a standard module over a small block algebra; per block,
    x_v is u w* with unit vectors u, w, so the gram is the rank-one projection
    w w* on the nose.  At exceptional indices x_v is replaced by a random
    vector and p_v by a random (possibly higher-rank) projection.
    """
    budget = max(1, 6 - n_indices)
    algs, projs, mods, vecs = [], [], [], []
    for v in range(n_indices):
        blocks, mults = _random_shape(rng, budget)
        A = make_algebra(blocks)
        X = standard_module(A, mults)
        x = np.zeros(X.cdim, dtype=complex)
        pdata = []
        off = 0
        for d, k in zip(blocks, mults):
            u, w = _unit_vector(rng, k), _unit_vector(rng, d)
            x[off:off + k * d] = np.outer(u, w.conj()).reshape(-1)
            pdata.append(np.outer(w, w.conj()))
            off += k * d
        if v in exceptional:
            x = rng.standard_normal(X.cdim) + 1j * rng.standard_normal(X.cdim)
            pdata = A.random_projection(rng).data
        algs.append(A)
        projs.append(A.element(pdata))
        mods.append(X)
        vecs.append(x)
    base = AlgebraFamily(tuple(algs), tuple(projs), frozenset(exceptional))
    return ModuleFamily(base, tuple(mods), tuple(vecs))


def _standard_left_action(X: HModule, blocks, mults) -> tuple[BlockAlgebra, np.ndarray]:
    """A' = ⊕ M_{k_b} acting on the multiplicity side of a standard module."""
    Ap = make_algebra(list(mults))
    alpha = np.zeros((Ap.dim, X.cdim, X.cdim), dtype=complex)
    offp = offx = 0
    for d, k in zip(blocks, mults):
        for i in range(k):
            for j in range(k):
                E = np.zeros((k, k))
                E[i, j] = 1.0
                M = np.zeros((X.cdim, X.cdim), dtype=complex)
                M[offx:offx + k * d, offx:offx + k * d] = np.kron(E, np.eye(d))
                alpha[offp + i * k + j] = M
        offp += k * k
        offx += k * d
    return Ap, alpha


def random_corr_family(rng: np.random.Generator, n_indices: int = 3,
                       exceptional: tuple[int, ...] = ()) -> CorrFamily:
    """A coherent correspondence family: α_v(p'_v) = T_{x_v,x_v} by design.

    The primed algebra is the multiplicity-side matrix algebra of the standard
    module, acting by left multiplication; p'_v is the rank-one projection
    onto the multiplicity part of x_v.
    """
    budget = max(1, 6 - n_indices)
    algs, projs, mods, vecs = [], [], [], []
    palgs, pprojs, corrs = [], [], []
    for v in range(n_indices):
        blocks, mults = _random_shape(rng, budget)
        A = make_algebra(blocks)
        X = standard_module(A, mults)
        Ap, alpha = _standard_left_action(X, blocks, mults)
        x = np.zeros(X.cdim, dtype=complex)
        pdata, ppdata = [], []
        off = 0
        for d, k in zip(blocks, mults):
            u, w = _unit_vector(rng, k), _unit_vector(rng, d)
            x[off:off + k * d] = np.outer(u, w.conj()).reshape(-1)
            pdata.append(np.outer(w, w.conj()))
            ppdata.append(np.outer(u, u.conj()))
            off += k * d
        algs.append(A)
        projs.append(A.element(pdata))
        mods.append(X)
        vecs.append(x)
        palgs.append(Ap)
        pprojs.append(Ap.element(ppdata))
        corrs.append(Correspondence(X, Ap, alpha))
    E = frozenset(exceptional)
    base = AlgebraFamily(tuple(algs), tuple(projs), E)
    MF = ModuleFamily(base, tuple(mods), tuple(vecs))
    PF = AlgebraFamily(tuple(palgs), tuple(pprojs), E)
    return CorrFamily(MF, PF, tuple(corrs))


def counterexample_family(n_indices: int = 2) -> CorrFamily:
    """The failure of coherence when p' has rank two.

    Every factor: A_v = ℂ with p_v = 1, X_v = ℂ² with x_v = (1,0)ᵀ, and
    A'_v = M₂ acting by matrix multiplication with p'_v = 1.  The left action
    is compatible (α(p')x = x) yet α(p') = 1 ≠ T_{x,x}, so coherence fails.
    """
    algs, projs, mods, vecs = [], [], [], []
    palgs, pprojs, corrs = [], [], []
    for _ in range(n_indices):
        A = make_algebra([1])
        X = standard_module(A, [2])
        Ap, alpha = _standard_left_action(X, [1], [2])
        x = np.array([1.0, 0.0], dtype=complex)
        algs.append(A)
        projs.append(A.unit())
        mods.append(X)
        vecs.append(x)
        palgs.append(Ap)
        pprojs.append(Ap.unit())
        corrs.append(Correspondence(X, Ap, alpha))
    base = AlgebraFamily(tuple(algs), tuple(projs), frozenset())
    MF = ModuleFamily(base, tuple(mods), tuple(vecs))
    PF = AlgebraFamily(tuple(palgs), tuple(pprojs), frozenset())
    return CorrFamily(MF, PF, tuple(corrs))


def block_irreps_with_vectors(F: AlgebraFamily):
    """Pick per index a block irrep not killing p_v and a fixed unit vector."""
    from .cstar import irreps_of
    reps, vecs = [], []
    for v in range(F.size):
        A, p = F.algebras[v], F.projections[v]
        chosen = None
        for pi in irreps_of(A):
            P = pi(p).data[0]
            if float(np.abs(P).max()) > 0.5:
                w, U = np.linalg.eigh((P + P.conj().T) / 2)
                chosen = (pi, U[:, -1])
                break
        if chosen is None:
            # p vanishes in every block (only possible for exceptional v)
            pi = irreps_of(A)[0]
            n = pi.codomain.blocks[0]
            chosen = (pi, np.eye(n, dtype=complex)[:, 0])
        reps.append(chosen[0])
        vecs.append(chosen[1])
    return reps, vecs
