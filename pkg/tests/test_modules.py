import numpy as np
import pytest

from rtp.cstar import irreps_of, make_algebra
from rtp.errors import NotAdjointableError
from rtp.modules import (adjoint, canonical_module, exterior_tensor,
                         interior_tensor, rank_one, standard_module,
                         validate_module)

RNG = np.random.default_rng(11)


def _rand_vec(n, rng=RNG):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_standard_module_axioms():
    A = make_algebra([2, 3])
    X = standard_module(A, [2, 1])
    assert validate_module(X).passed


def test_inner_product_conjugate_linear_first_argument():
    A = make_algebra([2])
    X = standard_module(A, [1])
    x, y = _rand_vec(X.cdim), _rand_vec(X.cdim)
    lam = 2.0 - 1.5j
    lhs = X.inner(lam * x, y).flat()
    rhs = np.conj(lam) * X.inner(x, y).flat()
    assert np.abs(lhs - rhs).max() < 1e-12


def test_rank_one_adjoint_identity():
    # oracle: <T_{xi,eta} x, y> = <x, T_{eta,xi} y> for random vectors
    A = make_algebra([2, 2])
    X = standard_module(A, [2, 1])
    xi, eta, x, y = (_rand_vec(X.cdim) for _ in range(4))
    T = rank_one(X, xi, eta)
    lhs = X.inner(T.matrix @ x, y).flat()
    rhs = X.inner(x, T.adjoint_matrix @ y).flat()
    assert np.abs(lhs - rhs).max() < 1e-10


def test_adjoint_recovers_rank_one_adjoint():
    A = make_algebra([2])
    X = standard_module(A, [2])
    T = rank_one(X, _rand_vec(X.cdim), _rand_vec(X.cdim))
    S = adjoint(X, T.matrix)
    assert np.abs(S.adjoint_matrix - T.adjoint_matrix).max() < 1e-9


def test_non_module_map_not_adjointable():
    A = make_algebra([2])
    X = standard_module(A, [2])
    # a generic matrix is not A-linear, so it admits no module adjoint
    with pytest.raises(NotAdjointableError):
        adjoint(X, RNG.standard_normal((X.cdim, X.cdim)))


def test_interior_tensor_gram_identity():
    # oracle: quotient coordinates satisfy (Qv)^H (Qw) = v^H gram_pi w
    A = make_algebra([2, 1])
    X = standard_module(A, [1, 2])
    for pi in irreps_of(A):
        ind = interior_tensor(X, pi)
        if ind.dim == 0:
            continue
        m, d = X.cdim, pi.codomain.blocks[0]
        # independent oracle for the semi-inner-product pairing
        big = np.zeros((m * d, m * d), dtype=complex)
        eye = np.eye(m)
        for i in range(m):
            for j in range(m):
                g = pi(X.inner(eye[i], eye[j])).data[0]
                big[i * d:(i + 1) * d, j * d:(j + 1) * d] = g
        v, w = _rand_vec(m * d), _rand_vec(m * d)
        lhs = np.vdot(ind.quot @ v, ind.quot @ w)
        rhs = np.vdot(v, big @ w)
        assert abs(lhs - rhs) < 1e-9


def test_interior_tensor_descend_respects_composition():
    A = make_algebra([2])
    X = canonical_module(A)
    pi = irreps_of(A)[0]
    ind = interior_tensor(X, pi)
    T1 = rank_one(X, _rand_vec(X.cdim), _rand_vec(X.cdim)).matrix
    T2 = rank_one(X, _rand_vec(X.cdim), _rand_vec(X.cdim)).matrix
    assert np.abs(ind.descend(T1 @ T2)
                  - ind.descend(T1) @ ind.descend(T2)).max() < 1e-9


def test_exterior_tensor_gram_factorizes():
    A, B = make_algebra([2]), make_algebra([1, 2])
    X, Y = standard_module(A, [1]), standard_module(B, [1, 1])
    Z = exterior_tensor(X, Y)
    x1, x2 = _rand_vec(X.cdim), _rand_vec(X.cdim)
    y1, y2 = _rand_vec(Y.cdim), _rand_vec(Y.cdim)
    g = Z.inner(np.kron(x1, y1), np.kron(x2, y2))
    gx, gy = X.inner(x1, x2), Y.inner(y1, y2)
    k = 0
    for i in range(len(A.blocks)):
        for j in range(len(B.blocks)):
            assert np.abs(g.data[k] - np.kron(gx.data[i], gy.data[j])).max() < 1e-10
            k += 1
