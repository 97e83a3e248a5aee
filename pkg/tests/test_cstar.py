import numpy as np
import pytest

from rtp.cstar import (TensorAlgebra, embed_corner, identity_hom, irreps_of,
                       make_algebra, rank_at_most_one, star_hom_defect)
from rtp.errors import ValidationError

RNG = np.random.default_rng(7)


def _rand_elem(A, rng=RNG):
    return A.element([rng.standard_normal((d, d))
                          + 1j * rng.standard_normal((d, d))
                          for d in A.blocks])


def test_flat_roundtrip_and_ops():
    A = make_algebra([2, 3])
    a, b = _rand_elem(A), _rand_elem(A)
    assert np.allclose(A.from_flat(a.flat()).flat(), a.flat())
    # multiplication and star act blockwise
    c = a * b
    for k in range(2):
        assert np.allclose(c.data[k], a.data[k] @ b.data[k])
        assert np.allclose(a.star().data[k], a.data[k].conj().T)


def test_tensor_matches_dense_kron():
    # oracle: permuting kron(flat a, flat b) must equal the blockwise kron
    A, B = make_algebra([2, 1]), make_algebra([1, 3])
    T = TensorAlgebra(A, B)
    a, b = _rand_elem(A), _rand_elem(B)
    t = T.elem(a, b)
    k = 0
    for i, da in enumerate(A.blocks):
        for j, db in enumerate(B.blocks):
            assert np.allclose(t.data[k], np.kron(a.data[i], b.data[j]))
            k += 1
    assert np.allclose(t.flat(), np.kron(a.flat(), b.flat())[T.perm])


def test_tensor_is_multiplicative():
    A, B = make_algebra([2]), make_algebra([2, 1])
    T = TensorAlgebra(A, B)
    a1, a2 = _rand_elem(A), _rand_elem(A)
    b1, b2 = _rand_elem(B), _rand_elem(B)
    lhs = T.elem(a1, b1) * T.elem(a2, b2)
    rhs = T.elem(a1 * a2, b1 * b2)
    assert np.abs(lhs.flat() - rhs.flat()).max() < 1e-12


def test_irreps_are_star_homs():
    A = make_algebra([1, 2, 3])
    for pi in irreps_of(A):
        assert star_hom_defect(pi) < 1e-12
    assert star_hom_defect(identity_hom(A)) < 1e-15


def test_embed_corner_is_multiplicative():
    A, Ak = make_algebra([2]), make_algebra([2, 1])
    p = Ak.element([np.diag([1.0, 0.0]).astype(complex),
                    np.ones((1, 1), dtype=complex)])
    phi = embed_corner(A, Ak, p)
    a, b = _rand_elem(A), _rand_elem(A)
    assert np.abs((phi(a) * phi(b)).flat() - phi(a * b).flat()).max() < 1e-12
    assert star_hom_defect(phi) < 1e-12


def test_rank_at_most_one_detects_projection_rank():
    A = make_algebra([2])
    p1 = A.element([np.diag([1.0, 0.0]).astype(complex)])
    p2 = A.element([np.eye(2, dtype=complex)])
    assert rank_at_most_one(p1)
    assert not rank_at_most_one(p2)
    nonproj = A.element([np.array([[0.5, 0.5], [0.0, 0.5]], complex)])
    with pytest.raises(ValidationError):
        rank_at_most_one(nonproj)
