import numpy as np
import pytest

from rtp.cstar import irreps_of, make_algebra, star_hom_defect
from rtp.errors import PreconditionError
from rtp.families import (block_irreps_with_vectors, counterexample_family,
                          random_corr_family, random_module_family)
from rtp.limits import (HilbertFamily, check_direct_limit_identity,
                        coherence_check, coherence_sufficient_check,
                        compacts_iso_check, connecting_alg_hom,
                        connecting_map, factorize_irrep,
                        induction_commutes_check, left_action_square_defect,
                        level_algebra, level_indices, level_module,
                        level_operator, level_representation, typeI_check,
                        validate_corr_family, validate_module_family)


def _family(seed=0, n=3, exceptional=()):
    return random_module_family(np.random.default_rng([seed, 0]),
                                n_indices=n, exceptional=exceptional)


def test_level_indices_requires_exceptional():
    F = _family(exceptional=(0,))
    assert level_indices(F, (0, 2)) == (0, 2)
    with pytest.raises(Exception):
        level_indices(F, (2,))       # drops the exceptional index


def test_validate_random_family():
    assert validate_module_family(_family()).passed


def test_connecting_alg_hom_is_star_hom():
    F = _family().base
    La, Lb = level_algebra(F, (0,)), level_algebra(F, (0, 1, 2))
    phi = connecting_alg_hom(F, La, Lb)
    assert star_hom_defect(phi) < 1e-12


def test_connecting_map_isometry_and_functoriality():
    F = _family(seed=3, n=4)
    rng = np.random.default_rng(5)
    i01, rep = connecting_map(F, (0,), (0, 1), rng=rng)
    assert rep.passed
    i12, _ = connecting_map(F, (0, 1), (0, 1, 2), rng=rng)
    i02, _ = connecting_map(F, (0,), (0, 1, 2), rng=rng)
    assert np.abs(i12 @ i01 - i02).max() < 1e-12


def test_direct_limit_identity():
    F = _family(seed=4)
    rep = check_direct_limit_identity(F, (0,), (0, 1, 2))
    assert rep.passed


def test_level_operator_preconditions():
    F = _family(seed=6, n=3)
    dims = [X.cdim for X in F.modules]
    H = HilbertFamily(tuple(dims), tuple(F.vectors), F.base.exceptional)
    ops = [np.eye(d, dtype=complex) for d in dims]
    mat, rep = level_operator(H, ops, (0, 1))
    assert rep.passed and np.allclose(mat, np.eye(mat.shape[0]))
    # an operator outside S that moves the distinguished vector is rejected
    bad = [o.copy() for o in ops]
    bad[2] = 2 * np.eye(dims[2], dtype=complex)
    with pytest.raises(PreconditionError):
        level_operator(H, bad, (0, 1))


def test_level_representation_is_star_hom():
    F = _family(seed=8).base
    reps, vecs = block_irreps_with_vectors(F)
    pi, _ = level_representation(F, reps, vecs, (0, 1))
    assert star_hom_defect(pi) < 1e-10


def test_factorize_irrep_roundtrip():
    F = _family(seed=9, n=3).base
    La = level_algebra(F, (0, 1, 2))
    for rho in irreps_of(La.algebra):
        factors, rep = factorize_irrep(F, rho, (0, 1, 2))
        assert rep.passed
        assert len(factors) == 3


def test_compacts_iso():
    F = _family(seed=10)
    rep = compacts_iso_check(F, (0,), (0, 1, 2),
                             rng=np.random.default_rng(1))
    assert rep.passed


def test_coherent_family_full_stack():
    F = random_corr_family(np.random.default_rng([12, 0]), n_indices=3)
    assert validate_corr_family(F).passed
    assert coherence_check(F).passed
    assert coherence_sufficient_check(F).passed
    assert left_action_square_defect(F, (0,), (0, 1, 2)).passed
    # typeI verdict is recorded (computed), not asserted a priori
    assert "span_rank" in typeI_check(F).extra


def test_counterexample_fails_coherence_only():
    F = counterexample_family()
    assert validate_corr_family(F).passed           # compatibility holds
    assert not coherence_check(F).passed            # coherence does not
    suff = coherence_sufficient_check(F)
    conds = suff.extra["conditions"]
    assert all(not c["rank_one"] for c in conds.values())


def test_induction_commutes_on_random_family():
    F = random_corr_family(np.random.default_rng([14, 0]), n_indices=3)
    reps, vecs = block_irreps_with_vectors(F.modules.base)
    rep = induction_commutes_check(F, reps, vecs, (0, 1, 2))
    assert rep.passed
