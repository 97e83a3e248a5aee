import numpy as np
import pytest

from rtp.groups import decompose_rep, trivial_rep
from rtp.limits import coherence_check, validate_corr_family
from rtp.parabolic import (adelic_family, asspar_check, build_EGN,
                           build_datum, delta_modular, distinguished_vector,
                           gl2_group, global_induction_check,
                           induced_rep_from_module, local_induction_check)


def test_gl2_orders():
    assert gl2_group(2).n == 6
    assert gl2_group(3).n == 48


def test_datum_structure_q2():
    d = build_datum(2)
    assert (d.G.n, d.B.order, d.L.order, d.N.order) == (6, 2, 1, 2)


def test_datum_structure_q3():
    d = build_datum(3)
    assert (d.G.n, d.B.order, d.L.order, d.N.order) == (48, 12, 4, 3)


def test_modular_function_trivial():
    assert delta_modular(0) == 1.0


def test_distinguished_vector_constant_q2():
    d = build_datum(2)
    E = build_EGN(d)
    x, c = distinguished_vector(E)
    # |G/N| = 3 cosets, |L| = 1: c = (3*1)^(-1/2)
    assert abs(c - 3 ** -0.5) < 1e-12
    assert asspar_check(E, x).passed


def _L_group(datum):
    from rtp.groups import subgroup_as_group
    return subgroup_as_group(datum.L)


def test_local_induction_q2_trivial():
    d = build_datum(2)
    rep = local_induction_check(d, trivial_rep(_L_group(d)))
    assert rep.passed
    assert rep.extra["dims"]["module_side"] == 3


def test_induced_module_rep_decomposition_q2():
    d = build_datum(2)
    E = build_EGN(d)
    pi, _ = induced_rep_from_module(E, trivial_rep(_L_group(d)))
    assert pi.dim == 3
    assert sorted(m for _, m in decompose_rep(pi)) == [1, 1]
    dims = sorted(int(name.split("d-")[0]) for name, _ in decompose_rep(pi))
    assert dims == [1, 2]      # trivial plus the 2-dimensional constituent


def test_adelic_family_valid_and_coherent():
    A = adelic_family([2, 3])
    assert validate_corr_family(A.family, tol=1e-8).passed
    assert coherence_check(A.family, tol=1e-8).passed
    assert abs(A.constants[0] - 3 ** -0.5) < 1e-12
    assert abs(A.constants[1] - 0.125) < 1e-10


def test_global_induction_dimension_q2_only_pair():
    A = adelic_family([2, 3])
    rhos = [trivial_rep(_L_group(A.data[0])), trivial_rep(_L_group(A.data[1]))]
    rep = global_induction_check(A, rhos)
    assert rep.passed
    assert rep.extra["dims"]["interior"] == 12
