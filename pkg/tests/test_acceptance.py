"""Acceptance gate: each test prints one pass/fail line at its tolerance."""
import json
import time

import numpy as np
import pytest

from rtp.cli import main, run_suite
from rtp.cstar import rank_at_most_one
from rtp.families import (block_irreps_with_vectors, counterexample_family,
                          random_module_family)
from rtp.groups import (convolve, decompose_rep, gelfand_check,
                        frobenius_induced_character, induce,
                        invariant_subspace, proj_pK, star, subgroup_as_group,
                        subgroup_generate, trivial_rep)
from rtp.limits import (coherence_check, coherence_sufficient_check,
                        induction_commutes_check, validate_corr_family)
from rtp.parabolic import (adelic_family, build_datum, gl2_group,
                           global_induction_check, local_induction_check)


def _line(capsys, ok: bool, text: str):
    with capsys.disabled():
        print(f"[{'PASS' if ok else 'FAIL'}] {text}")
    assert ok, text


def test_criterion_1_isometry_suite(capsys):
    t0 = time.perf_counter()
    doc = run_suite("isometry", seed=0, tol=1e-9, jobs=1, n=100)
    dt = time.perf_counter() - t0
    funct = max(d["value"] for r in doc["reports"] for d in r["defects"]
                if d["where"] == "functoriality")
    ok = doc["pass"] and funct < 1e-12 and dt < 30.0
    _line(capsys, ok, "criterion 1: 100-family isometry suite, "
          f"max defect {doc['max_defect']:.2e} < 1e-9, "
          f"functoriality {funct:.2e} < 1e-12, {dt:.1f}s < 30s")


def test_criterion_2_compacts_isomorphism(capsys):
    doc = run_suite("compacts", seed=0, tol=1e-9, jobs=1, n=100)
    _line(capsys, doc["pass"],
          "criterion 2: compacts *-isomorphism and connecting rule on 100 "
          f"families, max defect {doc['max_defect']:.2e} < 1e-9")


def test_criterion_3_counterexample_fidelity(capsys):
    F = counterexample_family()
    compat = validate_corr_family(F).passed
    coh = coherence_check(F).passed
    suff = coherence_sufficient_check(F)
    rank2 = all(not c["rank_one"]
                for c in suff.extra["conditions"].values())
    ok = compat and (not coh) and rank2
    _line(capsys, ok, "criterion 3: M2 counterexample passes compatibility, "
          "fails coherence, attributed to the rank-2 projection p'")


def test_criterion_4_factorization(capsys):
    doc = run_suite("factorization", seed=0, tol=1e-9, jobs=1, n=16)
    # generator precondition: every p_v has rank at most one
    for i in range(4):
        F = random_module_family(np.random.default_rng([0, i]), 3).base
        assert all(rank_at_most_one(p) for p in F.projections)
    _line(capsys, doc["pass"],
          "criterion 4: all level irreps factorize and reassemble over the "
          f"complete block-tuple enumeration, max defect "
          f"{doc['max_defect']:.2e} < 1e-9")


def test_criterion_5_induction_commutes(capsys):
    doc = run_suite("induction", seed=0, tol=1e-9, jobs=1, n=12)
    A = adelic_family([2, 3])
    reps, vecs = block_irreps_with_vectors(A.family.modules.base)
    toy = induction_commutes_check(A.family, reps, vecs, (0, 1), tol=1e-9)
    ok = doc["pass"] and toy.passed
    _line(capsys, ok, "criterion 5: induction commutes with tensor products "
          f"on 12 random coherent families (max defect {doc['max_defect']:.2e}) "
          f"and the parabolic family (max defect {toy.max_defect():.2e}) < 1e-9")


def test_criterion_6_local_parabolic_induction(capsys):
    t0 = time.perf_counter()
    d2 = build_datum(2)
    L2 = subgroup_as_group(d2.L)
    rep2 = local_induction_check(d2, trivial_rep(L2), tol=1e-9)
    dims_ok = rep2.extra["dims"]["module_side"] == 3
    from rtp.parabolic import build_EGN, induced_rep_from_module
    pi2, _ = induced_rep_from_module(build_EGN(d2), trivial_rep(L2))
    dec = sorted(int(n.split("d-")[0]) for n, _ in decompose_rep(pi2))
    decomp_ok = dec == [1, 2]

    d3 = build_datum(3)
    L3 = subgroup_as_group(d3.L)
    chars = [r for r in L3.irreps() if r.dim == 1]
    ok3 = len(chars) == 4
    for ch in chars:
        r = local_induction_check(d3, ch, tol=1e-9)
        ok3 = ok3 and r.passed and r.extra["dims"]["module_side"] == 4
    dt = time.perf_counter() - t0
    ok = rep2.passed and dims_ok and decomp_ok and ok3 and dt < 60.0
    _line(capsys, ok, "criterion 6: GL2(F2) induction has dim 3 = trivial + "
          "2-dim and GL2(F3) matches for all 4 characters at dim 4, "
          f"defects < 1e-9, {dt:.1f}s < 60s")


def test_criterion_7_global_gluing(capsys):
    A = adelic_family([2, 3])
    rhos = [trivial_rep(subgroup_as_group(d.L)) for d in A.data]
    rep = global_induction_check(A, rhos, tol=1e-9)
    dims = rep.extra["dims"]
    ok = rep.passed and dims["interior"] == dims["local-tensor"] == \
        dims["product-induced"] == 12
    _line(capsys, ok, "criterion 7: three-way global induction equivalence "
          f"over primes {{2,3}} at common dimension 12, max defect "
          f"{rep.max_defect():.2e} < 1e-9")


def test_criterion_8_group_algebra_infrastructure(capsys):
    ok = True
    groups = [subgroup_as_group(subgroup_generate(gl2_group(2),
                                                  range(gl2_group(2).n))),
              gl2_group(3)]
    # sum of squared irrep dimensions (S3 realized as GL2(F2), and GL2(F3))
    for G in groups:
        ok = ok and sum(r.dim ** 2 for r in G.irreps()) == G.n
    # p_K idempotence and Frobenius on randomized subgroup/irrep pairs
    rng = np.random.default_rng(0)
    worst_idem, worst_frob = 0.0, 0.0
    for G in groups:
        for _ in range(4):
            gens = rng.integers(0, G.n, size=2)
            K = subgroup_generate(G, [int(g) for g in gens])
            p = proj_pK(G, K)
            worst_idem = max(worst_idem,
                             float(np.abs(convolve(p, p).coeffs
                                          - p.coeffs).max()),
                             float(np.abs(star(p).coeffs - p.coeffs).max()))
            if K.order == G.n:
                continue
            Kg = subgroup_as_group(K)
            rho = Kg.irreps()[int(rng.integers(0, len(Kg.irreps())))]
            chi_elem = np.einsum("gii->g", rho.matrices)
            chi = frobenius_induced_character(G, K, chi_elem)
            worst_frob = max(worst_frob, float(np.abs(
                induce(G, K, rho).character() - chi).max()))
    ok = ok and worst_idem < 1e-12 and worst_frob < 1e-9
    # Gelfand-implies-multiplicity-one sweep
    G = groups[0]
    for g in range(G.n):
        K = subgroup_generate(G, (g,))
        if gelfand_check(G, K)[0]:
            for r in G.irreps():
                ok = ok and invariant_subspace(r, K).shape[1] <= 1
    _line(capsys, ok, "criterion 8: group-algebra infrastructure "
          f"(p_K idempotence {worst_idem:.2e} < 1e-12, Frobenius "
          f"{worst_frob:.2e} < 1e-9, dim sums, Gelfand sweep)")


def test_criterion_9_determinism(capsys, tmp_path):
    paths = [tmp_path / f"r{i}.json" for i in range(3)]
    assert main(["suite", "coherence", "--n", "6", "--seed", "17",
                 "--jobs", "1", "--out", str(paths[0])]) == 0
    assert main(["suite", "coherence", "--n", "6", "--seed", "17",
                 "--jobs", "8", "--out", str(paths[1])]) == 0
    assert main(["suite", "coherence", "--n", "6", "--seed", "17",
                 "--jobs", "1", "--out", str(paths[2])]) == 0
    b = [p.read_bytes() for p in paths]
    ok = b[0] == b[1] == b[2]
    _line(capsys, ok, "criterion 9: byte-identical suite reports for the "
          "same seed at parallelism 1 and 8")
