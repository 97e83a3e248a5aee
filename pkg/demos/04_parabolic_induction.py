"""Parabolic induction for GL2 over F2 and F3 realized through Hilbert
module correspondences, locally and glued over both primes."""
from rtp import (adelic_family, build_datum, coherence_check, decompose_rep,
                 global_induction_check, local_induction_check,
                 subgroup_as_group, trivial_rep)
from rtp.parabolic import build_EGN, induced_rep_from_module

for q in (2, 3):
    d = build_datum(q)
    print(f"q={q}: |G|={d.G.n} |B|={d.B.order} |L|={d.L.order} |N|={d.N.order}")
    Lg = subgroup_as_group(d.L)
    for k, ch in enumerate(r for r in Lg.irreps() if r.dim == 1):
        rep = local_induction_check(d, ch)
        dims = rep.extra["dims"]
        print(f"  char {k}: induced dim {dims['module_side']}, "
              f"matches classical induction: {rep.passed}")

d2 = build_datum(2)
pi, _ = induced_rep_from_module(build_EGN(d2), trivial_rep(subgroup_as_group(d2.L)))
print("q=2 trivial induction decomposes as:", decompose_rep(pi))

A = adelic_family([2, 3])
print("glued family coherent:", coherence_check(A.family, tol=1e-8).passed)
rhos = [trivial_rep(subgroup_as_group(d.L)) for d in A.data]
g = global_induction_check(A, rhos)
print("three-way global equivalence:", g.passed, "dims:", g.extra["dims"])
