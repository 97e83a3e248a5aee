"""Every irreducible representation of a level algebra factors through the
per-index irreps, and inducing through the level module commutes with
taking tensor products."""
import numpy as np

from rtp import (block_irreps_with_vectors, factorize_irrep,
                 induction_commutes_check, irreps_of, level_algebra,
                 random_corr_family, random_module_family)

rng = np.random.default_rng(1)
F = random_module_family(rng, n_indices=3).base
S = (0, 1, 2)
La = level_algebra(F, S)
for b, rho in enumerate(irreps_of(La.algebra)):
    factors, rep = factorize_irrep(F, rho, S)
    print(f"block {b}: tuple {rep.extra['block_tuple']}, "
          f"reassembly defect {rep.max_defect():.2e}")

C = random_corr_family(np.random.default_rng(13), n_indices=3)
reps, vecs = block_irreps_with_vectors(C.modules.base)
rep = induction_commutes_check(C, reps, vecs, (0, 1, 2))
print("induction commutes with tensor products:", rep.passed,
      f"(max defect {rep.max_defect():.2e})")
