"""Build level algebras and modules for a random compatible family and watch
the connecting maps behave: isometric, functorial, and compatible with the
compact-operator picture."""
import numpy as np

from rtp import (check_direct_limit_identity, compacts_iso_check,
                 connecting_map, level_algebra, level_module,
                 random_module_family, validate_module_family)

rng = np.random.default_rng(2024)
F = random_module_family(rng, n_indices=4, exceptional=(0,))
print("family valid:", validate_module_family(F).passed)

for S in [(0, 1), (0, 1, 2), (0, 1, 2, 3)]:
    La = level_algebra(F.base, S)
    Lx = level_module(F, S)
    print(f"S={S}: algebra blocks {La.algebra.blocks}, module dim {Lx.cdim}")

iota, rep = connecting_map(F, (0, 1), (0, 1, 2, 3), rng=rng)
print("connecting map isometric:", rep.passed,
      f"(max defect {rep.max_defect():.2e})")

i1, _ = connecting_map(F, (0, 1), (0, 1, 2), rng=rng)
i2, _ = connecting_map(F, (0, 1, 2), (0, 1, 2, 3), rng=rng)
print("functorial composition defect:", float(np.abs(i2 @ i1 - iota).max()))

print("direct limit identity:",
      check_direct_limit_identity(F, (0, 1), (0, 1, 2)).passed)
print("compacts isomorphism:",
      compacts_iso_check(F, (0, 1), (0, 1, 2), rng=rng).passed)
