"""Coherence of correspondence families: a coherent random family versus the
minimal counterexample where the primed projection has rank two."""
import json

import numpy as np

from rtp import (coherence_check, coherence_sufficient_check,
                 counterexample_family, random_corr_family,
                 validate_corr_family)

F = random_corr_family(np.random.default_rng(7), n_indices=3)
print("random family coherent:", coherence_check(F).passed)

C = counterexample_family()
print("counterexample passes compatibility:", validate_corr_family(C).passed)
print("counterexample passes coherence:", coherence_check(C).passed)

suff = coherence_sufficient_check(C)
print("sufficient-condition diagnosis:")
print(json.dumps(suff.extra["conditions"], indent=2))
# the failing condition is rank_one: p' = 1 in M2 has rank two, so the
# coherence identity alpha(p') = T_{x,x} cannot hold for any unit vector x
