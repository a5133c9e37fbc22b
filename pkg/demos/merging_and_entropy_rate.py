"""
Redundant states and entropy rates
==================================

Clones a state of a random generator so two states share their future, shows
that merging recovers the original size without changing any word
probability, then compares block-entropy estimates of the entropy rate with
the exact value for a unifilar generator.
"""

import numpy as np

from hmmq import Generator, merge_equivalent_states
from hmmq.generators import random_generator
from hmmq.hmm import block_distribution, entropy_rate_estimate, entropy_rate_unifilar

rng = np.random.default_rng(4)
base = random_generator(rng, 3, 2, "unifilar")
t = base.tensor()

# split state 0 into two copies with identical outgoing edges
big = np.zeros((2, 4, 4))
big[:, :3, :3] = t
big[:, :3, 3] = t[:, :, 0]
big[:, 3, :] = 0.4 * big[:, 0, :]
big[:, 0, :] *= 0.6
cloned = Generator.from_tensor(big)
merged = merge_equivalent_states(cloned)
print(f"states: cloned {cloned.n_states}, merged {merged.n_states}")
for L in (1, 3, 5):
    gap = np.max(np.abs(block_distribution(cloned, L) - block_distribution(merged, L)))
    print(f"L={L}: word probability change {gap:.1e}")

exact = entropy_rate_unifilar(base)
for L in (1, 2, 4, 8, 12):
    print(f"H(L) - H(L-1) at L={L:2}: {entropy_rate_estimate(base, L):.6f}  (exact {exact:.6f})")
