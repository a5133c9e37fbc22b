"""
Running the quantum implementation as a channel
===============================================

Embeds the memory states of the two-state source, builds the interaction
isometry and its Kraus operators, and checks that repeatedly applying the
channel reproduces the word statistics of the classical generator.
"""

import numpy as np

from hmmq.hmm import block_distribution, sample_trajectory
from hmmq.quantum import (
    apply_channel,
    build_isometry,
    channel_word_distribution,
    embed_states,
    solve_overlaps,
)
from hmmq.renewal import build_sns_A

gen = build_sns_A(0.5)
gram = solve_overlaps(gen)
states = embed_states(gram)
print("memory state vectors (columns):")
print(np.round(states, 4))

iso = build_isometry(gen, states)
kraus = iso.kraus_operators()
print(f"{len(kraus)} Kraus operators, completeness error "
      f"{np.max(np.abs(sum(k.conj().T @ k for k in kraus) - np.eye(iso.memory_dim))):.1e}")

# one step from the stationary memory state
rho = states @ np.diag(gen.stationary) @ states.conj().T
out = apply_channel(iso, rho)
d, nx = iso.memory_dim, iso.n_symbols
p_symbol = np.einsum("ixix->x", out.reshape(d, nx, d, nx)).real
print("P(x) after one step:", np.round(p_symbol, 6))

for L in (2, 4, 6):
    quantum = channel_word_distribution(iso, rho, L)
    classical = block_distribution(gen, L).ravel()
    print(f"L={L}: max |quantum - classical| = {np.max(np.abs(quantum - classical)):.1e}")

# the classical sampler for comparison
traj = sample_trajectory(gen, 200_000, seed=1)
print(f"sampled frequency of '1': {traj.count('1') / len(traj):.4f} (exact 0.25)")
