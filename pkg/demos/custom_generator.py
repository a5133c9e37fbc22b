"""
Analysing a hand-written generator
==================================

A three-state generator given as a spec dictionary, run through the full
pipeline: validation, classification, redundant-state merging and both
implementations.
"""

import json

import numpy as np

from hmmq import GeneratorSpec, analyze, validate_spec
from hmmq.quantum import solve_overlaps

spec = GeneratorSpec.from_dict({
    "states": ["a", "b", "c"],
    "alphabet": ["0", "1"],
    "transitions": [
        {"from": "a", "to": "a", "symbol": "0", "p": 0.5},
        {"from": "a", "to": "b", "symbol": "1", "p": 0.5},
        {"from": "b", "to": "c", "symbol": "0", "p": 0.7},
        {"from": "b", "to": "b", "symbol": "1", "p": 0.3},
        {"from": "c", "to": "a", "symbol": "0", "p": 0.4},
        {"from": "c", "to": "b", "symbol": "1", "p": 0.6},
    ],
})
gen = validate_spec(spec)
print("stationary:", np.round(gen.stationary, 4))
print("unifilar:", gen.is_unifilar, " retrodictive:", gen.is_retrodictive)

# overlaps between memory states; nonzero exactly where two states can make the same transition
print(np.round(solve_overlaps(gen), 4))

bundle = analyze(gen, name="three-state")
print(json.dumps(bundle.to_dict()["checks"], indent=2))
print(f"C: classical {bundle.classical.C:.4f}, quantum {bundle.quantum.C:.4f}")
print(f"W: classical {bundle.classical.W:.4f}, quantum {bundle.quantum.W:.4f}")
print(f"h_mu = {bundle.h_mu:.4f} ({bundle.h_mu_method})")
