"""Classical and quantum implementations of hidden Markov model generators.

Memory costs (dimension and entropy of the stationary memory state) and
asymptotic work costs are computed for both implementations of any
edge-emitting generator, including non-unifilar ones.
"""

from .analysis import AnalysisBundle, analyze, sns_costs, sweep, table1, verify
from .classical import (
    ClassicalReport,
    classical_memory,
    classical_report,
    classical_work,
    joint_distribution,
    locality_dissipation,
)
from .errors import *  # noqa: F401,F403
from .hmm import (
    Generator,
    GeneratorSpec,
    block_distribution,
    dump_spec,
    entropy_rate_estimate,
    entropy_rate_unifilar,
    is_retrodictive,
    is_unifilar,
    load_spec,
    merge_equivalent_states,
    sample_trajectory,
    validate_spec,
    word_probability,
)
from .quantum import (
    EncodingScheme,
    Isometry,
    QuantumReport,
    apply_channel,
    build_isometry,
    embed_states,
    quantum_memory,
    quantum_report,
    quantum_work,
    solve_overlaps,
)
from .renewal import (
    RenewalFamily,
    build_sns_A,
    build_sns_B,
    build_sns_C,
    firing_rate,
    quantum_renewal_states,
    sns_wait_time,
    survival,
)

__version__ = "0.1.0"
