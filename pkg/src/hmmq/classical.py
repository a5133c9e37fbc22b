"""Costs of the classical implementation, where each state is its own
perfectly distinguishable memory configuration.

Work is dimensionless, in units of ``k_B T ln 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import Boltzmann

from .errors import BoundViolationError
from .hmm import Generator
from .info import shannon_entropy

BOUND_TOL = 1e-6


@dataclass(frozen=True)
class ClassicalReport:
    D: float
    C: float
    W: float
    joint_dist: np.ndarray  # P(x, s') with shape (|X|, |S|)
    dissipation: float | None = None

    def to_dict(self) -> dict:
        out = {"D": self.D, "C": self.C, "W": self.W}
        if self.dissipation is not None:
            out["dissipation"] = self.dissipation
        return out


def joint_distribution(gen: Generator) -> np.ndarray:
    """``P(x, s') = sum_s pi(s) T[x][s', s]`` as a (|X|, |S|) array."""
    return np.stack([m @ gen.stationary for m in gen.matrices])


def classical_memory(gen: Generator) -> tuple[float, float]:
    """``(D, C)``: log2 of the state count and Shannon entropy of pi."""
    return float(np.log2(gen.n_states)), shannon_entropy(gen.stationary)


def classical_work(gen: Generator) -> float:
    """Asymptotic work per step, ``H(S) - H(S'X)``."""
    return shannon_entropy(gen.stationary) - shannon_entropy(joint_distribution(gen))


def work_mutual_information_form(joint: np.ndarray) -> float:
    """``I(S'; X) - H(X)`` from a joint table ``P(x, s')``."""
    h_x = shannon_entropy(joint.sum(axis=1))
    h_s = shannon_entropy(joint.sum(axis=0))
    h_xs = shannon_entropy(joint)
    return (h_x + h_s - h_xs) - h_x


def locality_dissipation(W: float, h_mu: float, tol: float = BOUND_TOL) -> float:
    """Work in excess of the information-processing bound ``-h_mu``.

    A negative excess beyond ``tol`` can only come from a numerical error
    upstream and raises BoundViolationError.
    """
    excess = W + h_mu
    if excess < -tol:
        raise BoundViolationError(f"W={W:.9g} lies below the bound -h_mu={-h_mu:.9g}")
    return excess


def to_joules(W: float, temperature: float) -> float:
    """Convert a work cost in units of ``k_B T ln 2`` to joules at ``temperature`` kelvin."""
    return W * Boltzmann * temperature * np.log(2.0)


def classical_report(gen: Generator, h_mu: float | None = None) -> ClassicalReport:
    D, C = classical_memory(gen)
    joint = joint_distribution(gen)
    W = C - shannon_entropy(joint)
    dis = locality_dissipation(W, h_mu) if h_mu is not None else None
    return ClassicalReport(D=D, C=C, W=W, joint_dist=joint, dissipation=dis)
