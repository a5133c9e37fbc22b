"""Discrete renewal processes and the Simple Nonunifilar Source (SNS).

A renewal process emits runs of ``0`` separated by single ``1`` symbols; the
run lengths are i.i.d. with wait-time distribution ``phi(n)``, n >= 0. For the
SNS, ``phi(n) = n p**(n-1) (1-p)**2``.

Infinite-state generators are truncated at ``N``: the tail mass beyond ``N``
is moved onto ``phi(N)``, so the truncated object is itself an exact renewal
process and all its generators agree with one another to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hmm import Generator, GeneratorSpec, validate_spec

TAIL_TOL = 1e-12
MAX_TRUNCATION = 10_000


def _check_p(p: float) -> None:
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p!r}")


def sns_wait_time(n, p: float):
    """``n p**(n-1) (1-p)**2``; vectorised over ``n``."""
    _check_p(p)
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise DomainError("wait time n must be non-negative")
    out = n_arr * np.power(p, np.maximum(n_arr - 1, 0).astype(float)) * (1 - p) ** 2
    return float(out) if np.ndim(out) == 0 else out


def _sns_survival_closed(n: np.ndarray, p: float) -> np.ndarray:
    # sum_{m >= n} m p^(m-1) q^2 = p^(n-1) (n q + p) for n >= 1
    q = 1 - p
    n = np.asarray(n, dtype=float)
    return np.where(n < 1, 1.0, np.power(p, n - 1) * (n * q + p))


def sns_truncation(p: float, tol: float = TAIL_TOL, cap: int = MAX_TRUNCATION) -> int:
    """Smallest ``N`` with ``sum_{n > N} Phi(n) < tol``, capped at ``cap``."""
    _check_p(p)
    n = np.arange(1, 4 * cap + 2)
    surv = _sns_survival_closed(n, p)
    # tail[k] = sum_{n > k} Phi(n) for k = 0, 1, ...
    tail = np.cumsum(surv[::-1])[::-1]
    below = np.nonzero(tail < tol)[0]
    if below.size == 0:
        return cap
    return int(min(max(below[0], 1), cap))


@dataclass(frozen=True, eq=False)
class RenewalFamily:
    """A truncated wait-time distribution ``phi[0..N]`` summing to one.

    ``tail_mass`` records the probability moved onto ``phi[N]`` by truncation.
    """

    phi: np.ndarray
    p: float | None = None
    tail_mass: float = 0.0

    @property
    def N(self) -> int:
        return len(self.phi) - 1

    @classmethod
    def sns(cls, p: float, N: int | None = None) -> RenewalFamily:
        _check_p(p)
        N = sns_truncation(p) if N is None else int(N)
        if N < 1:
            raise DomainError("SNS truncation needs N >= 1")
        phi = np.asarray(sns_wait_time(np.arange(N + 1), p), dtype=float)
        tail = float(_sns_survival_closed(N + 1, p))
        phi[N] += tail
        if not np.all(phi[1:] > 0):
            first = int(np.argmin(phi[1:] > 0)) + 1
            raise DomainError(
                f"wait-time probability underflows at n={first} for p={p}; use N < {first}"
            )
        return cls(phi=phi, p=p, tail_mass=tail)

    @classmethod
    def from_wait_times(cls, phi) -> RenewalFamily:
        """Finite-support wait-time table; trailing zeros are dropped."""
        phi = np.asarray(phi, dtype=float)
        if phi.ndim != 1 or np.any(phi < 0):
            raise DomainError("wait-time probabilities must be a non-negative vector")
        if abs(phi.sum() - 1.0) > TAIL_TOL:
            raise DomainError(f"wait-time probabilities sum to {phi.sum()!r}")
        last = np.nonzero(phi)[0][-1]
        return cls(phi=phi[: last + 1].copy())

    def survival(self) -> np.ndarray:
        """``Phi(n) = sum_{n' >= n} phi(n')`` for n = 0..N."""
        return np.cumsum(self.phi[::-1])[::-1]


def survival(fam: RenewalFamily, n: int) -> float:
    if n < 0:
        raise DomainError("n must be non-negative")
    surv = fam.survival()
    return float(surv[n]) if n <= fam.N else 0.0


def firing_rate(fam: RenewalFamily) -> float:
    """``mu = 1 / sum_n Phi(n)``, the long-run frequency of the symbol 1."""
    return float(1.0 / fam.survival().sum())


def _labels(n: int) -> tuple[str, ...]:
    return tuple(f"σ{k}" for k in range(n))


def build_sns_A(p: float) -> Generator:
    """Two-state non-unifilar SNS generator.

    Both states emit 0 and stay with probability ``p``; the first moves to the
    second emitting 0, and the second returns emitting 1, each with ``1 - p``.
    """
    _check_p(p)
    s0, s1 = "σ0", "σ1"
    return validate_spec(
        GeneratorSpec(
            (s0, s1),
            ("0", "1"),
            (
                (s0, s0, "0", p),
                (s0, s1, "0", 1 - p),
                (s1, s0, "1", 1 - p),
                (s1, s1, "0", p),
            ),
        )
    )


def predictive_generator(fam: RenewalFamily) -> Generator:
    """Unifilar generator whose state ``σn`` counts 0s since the last 1.

    From ``σn`` a 1 (back to ``σ0``) has probability ``phi(n) / Phi(n)`` and a
    0 (to ``σn+1``) has ``Phi(n+1) / Phi(n)``, giving occupation
    ``P(σn) = mu Phi(n)``.
    """
    phi, surv = fam.phi, fam.survival()
    labels = _labels(fam.N + 1)
    edges = []
    for n in range(fam.N + 1):
        if phi[n] > 0:
            edges.append((labels[n], labels[0], "1", phi[n] / surv[n]))
        if n < fam.N and surv[n + 1] > 0:
            edges.append((labels[n], labels[n + 1], "0", surv[n + 1] / surv[n]))
    return validate_spec(GeneratorSpec(labels, ("0", "1"), tuple(edges)))


def retrodictive_generator(fam: RenewalFamily) -> Generator:
    """Co-unifilar generator whose state ``σn`` counts 0s remaining before the next 1.

    ``σ0`` emits 1 and draws the next run length ``n`` into ``σn`` with
    probability ``phi(n)``; every other state emits 0 and counts down.
    """
    labels = _labels(fam.N + 1)
    edges = [(labels[0], labels[n], "1", float(fam.phi[n])) for n in np.nonzero(fam.phi)[0]]
    edges += [(labels[n], labels[n - 1], "0", 1.0) for n in range(1, fam.N + 1)]
    return validate_spec(GeneratorSpec(labels, ("0", "1"), tuple(edges)))


def build_sns_B(p: float, N: int | None = None) -> Generator:
    """Truncated SNS ε-machine (minimal predictive generator)."""
    return predictive_generator(RenewalFamily.sns(p, N))


def build_sns_C(p: float, N: int | None = None) -> Generator:
    """Truncated minimal retrodictive SNS generator."""
    return retrodictive_generator(RenewalFamily.sns(p, N))


def quantum_renewal_states(fam: RenewalFamily, N: int | None = None) -> np.ndarray:
    """Closed-form quantum memory states of the predictive renewal generator.

    Column ``n`` has components ``sqrt(phi(n' + n) / Phi(n))``, n' = 0..N-n.
    Passing ``N`` re-truncates an SNS family at that size.
    """
    if N is not None and int(N) != fam.N:
        if fam.p is None:
            raise DomainError(f"cannot re-truncate a tabulated family at N={N}")
        fam = RenewalFamily.sns(fam.p, int(N))
    N = fam.N
    phi, surv = fam.phi, fam.survival()
    # hankel[k, n] = phi(k + n), zero beyond N
    k = np.arange(N + 1)
    idx = k[:, None] + k[None, :]
    hankel = np.where(idx <= N, phi[np.minimum(idx, N)], 0.0)
    return np.sqrt(hankel / surv[None, :])
