"""Shannon and von Neumann entropies in bits."""

from __future__ import annotations

import numpy as np

from .errors import SpectrumError

#: probabilities below this are treated as exact zeros (0 log 0 = 0)
PROB_FLOOR = 1e-15
#: eigenvalues below this are dropped from von Neumann entropies
EIG_FLOOR = 1e-12
#: most negative eigenvalue tolerated in a PSD matrix
NEG_EIG_TOL = 1e-9


def shannon_entropy(p) -> float:
    """Entropy in bits of a (possibly multi-dimensional) probability table."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > PROB_FLOOR]
    return float(-(p * np.log2(p)).sum())


def spectrum(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) of a Hermitian PSD matrix.

    Diagonal input skips the eigensolver. Raises SpectrumError when an
    eigenvalue is below ``-NEG_EIG_TOL``.
    """
    m = np.asarray(matrix)
    if m.size == 0:
        return np.zeros(0)
    if np.count_nonzero(m - np.diag(np.diagonal(m))) == 0:
        w = np.sort(np.real(np.diagonal(m)))
    else:
        w = np.linalg.eigvalsh(m)
    if w[0] < -NEG_EIG_TOL:
        raise SpectrumError(f"negative eigenvalue {w[0]:.3e}")
    return w


def entropy_of_spectrum(eigenvalues) -> float:
    w = np.asarray(eigenvalues, dtype=float)
    w = w[w >= EIG_FLOOR]
    return max(0.0, float(-(w * np.log2(w)).sum()))


def von_neumann_entropy(rho: np.ndarray) -> float:
    return entropy_of_spectrum(spectrum(rho))
