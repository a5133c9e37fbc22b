"""JSON encoding helpers: numbers are rounded to 12 significant digits."""

from __future__ import annotations

import numpy as np

SIG_DIGITS = 12


def sig(x: float, digits: int = SIG_DIGITS) -> float:
    return float(f"{float(x):.{digits}g}")


def encode_array(a) -> list:
    """Nested lists in row-major order; complex entries become ``[re, im]``."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag), initial=0.0) == 0.0:
            a = a.real
        else:
            return np.vectorize(lambda z: [sig(z.real), sig(z.imag)], otypes=[object])(a).tolist()
    return np.vectorize(sig, otypes=[float])(a).tolist() if a.size else a.tolist()


def decode_array(data) -> np.ndarray:
    """Inverse of :func:`encode_array` for matrices (a trailing axis of 2 marks complex)."""
    a = np.asarray(data, dtype=float)
    if a.ndim == 3 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a
