"""Savitzky-Golay smoothing for the recorded output traces.

Order-2 polynomial fit over a symmetric window; near the edges the window
shrinks to stay symmetric rather than padding, so polynomials up to order 2
pass through unchanged everywhere.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.signal import savgol_coeffs

logger = logging.getLogger(__name__)

POLY_ORDER = 2
MIN_WINDOW = 5


def window_samples(window: float, rate: float) -> int:
    """Window length in samples: at least MIN_WINDOW, odd, rounded up."""
    n = int(np.ceil(window * rate))
    n = max(n, MIN_WINDOW)
    if n % 2 == 0:
        n += 1
    return n


def smooth_trace(series, window: float, rate: float) -> np.ndarray:
    """Smooth a uniformly sampled series with a symmetric SG filter.

    Series shorter than the window are returned unfiltered (with a warning);
    callers treat that as a degraded-output event, not a fault.
    """
    y = np.asarray(series, dtype=float)
    n_win = window_samples(window, rate)
    n = len(y)
    if n < n_win:
        logger.warning(
            "series of %d samples is shorter than the %d-sample window; "
            "returned unfiltered",
            n,
            n_win,
        )
        return y.copy()

    half = n_win // 2
    out = np.empty_like(y)
    # Interior: one convolution with the standard coefficients.
    coeffs = savgol_coeffs(n_win, POLY_ORDER)
    out[half : n - half] = np.convolve(y, coeffs[::-1], mode="valid")
    # Edges: symmetric window shrunk to fit.
    for i in range(half):
        for idx in (i, n - 1 - i):
            h = min(idx, n - 1 - idx)
            if h == 0:
                out[idx] = y[idx]
                continue
            w = 2 * h + 1
            order = min(POLY_ORDER, w - 1)
            c = savgol_coeffs(w, order)
            out[idx] = float(np.dot(c[::-1], y[idx - h : idx + h + 1]))
    return out
