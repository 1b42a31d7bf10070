"""Numpy fallback for the compiled kernels in ``_kernels.pyx``.

Same contracts, same integer accumulation: results are bitwise identical to
the compiled backend for identical inputs.
"""

from __future__ import annotations

import numpy as np


def outcome_counts(u, t1, t2, t3):
    """Histogram uniforms against the cumulative thresholds (t1, t2, t3)."""
    thresholds = np.array([t1, t2, t3], dtype=np.float64)
    idx = np.searchsorted(thresholds, u, side="right")
    return np.bincount(idx, minlength=4).astype(np.int64)


def piecewise_signs(breakpoints, first_sign, thetas):
    """Evaluate an alternating-sign step function at angles in [0, pi)."""
    idx = np.searchsorted(breakpoints, thetas, side="right")
    return np.where(idx & 1, np.int8(-first_sign), np.int8(first_sign))


def indexed_sign_sum(u, cum_weights, atom_signs):
    """Sum atom_signs[idx(u_i)] where idx is bisect-right into cum_weights."""
    idx = np.searchsorted(cum_weights, u, side="right")
    np.minimum(idx, len(cum_weights) - 1, out=idx)
    return int(atom_signs[idx].sum(dtype=np.int64))
