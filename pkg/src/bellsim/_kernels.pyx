# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for outcome sampling and piecewise-sign evaluation.

All three kernels accumulate integers from pre-drawn uniforms, so their
results are bitwise identical to the numpy fallback in ``_kernels_py``.
"""

import numpy as np


def outcome_counts(const double[::1] u, double t1, double t2, double t3):
    """Histogram uniforms against the cumulative thresholds (t1, t2, t3).

    Bins are [0, t1), [t1, t2), [t2, t3), [t3, 1); returns int64 counts.
    """
    cdef Py_ssize_t i, n = u.shape[0]
    cdef long long c0 = 0, c1 = 0, c2 = 0, c3 = 0
    cdef double x
    for i in range(n):
        x = u[i]
        if x < t1:
            c0 += 1
        elif x < t2:
            c1 += 1
        elif x < t3:
            c2 += 1
        else:
            c3 += 1
    return np.array([c0, c1, c2, c3], dtype=np.int64)


def piecewise_signs(const double[::1] breakpoints, int first_sign,
                    const double[::1] thetas):
    """Evaluate an alternating-sign step function at angles in [0, pi).

    Interval k is [breakpoints[k-1], breakpoints[k]) and carries sign
    first_sign * (-1)**k, i.e. bisect-right parity.  Returns int8 signs.
    """
    cdef Py_ssize_t i, lo, hi, mid
    cdef Py_ssize_t n = thetas.shape[0], nb = breakpoints.shape[0]
    out = np.empty(n, dtype=np.int8)
    cdef signed char[::1] ov = out
    cdef signed char pos = <signed char> first_sign
    cdef signed char neg = <signed char> (-first_sign)
    cdef double th
    for i in range(n):
        th = thetas[i]
        lo = 0
        hi = nb
        while lo < hi:
            mid = (lo + hi) >> 1
            if breakpoints[mid] <= th:
                lo = mid + 1
            else:
                hi = mid
        ov[i] = pos if (lo & 1) == 0 else neg
    return out


def indexed_sign_sum(const double[::1] u, const double[::1] cum_weights,
                     const signed char[::1] atom_signs):
    """Sum atom_signs[idx(u_i)] where idx is bisect-right into cum_weights.

    cum_weights must be non-decreasing with final entry 1.0; draws that land
    past the end (u == 1 never occurs, but rounding can) clamp to the last
    atom.  Returns a Python int.
    """
    cdef Py_ssize_t i, lo, hi, mid
    cdef Py_ssize_t n = u.shape[0], k = cum_weights.shape[0]
    cdef long long total = 0
    cdef double x
    for i in range(n):
        x = u[i]
        lo = 0
        hi = k
        while lo < hi:
            mid = (lo + hi) >> 1
            if cum_weights[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        if lo >= k:
            lo = k - 1
        total += atom_signs[lo]
    return total
