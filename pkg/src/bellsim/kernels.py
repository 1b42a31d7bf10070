"""Kernel backend selection.

Imports the compiled extension when it was built, otherwise the numpy
fallback.  Both backends satisfy identical integer-exact contracts, so every
downstream result is bitwise independent of which one loaded.  Set the
environment variable ``BELLSIM_PURE_PYTHON=1`` to force the fallback (useful
for benchmarking and for debugging suspected extension issues).
"""

from __future__ import annotations

import os

if os.environ.get("BELLSIM_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "numpy"

outcome_counts = _impl.outcome_counts
piecewise_signs = _impl.piecewise_signs
indexed_sign_sum = _impl.indexed_sign_sum

__all__ = ["BACKEND", "outcome_counts", "piecewise_signs", "indexed_sign_sum"]
