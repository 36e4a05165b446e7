"""Backend selection for the hot kernels.

The compiled Cython extension is preferred when importable; the pure-numpy
reference is the fallback.  Both produce bit-identical results.  Set
PSEUDOVIEW_FORCE_NUMPY=1 to force the numpy backend (useful for benchmarking
and for debugging without a compiler).
"""

from __future__ import annotations

import os

from . import reference

if os.environ.get("PSEUDOVIEW_FORCE_NUMPY") == "1":
    _impl = reference
    BACKEND = "numpy"
else:
    try:
        from . import _ext as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = reference
        BACKEND = "numpy"

scatter_splats = _impl.scatter_splats
redblack_sweep = _impl.redblack_sweep

__all__ = ["BACKEND", "scatter_splats", "redblack_sweep", "reference"]
