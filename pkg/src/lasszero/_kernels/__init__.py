"""Kernel backend selection: compiled extension with pure NumPy fallback.

The Cython extension is preferred when importable. Set
LASSZERO_PURE_PYTHON=1 to force the fallback (used by the tests and the
backend benchmark).
"""

from __future__ import annotations

import os

_force_pure = os.environ.get("LASSZERO_PURE_PYTHON", "") not in ("", "0")

if not _force_pure:
    try:
        from ._ckernels import best_subset, cd_fit, stepwise_search

        BACKEND_NAME = "compiled"
    except ImportError:
        from ._pykernels import best_subset, cd_fit, stepwise_search

        BACKEND_NAME = "pure"
else:
    from ._pykernels import best_subset, cd_fit, stepwise_search

    BACKEND_NAME = "pure"

__all__ = ["BACKEND_NAME", "best_subset", "cd_fit", "stepwise_search"]
