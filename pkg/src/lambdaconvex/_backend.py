"""Kernel selection: compiled extension if importable, else the pure-Python twin.

Set ``LAMBDACONVEX_PURE=1`` to force the fallback (used by the benchmark and
the kernel-equivalence tests).
"""

import os

from . import _kernels_py

if os.environ.get("LAMBDACONVEX_PURE", "") not in ("", "0"):
    kernels = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:  # extension not built
        kernels = _kernels_py
        COMPILED = False

pure = _kernels_py

__all__ = ["kernels", "pure", "COMPILED"]
