"""Kernel backend selection.

The compiled extension is preferred when importable; set ``RANKDERIV_PURE=1``
to force the pure-Python twin (useful for benchmarking and debugging).
"""

import os

if os.environ.get("RANKDERIV_PURE"):
    from rankderiv import _kernels_py as kernels
else:
    try:
        from rankderiv import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from rankderiv import _kernels_py as kernels

BACKEND = kernels.BACKEND
