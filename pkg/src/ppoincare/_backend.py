"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernels when it
is missing or when PPOINCARE_PURE is set in the environment (useful for
benchmarking and for running straight from a source tree).
"""

import os

if os.environ.get("PPOINCARE_PURE"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
