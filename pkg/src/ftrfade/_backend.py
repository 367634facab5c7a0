"""Kernel backend selection.

The compiled extension is used when it imports; setting
``FTRFADE_PURE_PYTHON=1`` forces the numpy implementation.
"""
import os

if os.environ.get("FTRFADE_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["BACKEND", "kernels"]
