"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module is used. Set ``KNEADLAB_BACKEND=python`` to
force the fallback.
"""
import os

from . import _pykernels

kernels = _pykernels
BACKEND = "python"

if os.environ.get("KNEADLAB_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        kernels = _ckernels
        BACKEND = "cython"

__all__ = ["kernels", "BACKEND"]
