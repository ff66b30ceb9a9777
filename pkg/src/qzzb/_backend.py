"""Selects the kernel implementation at import time.

The compiled ``_kernels`` module is used when it was built; otherwise, or when
``QZZB_PURE_PYTHON`` is set to a non-empty value, the numpy fallback is used.
"""

import importlib
import os

from . import _kernels_py


def _load():
    if os.environ.get("QZZB_PURE_PYTHON"):
        return _kernels_py
    try:
        return importlib.import_module("qzzb._kernels")
    except ImportError:
        return _kernels_py


kernels = _load()
BACKEND = kernels.BACKEND


def available_backends():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    try:
        importlib.import_module("qzzb._kernels")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


def get_backend(name):
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("qzzb._kernels")
    raise ValueError(f"unknown kernel backend {name!r}")
