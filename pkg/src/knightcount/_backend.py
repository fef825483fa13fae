"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``KNIGHTCOUNT_BACKEND=python`` to force the fallback.
"""

import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _pykernels}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

if os.environ.get("KNIGHTCOUNT_BACKEND", "").lower() == "python" or _compiled is None:
    NAME = "python"
else:
    NAME = "cython"
kernels = BACKENDS[NAME]


def get(name=None):
    """Kernel module by name; ``None`` gives the import-time default."""
    if name is None:
        return kernels
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
