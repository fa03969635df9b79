"""Kernel backend selection.

The compiled extension is used when importable. Set ``STREAMCDF_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("STREAMCDF_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

locate = _impl.locate
insert_many = _impl.insert_many
window_push = _impl.window_push


def available_backends():
    """Return ``{name: module}`` for every importable kernel backend."""
    backends = {"python": _pykernels}
    try:
        from . import _kernels

        backends["cython"] = _kernels
    except ImportError:
        pass
    return backends
