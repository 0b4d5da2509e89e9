"""Backend selection for the pointwise kernels.

The compiled extension ``llgspm._kernels`` is used when it imports; set
``LLGSPM_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

_FORCE_PY = os.environ.get("LLGSPM_PURE_PYTHON", "").strip() not in ("", "0")

compiled = None
if not _FORCE_PY:
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else _kernels_py
BACKEND = "cython" if compiled is not None else "python"

gs_row = _impl.gs_row
normalize = _impl.normalize
laplacian = _impl.laplacian


def use_backend(name):
    """Switch backend at runtime (``"cython"`` or ``"python"``); used by benchmarks."""
    global _impl, BACKEND, gs_row, normalize, laplacian
    if name == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        _impl = compiled
    elif name == "python":
        _impl = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    gs_row = _impl.gs_row
    normalize = _impl.normalize
    laplacian = _impl.laplacian
