"""Backend selection for the tridiagonal kernels.

The compiled extension ``pstchain._ckernels`` is used when it imports; the
pure-Python module ``pstchain._kernels_py`` is the fallback.  Setting the
environment variable ``PSTCHAIN_BACKEND=python`` forces the fallback.
"""
import os

from . import _kernels_py


def _load(name=None):
    name = name or os.environ.get("PSTCHAIN_BACKEND", "auto")
    if name not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown PSTCHAIN_BACKEND {name!r}")
    if name == "python":
        return _kernels_py, "python"
    try:
        from . import _ckernels
    except ImportError:
        if name == "compiled":
            raise
        return _kernels_py, "python"
    return _ckernels, "compiled"


_impl, BACKEND = _load()

sturm_count = _impl.sturm_count
bisect_eigenvalues = _impl.bisect_eigenvalues
inverse_iteration = _impl.inverse_iteration
gershgorin = _impl.gershgorin


def get_backend(name):
    """Return the kernel module for ``name`` ('python' or 'compiled')."""
    return _load(name)[0]
