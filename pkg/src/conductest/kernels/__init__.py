"""Hot numerical kernels with a compiled backend and a numpy fallback.

The compiled extension ``_ckernels`` is picked at import when it is built;
otherwise, or when ``CONDUCTEST_PURE_PYTHON`` is set to a non-empty value other
than ``0``, the numpy implementations in ``_pykernels`` are used. Both expose

``jacobi_eigh(a, tol, max_sweeps) -> (eigenvalues, eigenvectors, sweeps)``
    cyclic Jacobi on a dense symmetric matrix, ``sweeps == -1`` on failure.
``scan_min_conductance(adj_masks, degrees) -> (cut, min_volume, witness_mask)``
    exhaustive minimum-conductance cut scan with bitmask adjacency.
"""

import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

_force_python = os.environ.get("CONDUCTEST_PURE_PYTHON", "") not in ("", "0")

if compiled_backend is not None and not _force_python:
    _impl = compiled_backend
    BACKEND = "cython"
else:
    _impl = python_backend
    BACKEND = "python"

jacobi_eigh = _impl.jacobi_eigh
scan_min_conductance = _impl.scan_min_conductance


def backends():
    """Return the available backends as a ``{name: module}`` dict."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out


__all__ = ["BACKEND", "backends", "jacobi_eigh", "scan_min_conductance"]
