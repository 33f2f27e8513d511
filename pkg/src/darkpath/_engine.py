"""Backend selection for the propagation kernels.

Imports the compiled Cython kernels when available, otherwise the numpy
fallback.  Set DARKPATH_BACKEND=python or DARKPATH_BACKEND=compiled to force
a choice (forcing `compiled` raises if the extension is missing, rather than
silently benchmarking the wrong thing).
"""

from __future__ import annotations

import os

_choice = os.environ.get("DARKPATH_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "compiled", "python"):
    raise ImportError(f"DARKPATH_BACKEND must be auto/compiled/python, got {_choice!r}")

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _kernels as _impl
    except ImportError:
        if _choice == "compiled":
            raise ImportError("DARKPATH_BACKEND=compiled but the extension is not built")
if _impl is None:
    from . import _kernels_py as _impl

BACKEND = _impl.BACKEND_NAME
expi_herm = _impl.expi_herm
chain = _impl.chain
chain_states = _impl.chain_states
chain_prefix = _impl.chain_prefix
lindblad_run = _impl.lindblad_run


def backend_name():
    """Name of the kernel backend in use: 'compiled' or 'python'."""
    return BACKEND
