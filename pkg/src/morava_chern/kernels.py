"""Kernel dispatch: the compiled extension when it imports, else pure Python.

Set ``MORAVA_CHERN_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("MORAVA_CHERN_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

mul_terms = _impl.mul_terms
rref_mod_p = _impl.rref_mod_p
echelon_int = _impl.echelon_int

__all__ = ["BACKEND", "mul_terms", "rref_mod_p", "echelon_int"]
