"""Exact computations for Chern classes from algebraic Morava K-theory to Chow groups."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
