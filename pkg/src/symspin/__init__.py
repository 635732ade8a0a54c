"""Exact computations with higher symplectic spinors.

Polynomial spinors, spinor-valued forms, the E^{ij} decomposition, the
curvature operator on Ricci-type data and a polynomial Fedosov model, all
over the Gaussian rationals.
"""

from .scalars import I, ONE, ZERO, Scalar

__version__ = "0.1.0"

__all__ = ["Scalar", "ZERO", "ONE", "I", "__version__"]
