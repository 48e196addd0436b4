"""Triply periodic zero mean curvature surfaces of Schwarz H type.

Maxfaces, their timelike null extensions and the assembled ZMC surfaces in
Lorentz-Minkowski space, plus the related Euclidean minimal families.
"""
__version__ = "0.1.0"

from .errors import TPZMCError  # noqa: E402
from .families import FAMILIES, family_spec  # noqa: E402

__all__ = ["FAMILIES", "TPZMCError", "family_spec", "__version__"]
