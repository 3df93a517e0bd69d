"""Exact tools for orthogonal exponentials of planar self-affine measures."""

__version__ = "0.1.0"

from .exact import DomainError, Mat2, QVec2
from .zeros import DigitSet3

__all__ = ["DomainError", "Mat2", "QVec2", "DigitSet3", "__version__"]
