"""Planar spinning particle obeying a third-order equation of motion."""

from .minkowski import DEFAULT, Convention

__version__ = "0.1.0"

__all__ = ["Convention", "DEFAULT", "__version__"]
