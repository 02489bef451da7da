"""Cubical sets, exact couples and numeric curvature and level-set checks."""

__version__ = "0.1.0"
