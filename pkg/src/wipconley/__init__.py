"""Conley index computations for multivalued maps on one-dimensional grids."""

__version__ = "0.1.0"
