"""Exact-arithmetic construction and verification of flexible polyhedra."""

__version__ = "0.1.0"
