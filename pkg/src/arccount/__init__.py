"""Counting arcs and curves on hyperbolic surfaces through explicit matrix groups."""

__version__ = "0.1.0"
