"""Steklov eigenvalues of subgraphs of hyperbolic triangle-tiling graphs."""

__version__ = "0.1.0"
