"""Exact q-series fits, resultant elimination, and certified ball arithmetic
for linear forms in Jacobi theta-constants."""

__version__ = "0.1.0"
