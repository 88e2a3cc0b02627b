"""Exact symbolic toolkit for a graded R-matrix and its current algebra."""

__version__ = "0.1.0"
