"""Numerical toolkit for Schwarz-type bounds on harmonic maps into geodesics."""

__version__ = "0.1.0"
