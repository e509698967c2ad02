"""Exact symbolic engine for Grassmann-graded evolutionary super-systems."""

__version__ = "0.1.0"
