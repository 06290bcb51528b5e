"""Numerical laboratory for degenerate Beltrami equations."""
__version__ = "0.1.0"
