"""Limit shapes, liquid regions and local kernels of random Young tableaux of dilated shape."""

__version__ = "0.1.0"
