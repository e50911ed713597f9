"""Dual-scan longitudinal 3D zone segmentation toolkit."""

__version__ = "0.1.0"
