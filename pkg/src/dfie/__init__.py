"""Spectral workbench for field integral equations on a penetrable unit sphere."""

__version__ = "0.1.0"
