"""Bifurcation analysis of the polygonal (n+1)-vortex and filament ring."""

__version__ = "0.1.0"
