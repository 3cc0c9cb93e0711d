"""Exact non-archimedean potential theory and dynamics on the Berkovich line."""

__version__ = "0.1.0"
