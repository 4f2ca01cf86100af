"""Forbidden sets of rational difference equations."""
__version__ = "0.1.0"
