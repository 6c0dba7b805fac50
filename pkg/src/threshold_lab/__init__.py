"""Threshold behaviour of random clausal constraint satisfaction problems."""

__version__ = "0.1.0"
