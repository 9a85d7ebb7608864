"""Cough detection from bed-mounted accelerometer and audio recordings."""

__version__ = "0.1.0"
