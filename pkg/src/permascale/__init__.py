"""Permanents, permanental means and scaling means of nonnegative matrices."""
__version__ = "0.1.0"
