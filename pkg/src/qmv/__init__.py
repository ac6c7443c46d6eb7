"""Exact motivic classes of quiver moduli over translation quivers."""

__version__ = "0.1.0"
