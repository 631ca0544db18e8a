"""Computational toolkit for the lower central and derived series of
surface braid groups."""

__version__ = "0.1.0"
