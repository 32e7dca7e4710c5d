"""Polaritons in a one-dimensional atom chain coupled to a nanofiber waveguide."""

__version__ = "0.1.0"
