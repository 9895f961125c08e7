"""Finite-level tools for van Kampen presentations of fundamental groups."""

__version__ = "0.1.0"
