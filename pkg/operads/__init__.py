"""Dual graphs, free modular operads and their algebras, computed exactly."""

__version__ = "0.3.0"
