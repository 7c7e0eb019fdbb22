"""Blow up and blur: atom structures, term algebras, representations and certificates."""

__version__ = "0.1.0"
