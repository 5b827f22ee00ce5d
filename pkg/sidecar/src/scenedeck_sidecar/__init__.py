"""Embedding producer for scenedeck catalogs."""

__version__ = "0.1.0"
