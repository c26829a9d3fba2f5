"""Phonological networks and their null models."""

__version__ = "0.1.0"
