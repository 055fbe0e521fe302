"""Cognitive network reconstruction and analysis for annotated text corpora."""

__version__ = "0.1.0"
