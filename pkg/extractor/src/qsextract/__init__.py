"""Offline corpus extraction: videos and web images in, querysum corpus out."""

__version__ = "0.1.0"
