"""Query-aware multi-video keyframe summarization with web-image guidance."""

__version__ = "0.1.0"
