"""quality_service: trainable source-text quality scoring over HTTP."""

__version__ = "0.1.0"
