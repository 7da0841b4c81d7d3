"""facegraph: subject connectivity graphs from per-face feature records."""

__version__ = "0.1.0"
