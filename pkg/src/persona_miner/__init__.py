"""Style clustering and designer-path mining for tile-based room editing sessions."""

__version__ = "0.1.0"
