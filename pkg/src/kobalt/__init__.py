"""kobalt: Kobayashi-metric geometry of matrix balls, CH^2 and flat surfaces."""

__version__ = "0.1.0"
