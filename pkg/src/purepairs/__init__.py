"""Pure pairs, congestion and blockade machinery as executable, checkable algorithms."""

__version__ = "0.1.0"
