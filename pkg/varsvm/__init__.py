"""varsvm: classical and variance-adjusted linear SVMs."""

__version__ = "0.1.0"
