"""Position proxies for relativistic wave packets."""

__version__ = "0.1.0"
