"""Cooperative multi-agent partial-order planning with partial, privacy-preserving views."""

__version__ = "0.1.0"
