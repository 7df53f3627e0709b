"""Exact solving and strategy verification for Bodyguards and Presidents."""

__version__ = "0.1.0"
