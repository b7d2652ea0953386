"""Exact computations around Thoma characters of the infinite symmetric group."""

__version__ = "0.1.0"
