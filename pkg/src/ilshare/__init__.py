"""Exact counts and asymptotic shares of grammar-defined classes of closed IL formulas."""

__version__ = "0.1.0"
