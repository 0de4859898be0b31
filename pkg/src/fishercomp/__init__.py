"""Exact analysis of seller price competition in linear Fisher markets."""

__version__ = "0.1.0"
