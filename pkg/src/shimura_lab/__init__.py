"""Exact arithmetic, Fuchsian signatures, dual graphs and Hecke modules for Shimura curves."""

__version__ = "0.1.0"
