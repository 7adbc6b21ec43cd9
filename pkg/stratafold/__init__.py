"""Algebraic differential calculus, discrete exterior calculus and stratified quantum dynamics."""

__version__ = "0.1.0"
