"""Integral-point censuses on elliptic curves, canonical heights, division
polynomials, code bounds, and the constant-optimization pipeline that turns
them into an explicit average-integral-point bound."""

__version__ = "0.1.0"
