"""Exact-arithmetic toolkit for ramification of branch and arboreal
extensions attached to rational maps on the projective line."""

__version__ = "0.1.0"
