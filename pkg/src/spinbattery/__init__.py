"""Exact-numerics simulator for spin-chain quantum batteries."""

__version__ = "0.1.0"
