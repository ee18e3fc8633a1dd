"""Finite-precision p-adic period rings and periods of split-toric 1-motives."""

__version__ = "0.1.0"
