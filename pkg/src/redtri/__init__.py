"""Reducing triangulations: surfaces, walk reduction, and harmonic drawings."""

__version__ = "0.1.0"
