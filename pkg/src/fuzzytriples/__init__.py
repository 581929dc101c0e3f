"""Finite real spectral triples: Clifford modules, fuzzy spaces and fuzzy spheres."""

__version__ = "0.1.0"
