"""Quantum-circuit-seeded Julia-set image datasets and their analysis."""

__version__ = "0.1.0"
