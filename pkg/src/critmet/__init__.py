"""Quantum Fisher information toolkit and a zoo of critical quantum sensors."""
__version__ = "0.1.0"
