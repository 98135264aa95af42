"""Superselection, reference frames and dual entanglement of two particles."""

__version__ = "0.1.0"
