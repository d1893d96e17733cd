"""Exact-arithmetic toolkit: zeroness of polynomial grammars, equivalence
of register transducers with substitution, and reset-counter test cases."""

__version__ = "0.1.0"
