"""Exact arithmetic for Goldbach counting functions over squarefree moduli:
admissible residues, the modulo set, cosine spectra, counting and error
terms, densities, and scanners for the windowed slice-count hypotheses."""

from .modulus import ProblemInstance, SquareFreeModulus, primorial

__all__ = ["ProblemInstance", "SquareFreeModulus", "primorial"]
__version__ = "0.1.0"
