"""Exact Hochschild (co)homology, Connes operators and BV structures for
Koszul Artin-Schelter regular algebras and their Frobenius duals."""

__version__ = "0.1.0"
