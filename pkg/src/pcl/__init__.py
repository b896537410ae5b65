"""Projective configurations lab: exact and numerical checks of incidence
theorems and the dynamical systems built from them."""

__version__ = "0.1.0"
