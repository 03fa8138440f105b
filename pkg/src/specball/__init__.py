"""Numerics for the spectral ball Omega_n and the symmetrized polydisk G_n."""

from .cmatrix import ComplexMatrix, JordanProfile, char_poly, jordan_build, jordan_profile, mobius
from .cpoly import Polynomial, SymCoeffs, newton_convert, roots, waring_coefficient
from .domains import GPoint, classify_matrix, classify_point, sigma
from .errors import SpecballError

__all__ = [
    "ComplexMatrix", "GPoint", "JordanProfile", "Polynomial", "SpecballError", "SymCoeffs",
    "char_poly", "classify_matrix", "classify_point", "jordan_build", "jordan_profile",
    "mobius", "newton_convert", "roots", "sigma", "waring_coefficient",
]
