"""Exact verification toolkit for mod p (phi, Gamma)-modules, psi-limits and Hecke kernels."""

from .ffield import GF, Field, FqElem, conway_polynomial, frobenius, solve_alpha
from .padic import CharacterData, PadicScalar, binom_padic, mu_char, omega_char, ratio_to_padic
from .series import CharSeries, f_gamma, gamma_subst, padic_pow, phi, psi, psi_section

__version__ = "0.1.0"
