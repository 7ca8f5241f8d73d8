"""Numerical laboratory for the Whitham-Boussinesq systems in one and two dimensions."""

from .spectral import FieldPair, Grid
from .symbols import (DomainError, e_aux, k_symbol, m_double_prime, m_prime, m_symbol,
                      symbol_bounds_scan)

__version__ = "0.1.0"
