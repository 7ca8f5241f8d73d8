"""Scalar evaluation of the water-wave multiplier symbols.

All functions are vectorised over numpy arrays and evaluate in float64:

    K(r)   = sqrt(tanh(r) / r)           (K(0) = 1)
    m(r)   = r K(r)
    m'(r)  = K/2 + sech^2(r) / (2K)
    m''(r) = -(4 r^2 K sech^2 + K^-3 (E sech^2)^2) / (4r)
    E(r)   = (e^{2r} - e^{-2r} - 4r) / (4r)

Small arguments (r < 1/2) go through power series so that nothing is
formed as a difference of nearly equal numbers.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

SERIES_SWITCH = 0.5


def _bernoulli(n):
    """Exact Bernoulli numbers B_0..B_n (Akiyama-Tanigawa)."""
    out, a = [], []
    for m in range(n + 1):
        a.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return out


_N_TANH = 22
_B = _bernoulli(2 * _N_TANH)
# tanh(r)/r = sum_n c_n r^(2n),  c_n = 4^(n+1) (4^(n+1) - 1) B_{2n+2} / (2n+2)!
_TANH_OVER_R = np.array(
    [float(4 ** (n + 1) * (4 ** (n + 1) - 1) * _B[2 * n + 2] / factorial(2 * n + 2))
     for n in range(_N_TANH - 1)]
)
# E(r) = sum_n (2r)^(2n+2) / (2n+3)!
_E_SERIES = np.array([1.0 / factorial(2 * n + 3) for n in range(14)])


class DomainError(ValueError):
    """Argument outside the domain of a symbol."""


def _as_nonneg(r, strict=False):
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        raise DomainError("symbol argument must be finite")
    if strict and np.any(r <= 0):
        raise DomainError("argument must be strictly positive")
    if np.any(r < 0):
        raise DomainError("argument must be nonnegative")
    return r


def _even_series(coeffs, x2):
    return np.polynomial.polynomial.polyval(x2, coeffs)


def _sech2(r):
    q = np.exp(-2.0 * r)
    return 4.0 * q / (1.0 + q) ** 2


def _tanh_over_r(r):
    small = r < SERIES_SWITCH
    out = np.empty_like(r)
    out[small] = _even_series(_TANH_OVER_R, r[small] ** 2)
    rb = r[~small]
    out[~small] = np.tanh(rb) / rb
    return out


def _e_sech2_over_r(r):
    """E(r) sech^2(r) / r for r > 0, free of cancellation and underflow.

    E sech^2 = K^2 - sech^2, so this is also (K^2 - sech^2) / r.
    """
    small = r < SERIES_SWITCH
    out = np.empty_like(r)
    rs = r[small]
    # E / r^2 = 4 sum (2r)^(2n) / (2n+3)!
    out[small] = rs * 4.0 * _even_series(_E_SERIES, (2 * rs) ** 2) * _sech2(rs)
    rb = r[~small]
    q = np.exp(-2.0 * rb)
    # e^{2r} sech^2(r) = 4 / (1 + e^{-2r})^2
    out[~small] = (1.0 - q * q - 4.0 * rb * q) / rb / rb / (1.0 + q) ** 2
    return out


def _scalar_out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def k_symbol(r):
    """Whitham symbol ``K(r) = sqrt(tanh r / r)``, with ``K(0) = 1``."""
    r = _as_nonneg(r)
    rr = np.atleast_1d(r)
    return _scalar_out(np.sqrt(_tanh_over_r(rr)).reshape(r.shape), r)


def m_symbol(xi, d=1):
    """Dispersion relation ``m_d``.

    For ``d=1`` this is the odd function ``xi K(|xi|)``. For ``d=2`` the last
    axis of `xi` holds the two components and the result is ``|xi| K(|xi|)``.
    """
    xi = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(xi)):
        raise DomainError("symbol argument must be finite")
    if d == 1:
        return _scalar_out(xi * k_symbol(np.abs(xi)), xi)
    if d == 2:
        if xi.shape[-1] != 2:
            raise ValueError("2d wavenumbers need a trailing axis of length 2")
        r = np.hypot(xi[..., 0], xi[..., 1])
        return _scalar_out(r * k_symbol(r), r)
    raise ValueError(f"dimension must be 1 or 2, got {d}")


def m_prime(r):
    """First derivative ``m'(r) = K/2 + sech^2 / (2K)``; strictly positive."""
    r = _as_nonneg(r)
    rr = np.atleast_1d(r)
    k = np.sqrt(_tanh_over_r(rr))
    out = 0.5 * k + _sech2(rr) / (2.0 * k)
    return _scalar_out(out.reshape(r.shape), r)


def m_double_prime(r):
    """Second derivative of ``m``; negative for r > 0 and 0 at r = 0."""
    r = _as_nonneg(r)
    rr = np.atleast_1d(r)
    out = np.zeros_like(rr)
    pos = rr > 0
    rp = rr[pos]
    k = np.sqrt(_tanh_over_r(rp))
    w = _e_sech2_over_r(rp)
    # -(4 r^2 K sech^2 + (E sech^2)^2 / K^3) / (4r), with r factored out
    wk = w / k  # keeps w^2 / k^3 finite for huge r
    out[pos] = -rp * (k * _sech2(rp) + 0.25 * wk * wk / k)
    return _scalar_out(out.reshape(r.shape), r)


def e_aux(r):
    """Auxiliary ``E(r) = (e^{2r} - e^{-2r} - 4r) / (4r)`` for r > 0.

    Overflows to ``inf`` beyond r ~ 354, as the closed form does.
    """
    r = _as_nonneg(r, strict=True)
    rr = np.atleast_1d(r)
    out = np.empty_like(rr)
    small = rr < SERIES_SWITCH
    x = 2.0 * rr[small]
    out[small] = x * x * _even_series(_E_SERIES, x * x)
    rb = rr[~small]
    q = np.exp(-2.0 * rb)
    with np.errstate(over="ignore"):
        out[~small] = np.exp(2.0 * rb) * (1.0 - q * q - 4.0 * rb * q) / (4.0 * rb)
    return _scalar_out(out.reshape(r.shape), r)


def japanese_bracket(r):
    """``<r> = sqrt(1 + r^2)``."""
    return np.hypot(1.0, r)


@dataclass(frozen=True)
class SymbolPoint:
    r: float
    k: float
    m: float
    m1: float
    m2: float


def symbol_point(r):
    r = float(r)
    return SymbolPoint(r=r, k=k_symbol(r), m=float(m_symbol(r)), m1=m_prime(r),
                       m2=m_double_prime(r))


@dataclass(frozen=True)
class SymbolBoundsReport:
    """Equivalence ratios ``m' <r>^{1/2}`` and ``-m'' / (r <r>^{-5/2})`` on a grid."""

    grid: np.ndarray
    ratio_m1: np.ndarray
    ratio_m2: np.ndarray

    @property
    def m1_min(self):
        return float(self.ratio_m1.min())

    @property
    def m1_max(self):
        return float(self.ratio_m1.max())

    @property
    def m2_min(self):
        return float(self.ratio_m2.min())

    @property
    def m2_max(self):
        return float(self.ratio_m2.max())

    @property
    def m2_band_ratio(self):
        return self.m2_max / self.m2_min


def _m2_ratio(r):
    out = np.ones_like(r)  # -m''(r) / r -> 1 as r -> 0
    pos = r > 0
    rp = r[pos]
    out[pos] = -m_double_prime(rp) / (rp * japanese_bracket(rp) ** -2.5)
    return out


def symbol_bounds_scan(r_grid):
    """Scan the equivalences ``m' ~ <r>^{-1/2}`` and ``-m'' ~ r <r>^{-5/2}``."""
    r = np.asarray(r_grid, dtype=float).ravel()
    if r.size == 0:
        raise ValueError("empty grid")
    _as_nonneg(r, strict=True)
    if np.any(np.diff(r) <= 0):
        raise ValueError("grid must be strictly increasing")
    ratio_m1 = m_prime(r) * np.sqrt(japanese_bracket(r))
    ratio_m2 = _m2_ratio(r)
    if np.any(ratio_m1 <= 0) or np.any(ratio_m2 <= 0):
        raise ArithmeticError("non-positive equivalence ratio encountered")
    return SymbolBoundsReport(grid=r, ratio_m1=ratio_m1, ratio_m2=ratio_m2)
