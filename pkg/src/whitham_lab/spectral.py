"""Periodic pseudo-spectral machinery on ``[-L, L)^d``.

Spectral coefficients follow the unnormalised numpy FFT convention, so that
``f(x_j) = N^{-d} sum_k fhat_k exp(i xi_k . x_j)`` up to the phase shift of
the grid origin (which never enters a multiplier).

Odd symbols (derivatives, Riesz transforms, the 1d dispersion relation) are
evaluated on ``xi_odd``, a copy of the lattice whose Nyquist entries are set
to zero. The Nyquist mode is its own conjugate partner, and an odd symbol
there would break realness.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .symbols import k_symbol, japanese_bracket


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with `n` points per axis on ``[-L, L)^dim``."""

    dim: int
    half_length: float
    n: int

    def __post_init__(self):
        errors = []
        if self.dim not in (1, 2):
            errors.append(f"dim must be 1 or 2, got {self.dim}")
        if not (self.half_length > 0 and np.isfinite(self.half_length)):
            errors.append(f"half_length must be positive, got {self.half_length}")
        if self.n < 2 or self.n & (self.n - 1):
            errors.append(f"n must be a power of two, got {self.n}")
        if errors:
            raise ValueError("; ".join(errors))

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def spacing(self):
        return 2.0 * self.half_length / self.n

    @property
    def cell_volume(self):
        return self.spacing**self.dim

    @property
    def volume(self):
        return (2.0 * self.half_length) ** self.dim

    @cached_property
    def x_axis(self):
        return -self.half_length + self.spacing * np.arange(self.n)

    @cached_property
    def x(self):
        """Coordinates: ``(n,)`` in 1d, ``(2, n, n)`` in 2d (``ij`` indexing)."""
        if self.dim == 1:
            return self.x_axis
        return np.array(np.meshgrid(self.x_axis, self.x_axis, indexing="ij"))

    @cached_property
    def k_axis(self):
        """Integer mode numbers in FFT order; the Nyquist index is ``-n/2``."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).round().astype(int)

    @cached_property
    def xi_axis(self):
        return np.pi * self.k_axis / self.half_length

    @cached_property
    def xi_axis_odd(self):
        out = self.xi_axis.copy()
        out[self.n // 2] = 0.0
        return out

    def _lattice(self, axis):
        if self.dim == 1:
            return axis
        return np.array(np.meshgrid(axis, axis, indexing="ij"))

    @cached_property
    def xi(self):
        return self._lattice(self.xi_axis)

    @cached_property
    def xi_odd(self):
        return self._lattice(self.xi_axis_odd)

    @cached_property
    def abs_xi(self):
        return np.abs(self.xi) if self.dim == 1 else np.hypot(*self.xi)

    @cached_property
    def abs_xi_odd(self):
        return np.abs(self.xi_odd) if self.dim == 1 else np.hypot(*self.xi_odd)

    @cached_property
    def xi_max(self):
        return float(self.abs_xi.max())

    @cached_property
    def dealias_mask(self):
        """2/3-rule mask: keeps ``|k_j| <= (n - 1) // 3`` on every axis."""
        keep = np.abs(self.k_axis) <= (self.n - 1) // 3
        if self.dim == 1:
            return keep
        return keep[:, None] & keep[None, :]

    def fft(self, f):
        return np.fft.fftn(f, axes=self._axes(f))

    def ifft(self, fhat):
        return np.fft.ifftn(fhat, axes=self._axes(fhat))

    def _axes(self, a):
        return tuple(range(a.ndim - self.dim, a.ndim))

    def refine(self, factor=2):
        return Grid(self.dim, self.half_length, self.n * factor)


@dataclass(frozen=True)
class FieldPair:
    """Physical state ``(eta, v)``; `v` has shape ``(n,)`` in 1d, ``(2, n, n)`` in 2d."""

    grid: Grid
    eta: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        g = self.grid
        if self.eta.shape != g.shape:
            raise ValueError(f"eta has shape {self.eta.shape}, grid wants {g.shape}")
        vshape = g.shape if g.dim == 1 else (2,) + g.shape
        if self.v.shape != vshape:
            raise ValueError(f"v has shape {self.v.shape}, grid wants {vshape}")

    def scaled(self, c):
        return FieldPair(self.grid, c * self.eta, c * self.v)

    def __sub__(self, other):
        return FieldPair(self.grid, self.eta - other.eta, self.v - other.v)


# ---------------------------------------------------------------------------
# multipliers


def _hermitian_defect(grid, table):
    """max |sigma(-xi) - conj(sigma(xi))| over the lattice."""
    if np.ndim(table) == 0:
        return abs(np.imag(table))
    idx = (-grid.k_axis) % grid.n
    flipped = table
    for ax in range(table.ndim - grid.dim, table.ndim):
        flipped = np.take(flipped, idx, axis=ax)
    return float(np.max(np.abs(flipped - np.conj(table))))


def multiplier_table(grid, symbol, radial=True):
    """Evaluate `symbol` on the lattice.

    `symbol` is a scalar, an array of lattice values, or a callable. A
    callable receives ``|xi|`` when `radial` is true, else the lattice ``xi``
    (``(n,)`` or ``(2, n, n)``).
    """
    if callable(symbol):
        table = symbol(grid.abs_xi if radial else grid.xi)
    else:
        table = symbol
    table = np.asarray(table)
    if not np.all(np.isfinite(table)):
        bad = np.argwhere(~np.isfinite(np.broadcast_to(table, grid.shape)))[0]
        raise ValueError(f"symbol is not finite at lattice index {tuple(bad)}")
    return table


def apply_multiplier(grid, f, symbol, radial=True, spectral=False):
    """Return ``F^{-1}[symbol(xi) F f]``.

    With ``spectral=True`` `f` is already a spectral array and a spectral
    array is returned. Otherwise the result is real whenever `f` is real and
    the symbol table is Hermitian (``sigma(-xi) = conj sigma(xi)``).
    """
    table = multiplier_table(grid, symbol, radial)
    if spectral:
        return table * f
    out = grid.ifft(table * grid.fft(f))
    if np.isrealobj(f) and _hermitian_defect(grid, table) <= 1e-14 * max(1.0, np.max(np.abs(table))):
        return out.real
    return out


# ---------------------------------------------------------------------------
# Littlewood-Paley


def _g(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def chi(s):
    """Smooth even cutoff: 1 on ``|s| <= 1``, 0 on ``|s| >= 2``."""
    a = np.abs(np.asarray(s, dtype=float))
    num = _g(2.0 - a)
    out = num / (num + _g(a - 1.0))
    return float(out) if out.ndim == 0 else out


def beta(s):
    """Annular bump ``chi(s) - chi(2s)``, supported in ``1/2 <= |s| <= 2``."""
    s = np.asarray(s, dtype=float)
    return chi(s) - chi(2.0 * s)


def is_dyadic(lam):
    if lam < 1:
        return False
    e = np.log2(lam)
    return abs(e - round(e)) < 1e-12


def lp_symbol(grid, lam):
    if not is_dyadic(lam):
        raise ValueError(f"lam must be a dyadic number >= 1, got {lam}")
    if lam == 1:
        return chi(grid.abs_xi)
    return beta(grid.abs_xi / lam)


def lp_project(grid, f, lam, spectral=False):
    """Littlewood-Paley piece ``P_lam f``: ``chi(|xi|)`` at lam=1, ``beta(|xi|/lam)`` above."""
    return apply_multiplier(grid, f, lp_symbol(grid, lam), spectral=spectral)


def dyadic_range(lam_max):
    out, lam = [], 1
    while lam <= lam_max:
        out.append(lam)
        lam *= 2
    return out


# ---------------------------------------------------------------------------
# norms


def l2_norm(grid, f):
    """Trapezoidal L^2 norm on the grid."""
    return float(np.sqrt(grid.cell_volume * np.sum(np.abs(f) ** 2)))


def spectral_l2_norm(grid, fhat):
    return float(np.sqrt(grid.cell_volume / grid.n**grid.dim * np.sum(np.abs(fhat) ** 2)))


def sobolev_norm(grid, f, s, spectral=False):
    """``||<D>^s f||_{L^2}`` via Parseval; `f` may carry leading component axes."""
    fhat = f if spectral else grid.fft(f)
    w = japanese_bracket(grid.abs_xi) ** (2.0 * s)
    return float(np.sqrt(grid.cell_volume / grid.n**grid.dim * np.sum(w * np.abs(fhat) ** 2)))


def xs_norm(state, s=0.0):
    """``(||eta||_{H^s}^2 + ||K^{-1} v||_{H^s}^2)^{1/2}``, summed over velocity components."""
    g = state.grid
    kinv = 1.0 / k_symbol(g.abs_xi)
    eta_n = sobolev_norm(g, state.eta, s)
    v_n = sobolev_norm(g, kinv * g.fft(state.v), s, spectral=True)
    return float(np.hypot(eta_n, v_n))


def sup_norm(f):
    return float(np.max(np.abs(f)))


# ---------------------------------------------------------------------------
# 2d vector calculus


def _require_2d(grid):
    if grid.dim != 2:
        raise ValueError("operation needs a 2d grid")


def riesz_symbol(grid, j):
    _require_2d(grid)
    r = grid.abs_xi_odd
    out = np.zeros(grid.shape, dtype=complex)
    nz = r > 0
    out[nz] = 1j * grid.xi_odd[j][nz] / r[nz]
    return out


def riesz(grid, f, j):
    """Riesz transform ``R_j = d_j / |D|`` (zero on the mean mode)."""
    return apply_multiplier(grid, f, riesz_symbol(grid, j))


def gradient(grid, psi):
    """Spectral gradient of a scalar field; returns ``(2, n, n)`` (or ``(n,)`` in 1d)."""
    psihat = grid.fft(psi)
    if grid.dim == 1:
        return grid.ifft(1j * grid.xi_odd * psihat).real
    return grid.ifft(1j * grid.xi_odd * psihat[None]).real


def divergence(grid, v):
    _require_2d(grid)
    vhat = grid.fft(v)
    return grid.ifft(1j * np.sum(grid.xi_odd * vhat, axis=0)).real


def curl(grid, v):
    """Scalar curl ``d_1 v_2 - d_2 v_1``."""
    _require_2d(grid)
    vhat = grid.fft(v)
    c = 1j * (grid.xi_odd[0] * vhat[1] - grid.xi_odd[1] * vhat[0])
    return grid.ifft(c).real


def curl_spectral_norm(grid, v):
    _require_2d(grid)
    vhat = grid.fft(v)
    c = 1j * (grid.xi_odd[0] * vhat[1] - grid.xi_odd[1] * vhat[0])
    return spectral_l2_norm(grid, c)


def curl_free_project(grid, v):
    """Project each mode of `v` onto its wavevector; the mean mode is kept.

    Modes whose odd-lattice wavevector vanishes (the Nyquist lines) are
    dropped, so the output lies in the range of the spectral gradient.
    """
    _require_2d(grid)
    vhat = grid.fft(v)
    xo = grid.xi_odd
    r2 = grid.abs_xi_odd**2
    nz = r2 > 0
    dot = np.sum(xo * vhat, axis=0)
    coef = np.zeros_like(dot)
    coef[nz] = dot[nz] / r2[nz]
    out = xo * coef[None]
    out[:, 0, 0] = vhat[:, 0, 0]
    return grid.ifft(out).real


# ---------------------------------------------------------------------------


def brezis_gallouet_ratio(grid, f, s):
    """``||f||_inf / (1 + ||f||_{H^{d/2}} sqrt(log(2 + ||f||_{H^s})))`` for ``s > d/2``."""
    d = grid.dim
    if not s > d / 2:
        raise ValueError(f"need s > d/2 = {d / 2}, got {s}")
    fhat = grid.fft(f)
    num = sup_norm(f)
    den = 1.0 + sobolev_norm(grid, fhat, d / 2, spectral=True) * np.sqrt(
        np.log(2.0 + sobolev_norm(grid, fhat, s, spectral=True)))
    return float(num / den)


def random_bandlimited(grid, rng, k_max, amplitude=1.0, decay=0.0):
    """Real random field with modes ``|k_j| <= k_max`` and spectral weights ``<k>^-decay``."""
    shape = grid.shape
    coef = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    keep = np.abs(grid.k_axis) <= k_max
    if grid.dim == 2:
        keep = keep[:, None] & keep[None, :]
    coef = np.where(keep, coef * japanese_bracket(grid.abs_xi) ** -decay, 0.0)
    f = grid.ifft(coef).real
    return amplitude * f / max(sup_norm(f), 1e-300)


def interpolate(grid, f, fine):
    """Band-limited (zero-padded) interpolation of `f` onto the grid `fine`,
    which must share the domain and have at least as many points."""
    if fine.dim != grid.dim or fine.half_length != grid.half_length or fine.n < grid.n:
        raise ValueError("target grid must be a refinement of the same domain")
    fhat = grid.fft(f)
    out = np.zeros(fine.shape, dtype=complex)
    keep = np.abs(grid.k_axis) < grid.n // 2  # drop the unpaired Nyquist mode
    src = np.flatnonzero(keep)
    dst = np.asarray(grid.k_axis[keep]) % fine.n
    if grid.dim == 1:
        out[dst] = fhat[src]
    else:
        out[np.ix_(dst, dst)] = fhat[np.ix_(src, src)]
    return fine.ifft(out * (fine.n / grid.n) ** grid.dim).real
