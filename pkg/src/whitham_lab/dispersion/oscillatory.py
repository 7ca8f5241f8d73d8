"""Frequency-localised oscillatory integrals of the linear water-wave flow.

For a dyadic ``lam > 1`` the kernel of ``exp(i t m(D)) P_lam`` is

    I(x) = int exp(i x.xi + i t m(xi)) beta(|xi| / lam) d xi .

After rescaling ``xi = lam s`` the 1d kernel is the real integral

    I(x) = 2 lam int_{1/2}^{2} cos(lam x s + t m(lam s)) beta(s) ds

and the 2d kernel depends on ``r = |x|`` only:

    I(r) = 2 pi lam^2 int_{1/2}^{2} exp(i t m(lam s)) J0(lam r s) s beta(s) ds .

Note that with this normalisation the propagator acts as convolution with
``I / (2 pi)^d``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..spectral import Grid, beta
from ..symbols import m_prime, m_symbol
from .bessel import bessel_j0
from .quadrature import AccuracyError, gauss_kronrod

_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)
BETA_MASS = 0.75  # int beta = (1/2) int_0^2 chi = 3/4


@dataclass(frozen=True)
class OscIntegralSpec:
    """One kernel evaluation; `x` is the signed point in 1d and ``|x|`` in 2d.

    `tol` is relative to the trivial bound ``lam^d * int beta``.
    """

    dim: int
    lam: float
    t: float
    x: float
    tol: float = 1e-10

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not self.lam > 1:
            raise ValueError("lam must exceed 1")
        if not self.t > 0:
            raise ValueError("t must be positive")
        if not np.isfinite(self.x) or (self.dim == 2 and self.x < 0):
            raise ValueError("x must be finite (and a nonnegative radius in 2d)")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class OscValue:
    value: complex
    error: float
    stationary: float = None


def trivial_bound(dim, lam):
    """``|I| <= lam^d`` times the (weighted) beta mass."""
    if dim == 1:
        return 2.0 * lam * BETA_MASS
    return 2.0 * np.pi * lam**2 * radial_beta_mass()


_RADIAL_MASS = []


def radial_beta_mass():
    """``int s beta(s) ds`` over ``[1/2, 2]``."""
    if not _RADIAL_MASS:
        res = gauss_kronrod(lambda s: s * beta(s), np.linspace(0.5, 2.0, 9), 1e-15)
        _RADIAL_MASS.append(float(res.value))
    return _RADIAL_MASS[0]


def stationary_point(lam, speed, iterations=60):
    """Root ``s0`` in ``[1/2, 2]`` of ``m'(lam s) = speed``, or ``None``.

    ``m'`` is strictly decreasing, so bisection is safe.
    """
    lo, hi = 0.5, 2.0
    if not (m_prime(lam * hi) < speed < m_prime(lam * lo)):
        return None
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if m_prime(lam * mid) > speed:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def window_radius(lam, t):
    """Stationary window ``delta = t^{-1/2} lam^{-1/4}``."""
    return t**-0.5 * lam**-0.25


def _breakpoints(lam, t, speed, reach):
    # one panel per half oscillation of the phase, plus the stationary window
    variation = 1.5 * lam * (reach + t * m_prime(0.5 * lam))
    n = max(4, int(math.ceil(variation / np.pi)))
    pts = [np.linspace(0.5, 2.0, n + 1)]
    s0 = stationary_point(lam, speed)
    if s0 is not None:
        d = window_radius(lam, t)
        pts.append(np.clip([s0 - d, s0, s0 + d], 0.5, 2.0))
    return np.concatenate(pts), s0


def osc_integral_1d(spec):
    """Kernel value ``I(x)`` in 1d; returns an `OscValue` (real value)."""
    if spec.dim != 1:
        raise ValueError("osc_integral_1d needs a 1d spec")
    lam, t, x = spec.lam, spec.t, spec.x

    def f(s):
        return np.cos(lam * x * s + t * m_symbol(lam * s)) * beta(s)

    pts, s0 = _breakpoints(lam, t, -x / t, abs(x))
    try:
        res = gauss_kronrod(f, pts, spec.tol * BETA_MASS)
    except AccuracyError as exc:
        raise AccuracyError("1d kernel", 2 * lam * exc.value, 2 * lam * exc.error) from None
    return OscValue(2.0 * lam * float(np.real(res.value)), 2.0 * lam * res.error, s0)


def osc_integral_2d(spec):
    """Kernel value ``I(|x|)`` in 2d via the Bessel radial reduction."""
    if spec.dim != 2:
        raise ValueError("osc_integral_2d needs a 2d spec")
    lam, t, r = spec.lam, spec.t, spec.x

    def f(s):
        return np.exp(1j * t * m_symbol(lam * s)) * bessel_j0(lam * r * s) * s * beta(s)

    pts, s0 = _breakpoints(lam, t, r / t, r)
    scale = 2.0 * np.pi * lam**2
    try:
        res = gauss_kronrod(f, pts, spec.tol * radial_beta_mass())
    except AccuracyError as exc:
        raise AccuracyError("2d kernel", scale * exc.value, scale * exc.error) from None
    return OscValue(complex(scale * res.value), scale * res.error, s0)


def osc_integral(spec):
    return osc_integral_1d(spec) if spec.dim == 1 else osc_integral_2d(spec)


def osc_integral_2d_tensor(lam, t, r, n=512):
    """Direct tensor-product trapezoid quadrature of the 2d kernel at
    ``x = (r, 0)``, over ``[-2, 2]^2`` in rescaled frequency."""
    s = np.linspace(-2.0, 2.0, n, endpoint=False)
    h = 4.0 / n
    s1, s2 = np.meshgrid(s, s, indexing="ij")
    rho = np.hypot(s1, s2)
    phase = lam * r * s1 + t * m_symbol(lam * rho)
    return complex(lam**2 * h * h * np.sum(np.exp(1j * phase) * beta(rho)))


# ---------------------------------------------------------------------------
# sup-norm scan


@dataclass(frozen=True)
class SupSample:
    dim: int
    lam: float
    t: float
    sup: float
    argmax: float
    evaluations: int


def _abs_kernel(dim, lam, t, tol):
    def g(x):
        return abs(osc_integral(OscIntegralSpec(dim, lam, t, x, tol)).value)
    return g


def _golden_max(g, a, b, fa_b, iterations=40):
    """Maximise a unimodal `g` on ``[a, b]``; returns ``(x, g(x), calls)``."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    calls = 2
    for _ in range(iterations):
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
        calls += 1
        if b - a < 1e-10 * max(1.0, abs(a)):
            break
    best = max([(gc, c), (gd, d), fa_b], key=lambda p: p[0])
    return best[1], best[0], calls


def scan_points(dim, lam, t, density=1.0):
    """x-grid: dense on the stationary band, sparse elsewhere.

    Returns signed points in 1d (the stationary side is ``x < 0``) and radii
    in 2d.
    """
    c = t * lam**-0.5
    lo = 0.8 * t * m_prime(2.0 * lam)
    hi = 1.25 * t * m_prime(0.5 * lam)
    # |I| oscillates in x with period >= pi / (2 lam); resolve it 8 times over
    h = np.pi / (2.0 * lam) / (8.0 * density)
    dense = np.arange(lo, hi + h, h)
    n_sparse = int(math.ceil(64 * density))
    sparse = np.concatenate([np.linspace(0.05 * c, lo, n_sparse, endpoint=False),
                             np.geomspace(hi, 20.0 * c, n_sparse)])
    band = np.concatenate([dense, sparse])
    if dim == 1:
        pts = np.concatenate([-band, np.linspace(0.0, 20.0 * c, n_sparse)])
    else:
        pts = np.concatenate([band, np.linspace(0.0, 0.05 * c, 8, endpoint=False)])
    return np.sort(pts), h


def sup_norm_scan(dim, lam, t, tol=1e-9, density=1.0, refine=3):
    """``sup_x |I(x)|`` and its location, for ``t >= 10 lam^{-1/2}``."""
    if t < 10.0 * lam**-0.5 * (1 - 1e-12):
        raise ValueError(f"t = {t} outside the regime t >= 10 lam^(-1/2) = {10 * lam**-0.5:.4g}")
    pts, _ = scan_points(dim, lam, t, density)
    g = _abs_kernel(dim, lam, t, tol)
    vals = np.array([g(x) for x in pts])
    calls = pts.size
    best_x, best = float(pts[np.argmax(vals)]), float(vals.max())
    # refine around the largest few local maxima
    interior = np.flatnonzero((vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])) + 1
    order = interior[np.argsort(vals[interior])[::-1][:refine]]
    for i in order:
        x, v, n = _golden_max(g, pts[i - 1], pts[i + 1], (vals[i], pts[i]))
        calls += n
        if v > best:
            best, best_x = v, float(x)
    return SupSample(dim, float(lam), float(t), best, best_x, calls)


# ---------------------------------------------------------------------------
# exponent regression


@dataclass(frozen=True)
class DecayReport:
    """OLS fit ``log sup = c + a log lam + b log t``."""

    dim: int
    samples: tuple
    lam_exponent: float
    t_exponent: float
    intercept: float
    lam_ci: tuple
    t_ci: tuple
    residuals: np.ndarray = field(repr=False)

    @property
    def max_residual(self):
        return float(np.max(np.abs(self.residuals)))

    @property
    def constant_range(self):
        """Spread of ``sup / (lam^{3d/4} t^{-d/2})`` over the sweep."""
        d = self.dim
        c = [s.sup / (s.lam ** (0.75 * d) * s.t ** (-0.5 * d)) for s in self.samples]
        return float(min(c)), float(max(c))


def fit_decay_exponents(samples, confidence=0.95):
    samples = tuple(samples)
    if not samples:
        raise ValueError("no samples")
    dims = {s.dim for s in samples}
    if len(dims) != 1:
        raise ValueError("samples mix dimensions")
    lam = np.array([s.lam for s in samples])
    t = np.array([s.t for s in samples])
    if len(np.unique(lam)) < 4 or len(np.unique(t)) < 4:
        raise ValueError("need at least 4 distinct values of both lam and t")
    if np.any(t < 10.0 * lam**-0.5 * (1 - 1e-12)):
        raise ValueError("samples outside the regime t >= 10 lam^(-1/2)")
    y = np.log([s.sup for s in samples])
    design = np.column_stack([np.ones_like(y), np.log(lam), np.log(t)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 3:
        raise np.linalg.LinAlgError("rank-deficient design")
    resid = y - design @ coef
    dof = max(len(y) - 3, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    q = stats.t.ppf(0.5 + 0.5 * confidence, dof)
    se = np.sqrt(np.diag(cov))
    ci = [(float(coef[i] - q * se[i]), float(coef[i] + q * se[i])) for i in range(3)]
    return DecayReport(dim=dims.pop(), samples=samples, lam_exponent=float(coef[1]),
                       t_exponent=float(coef[2]), intercept=float(coef[0]),
                       lam_ci=ci[1], t_ci=ci[2], residuals=resid)


def decay_sweep(dim, lams, ts, tol=1e-9, density=1.0):
    samples = [sup_norm_scan(dim, lam, t, tol, density) for lam in lams for t in ts]
    return fit_decay_exponents(samples)


# ---------------------------------------------------------------------------
# direct propagation of a concentrated profile


@dataclass(frozen=True)
class FreeWaveRow:
    t: float
    sup: float
    kernel_bound: float
    boundary_mass: float


def delta_profile_spectrum(grid, width):
    """Spectrum (numpy FFT convention) of the periodised unit-mass Gaussian
    of standard deviation `width` centred at the origin."""
    xi2 = grid.abs_xi**2
    sign = (-1.0) ** (np.abs(grid.k_axis) % 2)
    if grid.dim == 2:
        sign = sign[:, None] * sign[None, :]
    # grid samples of f:  f_j = (2L)^{-d} sum_k fhat(xi_k) e^{i xi_k x_j}
    return np.exp(-0.5 * width**2 * xi2) * sign * (grid.n / (2 * grid.half_length)) ** grid.dim


def _propagated(grid, spectrum, t):
    from ..evolution import DiagonalState, linear_propagate
    zero = np.zeros_like(spectrum)
    state = linear_propagate(DiagonalState(grid, spectrum, zero), t)
    return grid.ifft(state.u_plus)


def free_wave_grid(dim, lam, t_max, oversample=8):
    """Torus large enough to hold the spreading packet until `t_max`."""
    reach = t_max * m_prime(0.5 * lam) + 40.0 / lam
    half = np.pi * 2 ** math.ceil(math.log2(max(2.0 * reach, np.pi) / np.pi))
    want = 2.0 * half * 2.0 * lam * oversample / np.pi
    n = 2 ** int(math.ceil(math.log2(want)))
    if dim == 2:
        n = min(n, 1024)
    return Grid(dim, half, n)


def free_wave_dispersive_check(dim, lam, t_list, grid=None, lam_max=None,
                               wrap_tolerance=1e-8, kernel=None):
    """Propagate ``P_lam f`` for a concentrated unit-mass ``f`` and record
    ``||S(t) P_lam f||_inf`` (``||f||_1 = 1``).

    `kernel` optionally maps ``t`` to ``sup |I|``; the Young bound is then
    ``sup |I| / (2 pi)^d``. Raises ``ValueError`` if the packet reaches the
    outer quarter of the torus.
    """
    from ..spectral import lp_symbol
    t_list = [float(t) for t in t_list]
    if grid is None:
        grid = free_wave_grid(dim, lam, max(t_list))
    width = 1.0 / (8.0 * (lam_max or lam))
    spec = delta_profile_spectrum(grid, width) * lp_symbol(grid, lam)
    x = grid.x if dim == 1 else np.hypot(*grid.x)
    outer = np.abs(x) > 0.75 * grid.half_length
    rows = []
    for t in t_list:
        u = _propagated(grid, spec, t)
        density = np.abs(u) ** 2
        frac = float(density[outer].sum() / density.sum())
        if frac > wrap_tolerance:
            raise ValueError(f"wrap-around at t = {t}: outer mass fraction {frac:.2e}")
        bound = np.nan if kernel is None else kernel(t) / (2 * np.pi) ** dim
        rows.append(FreeWaveRow(t, float(np.abs(u).max()), bound, frac))
    return rows
