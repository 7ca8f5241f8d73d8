"""Discrete space-time norms ``||exp(-i t m(D)) P_lam f||_{L^q_t L^r_x}``."""

import math
from dataclasses import dataclass

import numpy as np

from ..spectral import Grid, is_dyadic, lp_symbol
from ..symbols import m_prime
from .oscillatory import _propagated, delta_profile_spectrum


@dataclass(frozen=True)
class StrichartzSpec:
    """Exponents with ``2/q = (d/2)(1 - 2/r)``; ``r = inf`` is allowed."""

    dim: int
    q: float
    r: float
    lam: float
    T: float
    n_times: int = 257

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not (self.q >= 2 and self.r >= 2):
            raise ValueError("need q >= 2 and r >= 2")
        lhs = 2.0 / self.q
        rhs = 0.5 * self.dim * (1.0 - (0.0 if math.isinf(self.r) else 2.0 / self.r))
        if abs(lhs - rhs) > 1e-12:
            raise ValueError(f"(q, r) = ({self.q}, {self.r}) is not admissible in {self.dim}d")
        if not (self.lam > 1 and is_dyadic(self.lam)):
            raise ValueError("lam must be dyadic and > 1")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.n_times < 3:
            raise ValueError("need at least 3 time samples")

    @property
    def loss_exponent(self):
        """Predicted ``(3d/8)(1 - 2/r)``."""
        return 0.375 * self.dim * (1.0 - (0.0 if math.isinf(self.r) else 2.0 / self.r))


@dataclass(frozen=True)
class StrichartzResult:
    spec: StrichartzSpec
    norm: float
    refined_norm: float
    data_l2: float

    @property
    def refinement_change(self):
        return abs(self.refined_norm - self.norm) / self.norm

    @property
    def ratio(self):
        """``norm / (lam^loss ||P_lam f||_2)``."""
        return self.norm / (self.spec.lam**self.spec.loss_exponent * self.data_l2)


def _space_norm(grid, u, r):
    if math.isinf(r):
        return float(np.abs(u).max())
    return float((np.sum(np.abs(u) ** r) * grid.cell_volume) ** (1.0 / r))


def _time_norm(values, T, q):
    w = np.full(values.size, T / (values.size - 1))
    w[[0, -1]] *= 0.5
    return float(np.sum(w * values**q) ** (1.0 / q))


def _norm_on(spec, grid, spectrum, n_times):
    times = np.linspace(0.0, spec.T, n_times)
    vals = np.array([_space_norm(grid, _propagated(grid, spectrum, t), spec.r) for t in times])
    return _time_norm(vals, spec.T, spec.q)


def strichartz_norm(spec, grid, f, spectral=False):
    """Trapezoid-in-time ``L^q`` of the grid ``L^r`` norms of the free
    evolution of ``P_lam f`` (``f`` real field, or its spectrum)."""
    if grid.dim != spec.dim:
        raise ValueError("grid and spec dimensions differ")
    fhat = np.asarray(f) if spectral else grid.fft(f)
    return _norm_on(spec, grid, fhat * lp_symbol(grid, spec.lam), spec.n_times)


def strichartz_study(spec, grid, f, spectral=False):
    """Norm, its value on a doubled time grid, and ``||P_lam f||_{L^2}``."""
    fhat = (np.asarray(f) if spectral else grid.fft(f)) * lp_symbol(grid, spec.lam)
    coarse = _norm_on(spec, grid, fhat, spec.n_times)
    fine = _norm_on(spec, grid, fhat, 2 * spec.n_times - 1)
    l2 = float(np.sqrt(np.sum(np.abs(fhat) ** 2) * grid.cell_volume) / math.sqrt(grid.n**grid.dim))
    return StrichartzResult(spec, coarse, fine, l2)


def strichartz_grid(dim, lam, T, r):
    """Torus holding the packet up to time `T`, resolving the ``L^r`` norm.

    ``L^inf`` is sampled 8 times finer than the band; finite ``L^r`` only
    needs the products of the band to be alias-free.
    """
    reach = T * m_prime(0.5 * lam) + 40.0 / lam
    half = np.pi * 2 ** math.ceil(math.log2(max(2.0 * reach, np.pi) / np.pi))
    wanted_nyquist = 16.0 * lam if math.isinf(r) else 2.0 * lam * max(2.0, r / 2.0)
    n = 2 ** int(math.ceil(math.log2(2.0 * half * wanted_nyquist / np.pi)))
    return Grid(dim, half, n)


def strichartz_scaling(dim, q, r, lams, T=2.0, n_times=257):
    """Concentrated-data study over `lams`; returns results and the fitted
    exponent of ``norm / ||P_lam f||_2`` in ``lam``."""
    results = []
    lam_max = max(lams)
    for lam in lams:
        spec = StrichartzSpec(dim, q, r, lam, T, n_times)
        grid = strichartz_grid(dim, lam, T, r)
        fhat = delta_profile_spectrum(grid, 1.0 / (8.0 * lam_max))
        results.append(strichartz_study(spec, grid, fhat, spectral=True))
    y = np.log([res.norm / res.data_l2 for res in results])
    slope = float(np.polyfit(np.log(lams), y, 1)[0])
    return results, slope
