"""Oscillatory integrals, dispersive decay and localised Strichartz norms."""

from .bessel import bessel_j0
from .oscillatory import (BETA_MASS, DecayReport, FreeWaveRow, OscIntegralSpec, OscValue,
                          SupSample, decay_sweep, delta_profile_spectrum,
                          fit_decay_exponents, free_wave_dispersive_check, osc_integral,
                          osc_integral_1d, osc_integral_2d, osc_integral_2d_tensor,
                          radial_beta_mass, stationary_point, sup_norm_scan, trivial_bound,
                          window_radius)
from .quadrature import AccuracyError, QuadratureResult, gauss_kronrod
from .strichartz import (StrichartzResult, StrichartzSpec, strichartz_grid, strichartz_norm,
                         strichartz_scaling, strichartz_study)
