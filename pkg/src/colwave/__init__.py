"""
colwave: numerical wave front sets of generalized functions.

Modules
-------
mollify     mollifiers, scaled families (representatives), generalized constants
cones       closed cones, Minkowski sums, wave front set containers, pullbacks
spectral    grid evaluation, windowed Fourier transforms, decay fits
wavefront   per-direction decay estimates of Sigma_g and WF_g
operations  products, tensor products, pullbacks, characteristic sets, checkers
config      experiment configuration
scenarios   worked examples as assertion pipelines
cli         command-line interface
"""
from .mollify import (ConfigurationError, Mollifier, ScaledFamily, build_mollifier, family_B, family_U,
                      family_V, oscillating_constant, pv_complex_family, scaled_tensor, transport_solution)
from .cones import Cone, WaveFrontSet, DomainError, FavorablePositionError
from .spectral import CutoffWindow, DecayFit, ResolutionError, SampledField, fit_decay
from .wavefront import EstimatorParams, sigma_g, sigma_g_at, wavefront
from .operations import check_inclusion, char_set, product, pullback, tensor

__version__ = "0.1.0"
