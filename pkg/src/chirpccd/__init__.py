"""Glottal source estimation by complex-cepstrum mixed-phase decomposition,
with a chirp (off-unit-circle) variant that tolerates asynchronous frames.
"""

from .ccd import MixedPhaseDecomposition, decompose_traditional, reconstruct
from .chirp import RadiusSearchResult, decompose_chirp, find_optimal_radius, radius_bounds
from .spectral import Cepstrum, SignalFrame, Spectrum, complex_cepstrum, inverse_complex_cepstrum

__all__ = [
    "Cepstrum",
    "MixedPhaseDecomposition",
    "RadiusSearchResult",
    "SignalFrame",
    "Spectrum",
    "complex_cepstrum",
    "decompose_chirp",
    "decompose_traditional",
    "find_optimal_radius",
    "inverse_complex_cepstrum",
    "radius_bounds",
    "reconstruct",
]

__version__ = "0.1.0"
