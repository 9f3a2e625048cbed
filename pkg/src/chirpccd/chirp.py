"""Chirp extension of the cepstral decomposition.

A circle of radius R is analysed by modulating the frame with R**(-n). The
integer circular delay n_d(R) = round(phi_R(pi) / pi) only changes when a
zero of the frame polynomial crosses the circle, so the widest run of
constant n_d over a radius grid marks the best-separated gap in the root
distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .ccd import MixedPhaseDecomposition, decompose_at_radius, modulate
from .errors import DegenerateSearch, InvalidArgument
from .spectral import (
    DELAY_CONFIDENCE,
    SignalFrame,
    analyze,
    default_fft_size,
    round_half_away,
    unwrap_phase,
)

DEFAULT_N_RADII = 60
BOUND_CONSTANT = 50.0 * np.pi / 17.0


@dataclass(frozen=True)
class RadiusSearchResult:
    radii: np.ndarray
    n_d: np.ndarray
    plateaus: list[tuple[int, int, int]]  # (start_idx, end_idx inclusive, n_d)
    optimal_radius: float
    bounds: tuple[float, float]
    degenerate: bool = False
    low_confidence: tuple[int, ...] = field(default=())

    @property
    def optimal_plateau(self) -> tuple[int, int, int]:
        for p in self.plateaus:
            if self.radii[p[0]] <= self.optimal_radius <= self.radii[p[1]]:
                return p
        raise LookupError("optimal radius is not inside any plateau")


def radius_bounds(length: int) -> tuple[float, float]:
    """(exp(-50 pi / 17 L), exp(+50 pi / 17 L)) for a frame of length L."""
    if length < 1:
        raise InvalidArgument("frame length must be positive")
    b = BOUND_CONSTANT / length
    return float(np.exp(-b)), float(np.exp(b))


def chirp_modulate(frame: SignalFrame, radius: float) -> SignalFrame:
    """x(n) * R**(-n) with n = 0 at the first sample of the frame."""
    if not radius > 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    return frame.with_samples(modulate(frame.samples, radius), origin=0)


def _delay(frame: SignalFrame, radius: float, fft_size: int) -> tuple[int, bool]:
    ph = unwrap_phase(analyze(chirp_modulate(frame, radius), fft_size))
    raw = ph.phi_at_pi / np.pi
    nd = int(round_half_away(raw))
    return nd, ph.low_confidence or abs(raw - nd) > DELAY_CONFIDENCE


def circular_delay(frame: SignalFrame, radius: float, fft_size: int | None = None) -> int:
    """n_d(R): samples of circular delay of the modulated frame."""
    if fft_size is None:
        fft_size = default_fft_size(frame.length)
    return _delay(frame, radius, fft_size)[0]


def find_plateaus(values) -> list[tuple[int, int, int]]:
    """Maximal runs of equal values as (start, end, value), end inclusive."""
    values = np.asarray(values)
    edges = np.flatnonzero(np.diff(values) != 0) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges - 1, [len(values) - 1]))
    return [(int(s), int(e), int(values[s])) for s, e in zip(starts, ends)]


def find_optimal_radius(
    frame: SignalFrame,
    n_radii: int = DEFAULT_N_RADII,
    fft_size: int | None = None,
    bounds: tuple[float, float] | None = None,
) -> RadiusSearchResult:
    """Scan a uniform radius grid and return the middle of the widest plateau.

    Ties go to the plateau whose midpoint is closest to the unit circle. If
    every plateau has a single grid point the result is flagged degenerate
    and the optimal radius is 1.
    """
    if frame.length < 5:
        raise InvalidArgument("frame too short for a radius search")
    if n_radii < 2:
        raise InvalidArgument("need at least two radii")
    if fft_size is None:
        fft_size = default_fft_size(frame.length)
    if bounds is None:
        bounds = radius_bounds(frame.length)
    radii = np.linspace(bounds[0], bounds[1], n_radii)
    nd = np.empty(n_radii, dtype=int)
    shaky = []
    for i, r in enumerate(radii):
        nd[i], low = _delay(frame, r, fft_size)
        if low:
            shaky.append(i)
    plateaus = find_plateaus(nd)
    best, degenerate = select_radius(radii, plateaus)
    return RadiusSearchResult(radii, nd, plateaus, best, bounds, degenerate, tuple(shaky))


def select_radius(radii, plateaus) -> tuple[float, bool]:
    """Midpoint of the widest plateau, ties going to the one nearest 1.

    Returns (radius, degenerate); a grid where no plateau spans two points
    is degenerate and yields radius 1.
    """
    widest = max(e - s for s, e, _ in plateaus)
    if widest == 0:
        return 1.0, True
    mids = [0.5 * (radii[s] + radii[e]) for s, e, _ in plateaus if e - s == widest]
    return float(min(mids, key=lambda m: abs(m - 1.0))), False


def decompose_chirp(
    frame: SignalFrame,
    fft_size: int | None = None,
    n_radii: int = DEFAULT_N_RADII,
    strict: bool = False,
) -> MixedPhaseDecomposition:
    """Radius search followed by the cepstral split on the chosen circle.

    A degenerate search falls back to the unit circle with a warning, or
    raises ``DegenerateSearch`` when ``strict`` is set.
    """
    if fft_size is None:
        fft_size = default_fft_size(frame.length)
    search = find_optimal_radius(frame, n_radii, fft_size)
    if search.degenerate and strict:
        raise DegenerateSearch("no plateau of length >= 2 in the radius scan")
    d = decompose_at_radius(frame, search.optimal_radius, fft_size)
    warnings = d.warnings + (("degenerate-search",) if search.degenerate else ())
    return replace(d, warnings=warnings, search=search)
