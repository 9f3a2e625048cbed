"""Decomposition quality from the spectral centre of gravity of the
anticausal component.

A failed decomposition leaves high-frequency noise in the anticausal part,
which pushes its centre of gravity well above that of a glottal pulse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidData
from .spectral import SignalFrame, default_fft_size

COG_THRESHOLD = 2700.0
WEIGHTINGS = ("magnitude", "power")


@dataclass(frozen=True)
class QualityLabel:
    cog: float
    correct: bool
    threshold: float


def crop_around_peak(samples: np.ndarray, width: int) -> np.ndarray:
    """``width`` samples centred on the largest |sample|, clipped to the input."""
    samples = np.asarray(samples, dtype=float)
    if width >= len(samples):
        return samples
    peak = int(np.argmax(np.abs(samples)))
    start = min(max(peak - width // 2, 0), len(samples) - width)
    return samples[start : start + width]


def spectral_center_of_gravity(
    component: SignalFrame,
    T0: float | None = None,
    weighting: str = "magnitude",
    fft_size: int | None = None,
) -> float:
    """First spectral moment over [0, fs/2].

    With ``T0`` the component is first cropped to 2*T0 samples around its
    peak. Weights are |X| or |X|**2.
    """
    if weighting not in WEIGHTINGS:
        raise InvalidArgument(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    x = np.asarray(component.samples, dtype=float)
    if T0 is not None:
        x = crop_around_peak(x, max(int(round(2 * T0 * component.sample_rate)), 1))
    if not np.all(np.isfinite(x)):
        raise InvalidData("component contains non-finite samples")
    if not np.any(x):
        raise InvalidData("zero-energy component has no centre of gravity")
    if fft_size is None:
        fft_size = default_fft_size(len(x))
    # the moment is scale free; normalising keeps squared weights clear of underflow
    mag = np.abs(np.fft.rfft(x / np.max(np.abs(x)), fft_size))
    w = mag if weighting == "magnitude" else mag**2
    freqs = np.fft.rfftfreq(fft_size, 1.0 / component.sample_rate)
    return float(np.sum(freqs * w) / np.sum(w))


def classify_decomposition(cog: float, threshold: float = COG_THRESHOLD,
                           sample_rate: float | None = None) -> QualityLabel:
    """Correct iff cog < threshold."""
    if not threshold > 0 or (sample_rate is not None and threshold >= sample_rate / 2):
        raise InvalidArgument(f"threshold {threshold} Hz outside (0, fs/2)")
    return QualityLabel(float(cog), bool(cog < threshold), float(threshold))


def correct_rate(labels) -> float:
    labels = list(labels)
    if not labels:
        raise InvalidArgument("no labels to rate")
    return sum(lab.correct for lab in labels) / len(labels)


def cog_histogram(cogs, bin_hz: float = 100.0, sample_rate: float = 16000.0):
    """Counts of COG values in bins of ``bin_hz`` covering [0, fs/2].

    Returns (bin_low_hz, counts).
    """
    if not bin_hz > 0:
        raise InvalidArgument("bin width must be positive")
    edges = np.arange(0.0, sample_rate / 2 + bin_hz, bin_hz)
    counts, _ = np.histogram(np.asarray(cogs, dtype=float), bins=edges)
    return edges[:-1], counts


def find_valley(bin_low, counts, smooth: int = 3):
    """Lowest point between the two largest modes of a (smoothed) histogram.

    Returns (valley_hz, (mode1_hz, mode2_hz)) or None when the histogram has
    fewer than two modes.
    """
    counts = np.asarray(counts, dtype=float)
    if smooth > 1:
        counts = np.convolve(counts, np.ones(smooth) / smooth, mode="same")
    padded = np.concatenate(([-1.0], counts, [-1.0]))
    peaks = [i for i in range(len(counts))
             if padded[i + 1] > padded[i] and padded[i + 1] >= padded[i + 2] and counts[i] > 0]
    if len(peaks) < 2:
        return None
    a, b = sorted(sorted(peaks, key=lambda i: counts[i])[-2:])
    v = a + int(np.argmin(counts[a : b + 1]))
    if counts[v] >= min(counts[a], counts[b]):
        return None
    half = 0.5 * (bin_low[1] - bin_low[0]) if len(bin_low) > 1 else 0.0
    return float(bin_low[v] + half), (float(bin_low[a] + half), float(bin_low[b] + half))
