"""Voice-quality features of an estimated glottal flow derivative.

NAQ is measured in the time domain on one cycle. H1-H2 and HRF read
harmonic amplitudes off a Blackman-windowed, densely padded spectrum with
parabolic interpolation of the log magnitude around each harmonic peak.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import EmptyOutput, FeatureUnavailable, InvalidArgument
from .quality import QualityLabel
from .spectral import SignalFrame

LEAK = 0.99
HARMONIC_TOLERANCE = 0.2
HRF_FLOOR_DB = -60.0
PEAK_FLOOR_DB = -100.0  # below this, relative to the spectrum maximum, a peak is leakage
FEATURE_NAMES = ("naq", "h1h2", "hrf")


@dataclass(frozen=True)
class GlottalFeatures:
    naq: float
    h1h2: float  # dB
    hrf: float  # dB
    f0: float
    frame_id: int = 0
    label: QualityLabel | None = None

    def value(self, name: str) -> float:
        if name not in FEATURE_NAMES:
            raise InvalidArgument(f"unknown feature {name!r}")
        return getattr(self, name)


def fix_polarity(derivative: np.ndarray) -> np.ndarray:
    """Flip the sign so that the dominant excursion is negative."""
    d = np.asarray(derivative, dtype=float)
    return -d if d.max() > -d.min() else d


def glottal_cycle(anticausal: SignalFrame, T0: float) -> np.ndarray:
    """The last T0 of an anticausal component, ending at its time origin.

    The open phase of a correctly separated frame ends at index 0 of the
    anticausal support, so this keeps one period that finishes at closure.
    """
    n = int(round(T0 * anticausal.sample_rate))
    if n < 4:
        raise InvalidArgument("period too short for feature extraction")
    end = anticausal.origin + 1
    return fix_polarity(anticausal.samples[max(end - n, 0) : end])


def leaky_flow(derivative: np.ndarray, leak: float = LEAK) -> np.ndarray:
    """Flow from its derivative: mean removal then a one-pole integrator."""
    d = np.asarray(derivative, dtype=float)
    return lfilter([1.0], [1.0, -leak], d - d.mean())


def compute_naq(glottal: SignalFrame, T0: float, leak: float = LEAK) -> float:
    """Peak-to-peak flow over (|min derivative| * T0).

    The flow is obtained by leaky integration of the derivative in samples,
    so T0 is converted to samples as well and the ratio is dimensionless.
    """
    d = np.asarray(glottal.samples, dtype=float)
    if not T0 > 0:
        raise InvalidArgument("T0 must be positive")
    d_min = d.min()
    if not d_min < 0:
        raise FeatureUnavailable("flow derivative has no negative peak")
    flow = leaky_flow(d, leak)
    return float(np.ptp(flow) / (-d_min * T0 * glottal.sample_rate))


def _spectrum(x: np.ndarray, fs: float, min_resolution: float):
    # Blackman taper: rectangular sidelobes would pass for weak harmonics
    n = 1 << max(int(np.ceil(np.log2(max(8 * len(x), fs / min_resolution)))), 4)
    mag = np.abs(np.fft.rfft(x * np.blackman(len(x)), n))
    return mag, fs / n


def harmonic_peak(mag: np.ndarray, df: float, target: float, halfwidth: float) -> float | None:
    """Interpolated magnitude of the strongest peak within target +- halfwidth Hz.

    Returns None when the maximum of the search band sits on its edge, i.e.
    there is no peak to speak of, or when it is lost in numerical leakage.
    """
    lo = int(np.ceil((target - halfwidth) / df))
    hi = min(int(np.floor((target + halfwidth) / df)), len(mag) - 1)
    if hi - lo < 2:
        return None
    k = lo + int(np.argmax(mag[lo : hi + 1]))
    if k in (lo, hi) or mag[k] <= np.max(mag) * 10 ** (PEAK_FLOOR_DB / 20):
        return None
    a, b, c = np.log(np.maximum(mag[k - 1 : k + 2], np.finfo(float).tiny))
    denom = a - 2 * b + c
    p = 0.5 * (a - c) / denom if denom < 0 else 0.0
    return float(np.exp(b - 0.25 * (a - c) * p))


def harmonic_amplitudes(glottal: SignalFrame, f0: float, n_harmonics: int | None = None) -> list:
    """Peak magnitudes near k * f0, searched within +-20% of f0.

    A band proportional to the harmonic number would reach the neighbouring
    harmonics from the fifth one on. Missing peaks are None.
    """
    fs = glottal.sample_rate
    if not 0 < f0 < fs / 2:
        raise InvalidArgument("f0 must lie in (0, fs/2)")
    halfwidth = HARMONIC_TOLERANCE * f0
    if n_harmonics is None:
        n_harmonics = int(np.floor((fs / 2 - halfwidth) / f0))
    mag, df = _spectrum(glottal.samples, fs, f0 / 20)
    return [harmonic_peak(mag, df, k * f0, halfwidth) for k in range(1, n_harmonics + 1)]


def compute_h1h2(glottal: SignalFrame, f0: float) -> float:
    """20 log10(|X(f1)| / |X(f2)|) from the harmonic peaks near f0 and 2 f0."""
    if (2 + HARMONIC_TOLERANCE) * f0 >= glottal.sample_rate / 2:
        raise FeatureUnavailable("second harmonic search band exceeds fs/2")
    h1, h2 = harmonic_amplitudes(glottal, f0, 2)
    if h1 is None or h2 is None:
        raise FeatureUnavailable("first or second harmonic peak not found")
    return float(20 * np.log10(h1 / h2))


def compute_hrf(glottal: SignalFrame, f0: float, floor_db: float = HRF_FLOOR_DB) -> float:
    """20 log10(sum_{k>=2} |X(f_k)| / |X(f_1)|) over harmonics below fs/2.

    Upper harmonics without a peak contribute nothing; the result is
    clipped from below at ``floor_db``.
    """
    amps = harmonic_amplitudes(glottal, f0)
    if len(amps) < 3:
        raise FeatureUnavailable("fewer than three harmonics below fs/2")
    if amps[0] is None:
        raise FeatureUnavailable("first harmonic peak not found")
    upper = sum(a for a in amps[1:] if a is not None)
    if upper <= 0:
        return float(floor_db)
    return float(max(20 * np.log10(upper / amps[0]), floor_db))


def periodize(cycle: np.ndarray, n_periods: int = 8) -> np.ndarray:
    """Repeat one glottal cycle so that its spectrum shows harmonics."""
    return np.tile(np.asarray(cycle, dtype=float), n_periods)


def extract_features(anticausal: SignalFrame, T0: float, frame_id: int = 0,
                     label: QualityLabel | None = None) -> GlottalFeatures:
    """NAQ, H1-H2 and HRF of one anticausal component.

    Only frames whose label says the decomposition is correct may be passed.
    """
    if label is not None and not label.correct:
        raise InvalidArgument("features are only extracted from correctly decomposed frames")
    cycle = glottal_cycle(anticausal, T0)
    fs = anticausal.sample_rate
    one = SignalFrame(cycle, fs)
    train = SignalFrame(periodize(cycle), fs)
    f0 = fs / len(cycle)
    return GlottalFeatures(
        naq=compute_naq(one, len(cycle) / fs),
        h1h2=compute_h1h2(train, f0),
        hrf=compute_hrf(train, f0),
        f0=f0,
        frame_id=frame_id,
        label=label,
    )


def _edges(values: np.ndarray, bins) -> np.ndarray:
    if np.ndim(bins) == 0:
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        return np.linspace(lo, hi, int(bins) + 1)
    return np.asarray(bins, dtype=float)


def feature_histograms(features, bins=20) -> dict:
    """Normalised histograms of NAQ, H1-H2 and HRF over correct frames.

    ``bins`` is a count or a dict mapping feature name to bin edges. Each
    entry is (edges, weights) with weights summing to 1 over the values
    falling inside the edges.
    """
    kept = [f for f in features if f.label is None or f.label.correct]
    if not kept:
        raise EmptyOutput("no correctly decomposed frames to histogram")
    out = {}
    for name in FEATURE_NAMES:
        values = np.array([f.value(name) for f in kept])
        edges = _edges(values, bins[name] if isinstance(bins, dict) else bins)
        counts, _ = np.histogram(values, bins=edges)
        total = counts.sum()
        out[name] = (edges, counts / total if total else counts.astype(float))
    return out


def histogram_l1(a, b) -> float:
    """L1 distance between two normalised histograms on the same edges."""
    (ea, wa), (eb, wb) = a, b
    if len(ea) != len(eb) or not np.allclose(ea, eb):
        raise InvalidArgument("histograms must share bin edges")
    return float(np.sum(np.abs(wa - wb)))
