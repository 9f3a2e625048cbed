"""Synthetic voiced speech with known mixed-phase structure.

Each glottal cycle is a maximum-phase pulse (the time-reversed impulse
response of a two-pole resonator, ending at the GCI) and the train is
filtered by a minimum-phase all-pole vocal tract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidArgument

TRUNCATION_DB = -80.0


@dataclass(frozen=True)
class PulseParams:
    rho: float  # resonator pole modulus; the pulse's poles sit at 1/rho
    theta: float  # pole angle, radians per sample

    def __post_init__(self):
        if not 0.5 < self.rho < 0.99:
            raise InvalidArgument(f"rho must lie in (0.5, 0.99), got {self.rho}")
        if not 0 < self.theta < np.pi:
            raise InvalidArgument(f"theta must lie in (0, pi), got {self.theta}")


# Ordered by decreasing spectral tilt of the pulse: the tense pulse is the
# shortest and has its main negative excursion closest to closure.
PRESETS: dict[str, PulseParams] = {
    "tense": PulseParams(0.80, 0.14 * np.pi),
    "modal": PulseParams(0.84, 0.09 * np.pi),
    "lax": PulseParams(0.87, 0.06 * np.pi),
}

DEFAULT_FORMANTS = (
    (700.0, 80.0),
    (1220.0, 90.0),
    (2600.0, 120.0),
    (3500.0, 200.0),
    (4500.0, 250.0),
    (5500.0, 300.0),
    (6500.0, 350.0),
    (7500.0, 400.0),
)


@dataclass(frozen=True)
class Pulse:
    samples: np.ndarray  # last sample is the GCI
    peak_to_peak_flow: float  # of the cumulative sum of ``samples``
    derivative_min: float

    @property
    def length(self) -> int:
        return len(self.samples)


def resonator_response(rho: float, theta: float, n: int) -> np.ndarray:
    """Impulse response of 1 / (1 - 2 rho cos(theta) z^-1 + rho^2 z^-2)."""
    k = np.arange(n)
    return rho**k * np.sin((k + 1) * theta) / np.sin(theta)


def pulse_length(params: PulseParams) -> int:
    """Samples kept before the envelope falls 80 dB below the peak."""
    long = resonator_response(params.rho, params.theta, 4096)
    peak = np.max(np.abs(long))
    env = params.rho ** np.arange(len(long)) / np.sin(params.theta)
    floor = peak * 10 ** (TRUNCATION_DB / 20)
    return int(np.flatnonzero(env >= floor)[-1]) + 1


def gen_maxphase_pulse(params: PulseParams, T0: float, fs: float) -> Pulse:
    """Maximum-phase glottal pulse ending at the GCI.

    The sign is chosen so that the excursion closest to closure is negative,
    as in a glottal flow derivative.
    """
    n = pulse_length(params)
    if n >= T0 * fs:
        raise InvalidArgument(
            f"pulse of {n} samples does not fit in a period of {T0 * fs:.1f} samples"
        )
    h = resonator_response(params.rho, params.theta, n)
    pulse = -h[::-1]
    flow = np.cumsum(pulse)
    return Pulse(pulse, float(np.ptp(np.concatenate(([0.0], flow)))), float(pulse.min()))


def formant_poles(formants, fs: float) -> np.ndarray:
    poles = []
    for center, bw in formants:
        if bw <= 0:
            raise InvalidArgument(f"formant bandwidth must be positive, got {bw}")
        if not 0 < center < fs / 2:
            raise InvalidArgument(f"formant {center} Hz outside (0, fs/2)")
        r = np.exp(-np.pi * bw / fs)
        w = 2 * np.pi * center / fs
        poles += [r * np.exp(1j * w), r * np.exp(-1j * w)]
    return np.array(poles)


def gen_allpole_tract(formants, fs: float) -> np.ndarray:
    """Denominator coefficients of a cascade of two-pole resonators.

    The filter is normalised to unit gain at DC.
    """
    poles = formant_poles(formants, fs)
    if poles.size and np.max(np.abs(poles)) >= 1:
        raise InvalidArgument("vocal tract pole on or outside the unit circle")
    a = np.real(np.poly(poles)) if poles.size else np.array([1.0])
    return a / np.sum(a)


@dataclass(frozen=True)
class SyntheticSpec:
    f0: float | tuple = 200.0  # constant, or ((time_s, f0_hz), ...) piecewise constant
    fs: float = 16000.0
    duration: float = 1.0
    pulse: PulseParams = PRESETS["modal"]
    formants: tuple = DEFAULT_FORMANTS
    jitter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for center, _ in self.formants:
            if center >= self.fs / 2:
                raise InvalidArgument(f"formant {center} Hz is above fs/2")
        if self.jitter < 0 or self.jitter >= 0.5:
            raise InvalidArgument("jitter must lie in [0, 0.5)")

    def f0_at(self, t: float) -> float:
        if np.isscalar(self.f0):
            return float(self.f0)
        value = self.f0[0][1]
        for time, f in self.f0:
            if time <= t:
                value = f
        return float(value)


@dataclass
class SyntheticUtterance:
    signal: np.ndarray
    fs: float
    gci_samples: np.ndarray
    periods: np.ndarray  # T0 in seconds for each GCI (the cycle ending there)
    pulses: list[Pulse] = field(repr=False)
    tract: np.ndarray = field(repr=False)

    @property
    def gci_times(self) -> np.ndarray:
        return self.gci_samples / self.fs

    def pitch_track(self) -> list[tuple[float, float]]:
        return [(float(t), float(p)) for t, p in zip(self.gci_times, self.periods)]


def synth_utterance(spec: SyntheticSpec) -> SyntheticUtterance:
    n_total = int(round(spec.duration * spec.fs))
    if spec.duration * spec.f0_at(0.0) < 3:
        raise InvalidArgument("utterance must span at least three periods")
    rng = np.random.default_rng(spec.seed)
    excitation = np.zeros(n_total)
    gcis, periods, pulses = [], [], []
    cache: dict[float, Pulse] = {}
    gci = 0
    while True:
        f0 = spec.f0_at(gci / spec.fs)
        spread = spec.jitter * rng.uniform(-1.0, 1.0) if spec.jitter else 0.0
        period = int(round(spec.fs / f0 * (1.0 + spread)))
        gci += period
        if gci >= n_total:
            break
        T0 = period / spec.fs
        if period not in cache:
            cache[period] = gen_maxphase_pulse(spec.pulse, T0, spec.fs)
        p = cache[period]
        excitation[gci - p.length + 1 : gci + 1] += p.samples
        gcis.append(gci)
        periods.append(T0)
        pulses.append(p)
    a = gen_allpole_tract(spec.formants, spec.fs)
    speech = lfilter([1.0], a, excitation)
    speech *= 0.5 / np.max(np.abs(speech))
    return SyntheticUtterance(speech, spec.fs, np.array(gcis), np.array(periods), pulses, a)
