"""Frequency-domain primitives: zero-padded DFT, phase unwrapping and the
complex cepstrum with its inverse.

Cepstra are stored in FFT order (quefrency 0, 1, ..., N/2-1, -N/2, ..., -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument, InvalidData

MAG_FLOOR = 1e-10
AMBIGUITY_BAND = 0.1
DELAY_CONFIDENCE = 0.25


@dataclass(frozen=True)
class SignalFrame:
    """A slice of audio (or a decomposition component).

    ``samples[origin]`` is time index 0. Analysis frames use ``origin=0`` so
    that the first sample is n=0; anticausal components put the origin on
    their last sample.
    """

    samples: np.ndarray
    sample_rate: float
    anchor_offset: int | None = 0
    origin: int = 0
    position: int = 0  # index of samples[0] in the source signal
    mode: str = "sync"

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    @property
    def length(self) -> int:
        return len(self.samples)

    @property
    def indices(self) -> np.ndarray:
        """Signed time index of every sample."""
        return np.arange(self.length) - self.origin

    def with_samples(self, samples, origin: int | None = None) -> "SignalFrame":
        return replace(
            self, samples=samples, origin=self.origin if origin is None else origin
        )


@dataclass(frozen=True)
class Spectrum:
    bins: np.ndarray
    fft_size: int
    sample_rate: float

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.fft_size // 2 + 1) * self.sample_rate / self.fft_size


@dataclass(frozen=True)
class UnwrappedPhase:
    values: np.ndarray  # bins 0..fft_size/2
    phi_at_pi: float
    sign: int = 1
    linear_removed: bool = False
    low_confidence: bool = False


@dataclass(frozen=True)
class Cepstrum:
    coefficients: np.ndarray  # FFT order
    fft_size: int
    sample_rate: float = 1.0
    delay: int = 0  # integer circular delay removed before the inverse DFT
    raw_delay: float = 0.0  # phi(pi)/pi before rounding
    sign: int = 1
    warnings: tuple[str, ...] = field(default=())

    @property
    def quefrencies(self) -> np.ndarray:
        return np.fft.fftshift(np.fft.fftfreq(self.fft_size, 1.0 / self.fft_size)).astype(int)

    def centered(self) -> np.ndarray:
        """Coefficients ordered by quefrency -N/2 .. N/2-1."""
        return np.fft.fftshift(self.coefficients)

    def at(self, n) -> np.ndarray:
        return self.coefficients[np.asarray(n) % self.fft_size]


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def default_fft_size(length: int, factor: float = 8.0) -> int:
    """Smallest power of two >= factor * length."""
    target = max(int(np.ceil(factor * length)), 4)
    return 1 << (target - 1).bit_length()


def round_half_away(x):
    x = np.asarray(x, dtype=float)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(int)


def _check_samples(samples: np.ndarray, fft_size: int | None) -> None:
    if samples.ndim != 1 or len(samples) < 1:
        raise InvalidArgument("frame must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(samples)):
        raise InvalidData("frame contains non-finite samples")
    if fft_size is not None:
        if not is_power_of_two(fft_size):
            raise InvalidArgument(f"fft_size {fft_size} is not a power of two")
        if fft_size < len(samples):
            raise InvalidArgument(
                f"fft_size {fft_size} is smaller than frame length {len(samples)}"
            )


def analyze(frame: SignalFrame, fft_size: int | None = None) -> Spectrum:
    """Zero-padded DFT of a frame (the origin is taken as the first sample)."""
    if fft_size is None:
        fft_size = default_fft_size(frame.length)
    _check_samples(frame.samples, fft_size)
    return Spectrum(np.fft.fft(frame.samples, fft_size), fft_size, frame.sample_rate)


def unwrap_phase(spec: Spectrum) -> UnwrappedPhase:
    """Continuous phase over [0, pi] with values[0] = 0.

    If the DC bin is negative the spectrum is negated first and ``sign`` is
    set to -1.
    """
    half = spec.bins[: spec.fft_size // 2 + 1]
    sign = -1 if half[0].real < 0 else 1
    wrapped = np.angle(sign * half)
    wrapped[0] = 0.0
    step = np.diff(wrapped)
    principal = np.mod(step + np.pi, 2 * np.pi) - np.pi
    low = bool(np.any(np.abs(principal) > np.pi - AMBIGUITY_BAND))
    values = np.concatenate(([0.0], np.cumsum(principal)))
    return UnwrappedPhase(values, float(values[-1]), sign, False, low)


def _log_spectrum(spec: Spectrum) -> tuple[np.ndarray, UnwrappedPhase, int, float]:
    n = spec.fft_size
    ph = unwrap_phase(spec)
    raw = ph.phi_at_pi / np.pi
    delay = int(round_half_away(raw))
    k = np.arange(n // 2 + 1)
    half_phase = ph.values - np.pi * delay * k / (n // 2)
    half_phase[-1] = 0.0
    phase = np.concatenate((half_phase, -half_phase[-2:0:-1]))
    mag = np.abs(spec.bins)
    peak = mag.max()
    if peak == 0:
        raise InvalidData("all-zero frame")
    log_mag = np.log(np.maximum(mag, MAG_FLOOR * peak))
    return log_mag + 1j * phase, ph, delay, raw


def complex_cepstrum(frame: SignalFrame, fft_size: int | None = None) -> Cepstrum:
    """Complex cepstrum with the integer linear-phase term removed.

    The removed delay (round(phi(pi)/pi)) and the sign flip applied to make
    the DC bin positive are kept on the result so the frame can be rebuilt.
    """
    if fft_size is None:
        fft_size = default_fft_size(frame.length)
    _check_samples(frame.samples, fft_size)
    if not np.any(frame.samples):
        raise InvalidData("all-zero frame")
    spec = analyze(frame, fft_size)
    log_spec, ph, delay, raw = _log_spectrum(spec)
    coeffs = np.fft.ifft(log_spec).real
    warnings = []
    if ph.low_confidence:
        warnings.append("unwrap-ambiguous")
    if abs(raw - delay) > DELAY_CONFIDENCE:
        warnings.append("delay-off-integer")
    return Cepstrum(coeffs, fft_size, frame.sample_rate, delay, raw, ph.sign, tuple(warnings))


KEEP_MODES = ("anticausal", "causal", "all")


def lifter(cep: Cepstrum, keep: str) -> np.ndarray:
    """Cepstral coefficients restricted to one side of the quefrency origin.

    The origin coefficient (overall gain) always goes with the causal side.
    """
    if keep not in KEEP_MODES:
        raise InvalidArgument(f"keep must be one of {KEEP_MODES}, got {keep!r}")
    c = cep.coefficients.copy()
    half = cep.fft_size // 2
    if keep == "anticausal":
        c[: half + 1] = 0.0
    elif keep == "causal":
        c[half:] = 0.0
    return c


def inverse_complex_cepstrum(
    cep: Cepstrum, keep: str = "all", restore: bool = False
) -> SignalFrame:
    """Time signal whose complex cepstrum is the selected part of ``cep``.

    The result spans quefrency-ordered indices -N/2 .. N/2-1 (origin at N/2).
    With ``restore=True`` (only meaningful for ``keep="all"``) the removed
    delay and sign are reapplied and the result starts at index 0.
    """
    c = lifter(cep, keep)
    y = np.fft.ifft(np.exp(np.fft.fft(c))).real
    if restore:
        if keep != "all":
            raise InvalidArgument("restore requires keep='all'")
        y = cep.sign * np.roll(y, -cep.delay)
        return SignalFrame(y, cep.sample_rate, origin=0)
    return SignalFrame(np.fft.fftshift(y), cep.sample_rate, origin=cep.fft_size // 2)


def parseval_error(frame: SignalFrame, spec: Spectrum) -> float:
    """Relative mismatch between time- and frequency-domain energy."""
    e_t = float(np.sum(frame.samples**2))
    e_f = float(np.sum(np.abs(spec.bins) ** 2) / spec.fft_size)
    return abs(e_t - e_f) / max(e_t, np.finfo(float).tiny)
