"""Analysis frames: GCI-synchronous or on a fixed time grid, with a window
whose length follows the pitch period.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameSkipped, InvalidArgument, InvalidData
from .spectral import SignalFrame

WINDOW_SHAPES = ("blackman", "hann", "hamming")
T0_RANGE = (1.0 / 500.0, 1.0 / 50.0)


@dataclass(frozen=True)
class WindowSpec:
    shape: str = "blackman"
    periods: float = 2.0

    def __post_init__(self):
        if self.shape not in WINDOW_SHAPES:
            raise InvalidArgument(f"window shape must be one of {WINDOW_SHAPES}, got {self.shape!r}")
        if not self.periods > 0:
            raise InvalidArgument(f"window periods must be positive, got {self.periods}")

    def length(self, T0: float, sample_rate: float) -> int:
        n = int(round(self.periods * T0 * sample_rate))
        return n if n % 2 else n + 1


@dataclass(frozen=True)
class GciTrack:
    instants: np.ndarray  # seconds, strictly increasing

    def __post_init__(self):
        t = np.asarray(self.instants, dtype=float)
        if t.ndim != 1:
            raise InvalidData("GCI instants must be a 1-D sequence")
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise InvalidData("GCI instants must be finite and non-negative")
        if np.any(np.diff(t) <= 0):
            raise InvalidData("GCI instants must be strictly increasing")
        object.__setattr__(self, "instants", t)

    def __len__(self) -> int:
        return len(self.instants)

    def nearest(self, time: float) -> float:
        if not len(self.instants):
            raise LookupError("empty GCI track")
        i = int(np.argmin(np.abs(self.instants - time)))
        return float(self.instants[i])

    def check_duration(self, duration: float) -> None:
        if len(self.instants) and self.instants[-1] > duration:
            raise InvalidData(f"GCI at {self.instants[-1]:.6g} s is past the end of the signal")


@dataclass(frozen=True)
class PitchTrack:
    """Piecewise-constant T0: each value holds from its time until the next."""

    times: np.ndarray
    periods: np.ndarray
    t0_range: tuple[float, float] = T0_RANGE

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.periods, dtype=float)
        if t.shape != p.shape or t.ndim != 1 or not len(t):
            raise InvalidData("pitch track needs matching, non-empty time and T0 columns")
        if np.any(np.diff(t) < 0):
            raise InvalidData("pitch track times must be non-decreasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "periods", p)

    @classmethod
    def constant(cls, T0: float) -> "PitchTrack":
        return cls(np.array([0.0]), np.array([T0]))

    def at(self, time: float) -> float:
        i = max(int(np.searchsorted(self.times, time, side="right")) - 1, 0)
        return float(self.periods[i])

    def voiced(self, T0: float) -> bool:
        return self.t0_range[0] <= T0 <= self.t0_range[1]


def make_window(spec: WindowSpec, T0: float, sample_rate: float) -> np.ndarray:
    """Symmetric window of odd length round(periods * T0 * fs), peak 1."""
    n = spec.length(T0, sample_rate)
    if n < 5:
        raise InvalidArgument(f"window of {n} samples is too short")
    w = {"blackman": np.blackman, "hann": np.hanning, "hamming": np.hamming}[spec.shape](n)
    return w / w[n // 2]


def _cut(signal, center: int, window: np.ndarray, sample_rate: float,
         anchor_offset, mode: str) -> SignalFrame:
    half = len(window) // 2
    start, stop = center - half, center + half + 1
    if start < 0 or stop > len(signal):
        raise FrameSkipped(f"window [{start}, {stop}) exceeds signal of {len(signal)} samples")
    seg = np.asarray(signal[start:stop], dtype=float)
    return SignalFrame(seg * window, float(sample_rate), anchor_offset=anchor_offset,
                       position=start, mode=mode)


def extract_frame_sync(signal, gci: float, T0: float, spec: WindowSpec,
                       sample_rate: float) -> SignalFrame:
    """Window centred on the sample nearest the GCI."""
    window = make_window(spec, T0, sample_rate)
    center = int(np.floor(gci * sample_rate + 0.5))
    return _cut(signal, center, window, sample_rate, 0, "sync")


def extract_frame_async(signal, center: float, T0: float, spec: WindowSpec,
                        sample_rate: float, gcis: GciTrack | None = None) -> SignalFrame:
    """Window centred at an arbitrary time.

    With a GCI track, ``anchor_offset`` is the signed distance in samples from
    the nearest GCI to the window centre; otherwise it is ``None``.
    """
    window = make_window(spec, T0, sample_rate)
    c = int(np.floor(center * sample_rate + 0.5))
    offset = None
    if gcis is not None and len(gcis):
        offset = c - int(np.floor(gcis.nearest(center) * sample_rate + 0.5))
    return _cut(signal, c, window, sample_rate, offset, "async")


def frame_grid(duration: float, shift: float) -> np.ndarray:
    """Frame centre times k * shift inside [0, duration)."""
    if not shift > 0:
        raise InvalidArgument("frame shift must be positive")
    t = np.arange(int(np.floor(duration / shift)) + 1) * shift
    return t[t < duration]
