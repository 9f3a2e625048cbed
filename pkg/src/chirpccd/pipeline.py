"""Frame-level orchestration shared by the CLI and the experiment scripts."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ccd import MixedPhaseDecomposition, decompose_traditional
from .chirp import DEFAULT_N_RADII, RadiusSearchResult, decompose_chirp, find_optimal_radius
from .errors import FeatureUnavailable, FrameSkipped, InvalidArgument
from .features import extract_features
from .framing import (
    GciTrack,
    PitchTrack,
    WindowSpec,
    extract_frame_async,
    extract_frame_sync,
    frame_grid,
)
from .io import FrameResult
from .quality import COG_THRESHOLD, classify_decomposition, spectral_center_of_gravity
from .spectral import SignalFrame, default_fft_size

MODES = ("sync", "async")
METHODS = ("traditional", "chirp", "both")


@dataclass(frozen=True)
class RunConfig:
    mode: str = "sync"
    method: str = "both"
    shift_ms: float = 10.0
    window: WindowSpec = field(default_factory=WindowSpec)
    fft_factor: float = 8.0
    n_radii: int = DEFAULT_N_RADII
    cog_threshold: float = COG_THRESHOLD
    weighting: str = "magnitude"
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.method not in METHODS:
            raise InvalidArgument(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.shift_ms > 0:
            raise InvalidArgument("shift must be positive")
        if not self.fft_factor >= 1:
            raise InvalidArgument("fft factor must be at least 1")
        if self.jobs < 1:
            raise InvalidArgument("jobs must be at least 1")

    @property
    def methods(self) -> tuple[str, ...]:
        return ("traditional", "chirp") if self.method == "both" else (self.method,)

    def fft_size(self, length: int) -> int:
        return default_fft_size(length, self.fft_factor)


def decompose(frame: SignalFrame, method: str, config: RunConfig) -> MixedPhaseDecomposition:
    fft = config.fft_size(frame.length)
    if method == "traditional":
        return decompose_traditional(frame, fft)
    if method == "chirp":
        return decompose_chirp(frame, fft, config.n_radii)
    raise InvalidArgument(f"unknown method {method!r}")


def analyze_frame(frame: SignalFrame, T0: float, method: str, config: RunConfig,
                  frame_id: int = 0, time_s: float = 0.0) -> FrameResult:
    """Decompose, label and (when correct) measure one frame."""
    d = decompose(frame, method, config)
    cog = spectral_center_of_gravity(d.anticausal, T0, config.weighting)
    label = classify_decomposition(cog, config.cog_threshold, frame.sample_rate)
    naq = h1h2 = hrf = None
    if label.correct:
        try:
            f = extract_features(d.anticausal, T0, frame_id, label)
            naq, h1h2, hrf = f.naq, f.h1h2, f.hrf
        except FeatureUnavailable:
            pass
    return FrameResult(frame_id, time_s, method, d.radius_used, d.removed_delay,
                       cog, label.correct, naq, h1h2, hrf)


@dataclass(frozen=True)
class FramePlan:
    frame_id: int
    time_s: float  # window centre
    T0: float


def local_periods(gcis: GciTrack) -> np.ndarray:
    """T0 at each GCI from the spacing to its neighbours."""
    t = gcis.instants
    if len(t) < 2:
        raise InvalidArgument("need at least two GCIs to infer the period")
    d = np.diff(t)
    return np.concatenate(([d[0]], 0.5 * (d[:-1] + d[1:]), [d[-1]]))


def plan_frames(duration: float, config: RunConfig, gcis: GciTrack | None = None,
                pitch: PitchTrack | None = None) -> list[FramePlan]:
    """Frame centres and periods for sync (one per GCI) or async (fixed grid)."""
    if config.mode == "sync":
        if gcis is None:
            raise InvalidArgument("sync mode needs a GCI track")
        periods = [pitch.at(t) for t in gcis.instants] if pitch is not None else local_periods(gcis)
        return [FramePlan(i, float(t), float(p)) for i, (t, p) in enumerate(zip(gcis.instants, periods))]
    if pitch is None:
        raise InvalidArgument("async mode needs a pitch track")
    grid = frame_grid(duration, config.shift_ms / 1000.0)
    return [FramePlan(i, float(t), pitch.at(t)) for i, t in enumerate(grid)]


def _run_plan(args) -> list[FrameResult] | None:
    signal, fs, plan, config, gcis, voiced = args
    if not voiced:
        return None
    try:
        if config.mode == "sync":
            frame = extract_frame_sync(signal, plan.time_s, plan.T0, config.window, fs)
        else:
            frame = extract_frame_async(signal, plan.time_s, plan.T0, config.window, fs, gcis)
    except FrameSkipped:
        return None
    return [analyze_frame(frame, plan.T0, m, config, plan.frame_id, plan.time_s)
            for m in config.methods]


def _ordered_map(fn, items, jobs: int) -> list:
    """map() whose output order is the input order whatever the job count."""
    if jobs <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


@dataclass
class AnalysisResult:
    rows: list[FrameResult]
    n_planned: int
    n_skipped: int

    def rate(self, method: str) -> float | None:
        sel = [r for r in self.rows if r.method == method]
        return sum(r.correct for r in sel) / len(sel) if sel else None

    def summary(self, methods) -> list[str]:
        lines = [f"frames_planned\t{self.n_planned}", f"frames_skipped\t{self.n_skipped}"]
        for m in methods:
            r = self.rate(m)
            lines.append(f"correct_rate_{m}\t{'' if r is None else format(r, '.6g')}")
        return lines


def run_analysis(signal, fs: float, config: RunConfig, gcis: GciTrack | None = None,
                 pitch: PitchTrack | None = None) -> AnalysisResult:
    signal = np.asarray(signal, dtype=float)
    plans = plan_frames(len(signal) / fs, config, gcis, pitch)
    guard = pitch if pitch is not None else PitchTrack.constant(0.01)
    items = [(signal, fs, p, config, gcis, guard.voiced(p.T0)) for p in plans]
    results = _ordered_map(_run_plan, items, config.jobs)
    rows = [r for res in results if res is not None for r in res]
    skipped = sum(res is None for res in results)
    return AnalysisResult(rows, len(plans), skipped)


def bench_robustness(signal, fs: float, gcis: GciTrack, offsets, config: RunConfig,
                     pitch: PitchTrack | None = None) -> list[tuple[float, float, float]]:
    """Correct rate of both methods with the window moved by frac * T0 off each GCI.

    Returns rows (offset_frac, rate_traditional, rate_chirp).
    """
    offsets = list(offsets)
    if not offsets:
        raise InvalidArgument("offset list is empty")
    signal = np.asarray(signal, dtype=float)
    periods = [pitch.at(t) for t in gcis.instants] if pitch is not None else local_periods(gcis)
    cfg = RunConfig(mode="async", method="both", window=config.window, fft_factor=config.fft_factor,
                    n_radii=config.n_radii, cog_threshold=config.cog_threshold,
                    weighting=config.weighting, jobs=config.jobs)
    items = []
    for frac in offsets:
        for i, (t, T0) in enumerate(zip(gcis.instants, periods)):
            # shift by a whole number of samples so every frame sees the same offset
            c = (np.floor(t * fs + 0.5) + np.floor(frac * T0 * fs + 0.5)) / fs
            items.append((signal, fs, FramePlan(i, float(c), float(T0)), cfg, gcis, True))
    results = _ordered_map(_run_plan, items, config.jobs)
    table = []
    per = len(gcis.instants)
    for k, frac in enumerate(offsets):
        rows = [r for res in results[k * per : (k + 1) * per] if res is not None for r in res]
        rates = []
        for m in ("traditional", "chirp"):
            sel = [r for r in rows if r.method == m]
            if not sel:
                raise FrameSkipped(f"no frame fits the signal at offset {frac}")
            rates.append(sum(r.correct for r in sel) / len(sel))
        table.append((float(frac), rates[0], rates[1]))
    return table


def radius_scan(signal, fs: float, time_s: float, T0: float,
                config: RunConfig) -> tuple[SignalFrame, RadiusSearchResult]:
    frame = extract_frame_async(signal, time_s, T0, config.window, fs)
    return frame, find_optimal_radius(frame, config.n_radii, config.fft_size(frame.length))

