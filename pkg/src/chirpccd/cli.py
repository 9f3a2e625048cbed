"""Command-line front end.

    chirpccd analyze speech.wav --mode sync --gci-file speech.gci --out-dir out
    chirpccd bench-robustness speech.wav --gci-file speech.gci --offsets -0.25,0,0.25
    chirpccd synth spec.json --out-dir corpus
    chirpccd radius-scan speech.wav --time 0.5 --f0 120 --roots
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import CcdError, InvalidArgument, InvalidData
from .features import FEATURE_NAMES, GlottalFeatures, feature_histograms
from .framing import WINDOW_SHAPES, PitchTrack, WindowSpec
from .pipeline import METHODS, MODES, RunConfig, bench_robustness, radius_scan, run_analysis
from .quality import cog_histogram
from .synth import PRESETS, PulseParams, SyntheticSpec, synth_utterance
from .zzt import compute_roots

DEFAULT_OFFSETS = (-0.25, -0.1875, -0.125, -0.0625, 0.0, 0.0625, 0.125, 0.1875, 0.25)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window-periods", type=float, default=2.0)
    p.add_argument("--window-shape", choices=WINDOW_SHAPES, default="blackman")
    p.add_argument("--n-radii", type=int, default=60)
    p.add_argument("--cog-threshold", type=float, default=2700.0, help="Hz")
    p.add_argument("--fft-factor", type=float, default=8.0,
                   help="fft size is the next power of two >= factor * frame length")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def _pitch_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gci-file")
    p.add_argument("--pitch-file", help="lines of time_s<TAB>T0_s")
    p.add_argument("--f0", type=float, help="constant f0 in Hz instead of a pitch file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chirpccd", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="decompose every frame and write a per-frame CSV")
    a.add_argument("wav")
    a.add_argument("--mode", choices=MODES, default="sync")
    a.add_argument("--method", choices=METHODS, default="both")
    a.add_argument("--shift-ms", type=float, default=10.0)
    a.add_argument("--hist-bin", type=float, default=100.0, help="COG histogram bin width, Hz")
    _pitch_args(a)
    _common(a)

    b = sub.add_parser("bench-robustness", help="correct rate against GCI timing error")
    b.add_argument("wav")
    b.add_argument("--offsets", default=",".join(str(o) for o in DEFAULT_OFFSETS),
                   help="comma-separated offsets as fractions of T0")
    _pitch_args(b)
    _common(b)

    s = sub.add_parser("synth", help="generate a synthetic utterance from a JSON spec")
    s.add_argument("spec")
    s.add_argument("--name", default=None, help="output basename (default: spec file stem)")
    s.add_argument("--out-dir", default=".")
    s.add_argument("--seed", type=int, default=None, help="overrides the seed given in the JSON file")

    r = sub.add_parser("radius-scan", help="n_d against radius for one frame")
    r.add_argument("wav")
    r.add_argument("--time", type=float, required=True, help="window centre, seconds")
    r.add_argument("--roots", action="store_true", help="also dump the frame's roots")
    _pitch_args(r)
    _common(r)
    return parser


def _config(args, **extra) -> RunConfig:
    return RunConfig(
        window=WindowSpec(args.window_shape, args.window_periods),
        fft_factor=args.fft_factor,
        n_radii=args.n_radii,
        cog_threshold=args.cog_threshold,
        seed=args.seed,
        jobs=args.jobs,
        **extra,
    )


def _pitch(args) -> PitchTrack | None:
    if args.pitch_file and args.f0:
        raise InvalidArgument("give either --pitch-file or --f0, not both")
    if args.pitch_file:
        return io.read_pitch_file(args.pitch_file)
    if args.f0:
        return PitchTrack.constant(1.0 / args.f0)
    return None


def _load(args):
    signal, fs = io.read_wav(args.wav)
    gcis = io.read_gci_file(args.gci_file) if args.gci_file else None
    if gcis is not None:
        gcis.check_duration(len(signal) / fs)
    return signal, fs, gcis, _pitch(args)


def cmd_analyze(args) -> int:
    config = _config(args, mode=args.mode, method=args.method, shift_ms=args.shift_ms)
    signal, fs, gcis, pitch = _load(args)
    if config.mode == "sync" and gcis is None:
        raise InvalidArgument("sync mode needs --gci-file")
    if config.mode == "async" and pitch is None:
        raise InvalidArgument("async mode needs --pitch-file or --f0")
    result = run_analysis(signal, fs, config, gcis, pitch)
    out = io.ensure_dir(args.out_dir)
    io.write_frames_csv(out / "frames.csv", result.rows)
    summary = result.summary(config.methods)
    (out / "summary.tsv").write_text("\n".join(summary) + "\n")
    for m in config.methods:
        rows = [r for r in result.rows if r.method == m]
        if not rows:
            continue
        lo, counts = cog_histogram([r.cog_hz for r in rows], args.hist_bin, fs)
        io.write_histogram(out / f"cog_hist_{m}.tsv", lo, counts)
        feats = [GlottalFeatures(r.naq, r.h1h2_db, r.hrf_db, 0.0, r.frame_id)
                 for r in rows if r.correct and r.naq is not None]
        if feats:
            for name, (edges, weights) in feature_histograms(feats).items():
                io.write_table(out / f"feature_hist_{m}_{name}.tsv", ("bin_low", "weight"),
                               zip(edges[:-1], weights))
    print("\n".join(summary))
    return 0


def cmd_bench(args) -> int:
    config = _config(args)
    signal, fs, gcis, pitch = _load(args)
    if gcis is None:
        raise InvalidArgument("bench-robustness needs --gci-file")
    try:
        offsets = [float(x) for x in args.offsets.split(",") if x.strip()]
    except ValueError:
        raise InvalidArgument(f"cannot parse offsets {args.offsets!r}") from None
    table = bench_robustness(signal, fs, gcis, offsets, config, pitch)
    out = io.ensure_dir(args.out_dir)
    header = ("offset_frac", "rate_traditional", "rate_chirp")
    io.write_table(out / "robustness.tsv", header, table)
    print("\t".join(header))
    for row in table:
        print("\t".join(io.fmt(v) for v in row))
    return 0


SPEC_FIELDS = {"f0", "fs", "duration", "preset", "rho", "theta", "formants", "jitter", "seed"}


def parse_synth_spec(data: dict, seed: int | None = None) -> SyntheticSpec:
    """Build a SyntheticSpec from a JSON object, naming the offending field on error."""
    if not isinstance(data, dict):
        raise InvalidData("synth spec must be a JSON object")
    unknown = set(data) - SPEC_FIELDS
    if unknown:
        raise InvalidData(f"unknown spec field(s): {', '.join(sorted(unknown))}")
    kw = {}
    field = None
    try:
        for field in ("fs", "duration", "jitter"):
            if field in data:
                kw[field] = float(data[field])
        field = "f0"
        if "f0" in data:
            f0 = data["f0"]
            kw["f0"] = float(f0) if np.isscalar(f0) else tuple((float(t), float(f)) for t, f in f0)
        field = "seed"
        if "seed" in data:
            kw["seed"] = int(data["seed"])
        if seed is not None:
            kw["seed"] = seed
        field = "formants"
        if "formants" in data:
            kw["formants"] = tuple((float(c), float(b)) for c, b in data["formants"])
        field = "preset"
        if "preset" in data:
            if data["preset"] not in PRESETS:
                raise InvalidData(f"unknown preset {data['preset']!r}; choose from {sorted(PRESETS)}")
            kw["pulse"] = PRESETS[data["preset"]]
        field = "rho"
        if "rho" in data or "theta" in data:
            if "preset" in data:
                raise InvalidData("give either a preset or rho/theta")
            field = "theta"
            kw["pulse"] = PulseParams(float(data["rho"]), float(data["theta"]))
        field = None
        return SyntheticSpec(**kw)
    except (TypeError, ValueError, KeyError) as exc:
        name = field or "spec"
        raise InvalidData(f"invalid spec field '{name}': {exc}") from None


def cmd_synth(args) -> int:
    path = Path(args.spec)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidData(f"{path}: not valid JSON ({exc})") from None
    spec = parse_synth_spec(data, args.seed)
    u = synth_utterance(spec)
    out = io.ensure_dir(args.out_dir)
    stem = args.name or path.stem
    io.write_wav(out / f"{stem}.wav", u.signal, u.fs)
    io.write_gci_file(out / f"{stem}.gci", u.gci_times)
    io.write_pitch_file(out / f"{stem}.pitch", u.pitch_track())
    io.write_pulse_file(out / f"{stem}.pulses", [p.samples for p in u.pulses])
    print(f"wrote {stem}.wav, .gci, .pitch, .pulses to {out} ({len(u.gci_samples)} GCIs)")
    return 0


def cmd_radius_scan(args) -> int:
    config = _config(args)
    signal, fs, gcis, pitch = _load(args)
    if pitch is not None:
        T0 = pitch.at(args.time)
    elif gcis is not None and len(gcis) > 1:
        i = int(np.argmin(np.abs(gcis.instants - args.time)))
        T0 = float(np.diff(gcis.instants)[min(i, len(gcis) - 2)])
    else:
        raise InvalidArgument("radius-scan needs --f0, --pitch-file or --gci-file for T0")
    frame, res = radius_scan(signal, fs, args.time, T0, config)
    out = io.ensure_dir(args.out_dir)
    best = res.optimal_plateau if not res.degenerate else None
    comments = [
        f"frame_length {frame.length} bounds {io.fmt(res.bounds[0])} {io.fmt(res.bounds[1])}",
        f"optimal_radius {io.fmt(res.optimal_radius)}" + (" degenerate" if res.degenerate else ""),
    ]
    comments += [f"plateau {io.fmt(res.radii[s])} {io.fmt(res.radii[e])} n_d {v}"
                 + (" optimal" if (s, e, v) == best else "") for s, e, v in res.plateaus]
    io.write_table(out / "radius_scan.tsv", ("radius", "n_d"), zip(res.radii, res.n_d), comments)
    for c in comments:
        print(c)
    if args.roots:
        rs = compute_roots(frame, check=False)
        io.write_table(out / "roots.tsv", ("modulus", "angle_rad"),
                       zip(rs.moduli, np.angle(rs.roots)))
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "bench-robustness": cmd_bench,
    "synth": cmd_synth,
    "radius-scan": cmd_radius_scan,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CcdError, OSError) as exc:
        print(f"chirpccd {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
