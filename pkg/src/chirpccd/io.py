"""Readers and writers for audio, marker, pitch, pulse, CSV and table files.

Floats are printed with 6 significant digits so that outputs diff cleanly.
"""

from __future__ import annotations

import csv
import wave
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import InvalidData
from .framing import GciTrack, PitchTrack

FLOAT_FORMAT = "{:.6g}"
TIME_FORMAT = "{:.6f}"  # microseconds: sample-exact at audio rates for any duration


def fmt(x) -> str:
    return FLOAT_FORMAT.format(float(x))


def fmt_time(t) -> str:
    return TIME_FORMAT.format(float(t))


def read_wav(path) -> tuple[np.ndarray, float]:
    """16-bit PCM mono only; samples scaled to [-1, 1)."""
    try:
        with wave.open(str(path), "rb") as w:
            if w.getnchannels() != 1:
                raise InvalidData(f"{path}: expected mono audio, got {w.getnchannels()} channels")
            if w.getsampwidth() != 2:
                raise InvalidData(f"{path}: expected 16-bit PCM, got {8 * w.getsampwidth()}-bit samples")
            if w.getcomptype() != "NONE":
                raise InvalidData(f"{path}: compressed WAV ({w.getcomptype()}) is not supported")
            fs = float(w.getframerate())
            raw = w.readframes(w.getnframes())
    except wave.Error as exc:
        raise InvalidData(f"{path}: not a PCM WAV file ({exc})") from exc
    return np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0, fs


def to_pcm16(signal) -> np.ndarray:
    x = np.clip(np.asarray(signal, dtype=float), -1.0, 32767 / 32768)
    return np.round(x * 32768.0).astype("<i2")


def write_wav(path, signal, sample_rate: float) -> None:
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(round(sample_rate)))
        w.writeframes(to_pcm16(signal).tobytes())


def _data_lines(path):
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if text:
                yield lineno, text


def read_gci_file(path) -> GciTrack:
    """One time in seconds per line; '#' starts a comment."""
    times = []
    for lineno, text in _data_lines(path):
        try:
            times.append(float(text))
        except ValueError:
            raise InvalidData(f"{path}:{lineno}: cannot parse GCI time {text!r}") from None
    try:
        return GciTrack(np.array(times))
    except InvalidData as exc:
        raise InvalidData(f"{path}: {exc}") from None


def write_gci_file(path, instants) -> None:
    with open(path, "w") as fh:
        fh.write("# GCI times in seconds\n")
        for t in instants:
            fh.write(fmt_time(t) + "\n")


def read_pitch_file(path) -> PitchTrack:
    """Lines of "time_s<TAB>T0_s"."""
    times, periods = [], []
    for lineno, text in _data_lines(path):
        parts = text.split("\t")
        if len(parts) != 2:
            raise InvalidData(f"{path}:{lineno}: expected 'time<TAB>T0', got {text!r}")
        try:
            times.append(float(parts[0]))
            periods.append(float(parts[1]))
        except ValueError:
            raise InvalidData(f"{path}:{lineno}: non-numeric pitch entry {text!r}") from None
    try:
        return PitchTrack(np.array(times), np.array(periods))
    except InvalidData as exc:
        raise InvalidData(f"{path}: {exc}") from None


def write_pitch_file(path, pairs) -> None:
    with open(path, "w") as fh:
        for t, T0 in pairs:
            fh.write(f"{fmt_time(t)}\t{fmt_time(T0)}\n")


def write_pulse_file(path, pulses) -> None:
    """One pulse per line, samples separated by tabs."""
    with open(path, "w") as fh:
        for p in pulses:
            fh.write("\t".join(fmt(v) for v in p) + "\n")


def read_pulse_file(path) -> list[np.ndarray]:
    out = []
    for lineno, text in _data_lines(path):
        try:
            out.append(np.array([float(v) for v in text.split("\t")]))
        except ValueError:
            raise InvalidData(f"{path}:{lineno}: non-numeric pulse sample") from None
    return out


@dataclass(frozen=True)
class FrameResult:
    frame_id: int
    time_s: float
    method: str
    radius_used: float
    n_d: int
    cog_hz: float
    correct: bool
    naq: float | None = None
    h1h2_db: float | None = None
    hrf_db: float | None = None


CSV_FIELDS = tuple(f.name for f in fields(FrameResult))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return fmt(value)


def write_frames_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in rows:
            w.writerow([_cell(getattr(r, name)) for name in CSV_FIELDS])


def read_frames_csv(path) -> list[FrameResult]:
    def opt(s):
        return float(s) if s != "" else None

    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_FIELDS:
            raise InvalidData(f"{path}: unexpected CSV header {header}")
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(CSV_FIELDS):
                raise InvalidData(f"{path}:{lineno}: expected {len(CSV_FIELDS)} columns")
            try:
                out.append(FrameResult(
                    int(row[0]), float(row[1]), row[2], float(row[3]), int(row[4]),
                    float(row[5]), row[6] == "1", opt(row[7]), opt(row[8]), opt(row[9]),
                ))
            except ValueError:
                raise InvalidData(f"{path}:{lineno}: malformed row") from None
    return out


def write_table(path, header: tuple[str, ...], rows, comments=()) -> None:
    """Tab-separated table; ``comments`` become leading '#' lines."""
    with open(path, "w") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_cell(v) for v in row) + "\n")


def write_histogram(path, bin_low, counts) -> None:
    write_table(path, ("bin_low_hz", "count"), zip(bin_low, counts))


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
