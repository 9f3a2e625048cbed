"""Zeros-of-the-z-transform decomposition by explicit root finding.

This is a reference for short frames only: companion-matrix root finding on
long windowed frames is badly conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ccd import MixedPhaseDecomposition
from .errors import BoundaryDegenerate, InvalidArgument, OracleUnavailable
from .spectral import Cepstrum, SignalFrame

MAX_LENGTH = 512
BOUNDARY_TOL = 1e-9
RESIDUAL_TOL = 1e-6
EDGE_TOL = 1e-12  # edge samples this small relative to the peak count as zero


@dataclass(frozen=True)
class RootSet:
    """X(z) = gain * z**(-leading_delay) * prod(1 - r z**-1) over ``roots``."""

    roots: np.ndarray
    gain: float
    leading_delay: int
    length: int  # of the original frame

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.roots)

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = self.gain * z ** (-self.leading_delay)
        for r in self.roots:
            out = out * (1 - r / z)
        return out

    def coefficients(self) -> np.ndarray:
        """Frame samples rebuilt from the factorisation."""
        n = _grid_size(self.length)
        return np.real(np.fft.ifft(self.evaluate(_unit_circle(n))))[: self.length]


def _grid_size(length: int) -> int:
    return 1 << int(np.ceil(np.log2(2 * max(length, 1))))


def _unit_circle(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def _factor(roots: np.ndarray, n: int, anticausal: bool) -> np.ndarray:
    """Coefficients of prod(1 - z/r) (anticausal) or prod(1 - r/z) (causal).

    Multiplying many roots out with np.poly loses most of its digits once the
    degree reaches the low hundreds. Evaluating the product on the unit
    circle is accurate factor by factor, and an n-point inverse DFT then
    returns the coefficients exactly as long as the degree is below n.
    The anticausal result is ordered by increasing power of z.
    """
    z = _unit_circle(n)
    vals = np.ones(n, dtype=complex)
    for r in roots:
        vals *= (1 - z / r) if anticausal else (1 - r / z)
    coef = np.fft.fft(vals) / n if anticausal else np.fft.ifft(vals)
    return np.real(coef[: len(roots) + 1])


def _polyval_z(samples: np.ndarray, z: np.ndarray) -> np.ndarray:
    n = np.arange(len(samples))
    return np.array([np.sum(samples * zk ** (-n)) for zk in z])


def compute_roots(frame: SignalFrame, check: bool = True) -> RootSet:
    """Factor the frame polynomial sum x(n) z**-n.

    Leading and trailing zero samples are trimmed first (they would put
    roots at the origin or at infinity) and the leading ones come back as a
    pure delay. Window tapers leave edge samples of order 1e-17 rather than
    exact zeros, so anything below 1e-12 of the peak counts as zero.

    The factorisation is checked at 16 points on |z| = 1.1; a residual above
    1e-6 relative raises ``OracleUnavailable``. Passing this check does not
    make multiplying the roots back out accurate for long frames, so callers
    comparing sample values should also check the rebuilt frame.
    """
    x = np.asarray(frame.samples, dtype=float)
    if x.size > MAX_LENGTH:
        raise InvalidArgument(f"frame of {x.size} samples exceeds the oracle limit {MAX_LENGTH}")
    peak = np.max(np.abs(x)) if x.size else 0.0
    if not peak > 0:
        raise InvalidArgument("all-zero frame has no factorisation")
    nz = np.flatnonzero(np.abs(x) > EDGE_TOL * peak)
    core = x[nz[0] : nz[-1] + 1]
    try:
        roots = np.roots(core) if core.size > 1 else np.array([], dtype=complex)
    except np.linalg.LinAlgError as exc:
        raise OracleUnavailable(f"root finding failed: {exc}") from exc
    if not np.all(np.isfinite(roots)):
        raise OracleUnavailable("root finder returned non-finite roots")
    rs = RootSet(roots.astype(complex), float(core[0]), int(nz[0]), x.size)
    if check:
        z = 1.1 * np.exp(2j * np.pi * (np.arange(16) + 0.5) / 16)
        ref = _polyval_z(x, z)
        err = np.max(np.abs(rs.evaluate(z) - ref)) / np.max(np.abs(ref))
        if err > RESIDUAL_TOL:
            raise OracleUnavailable(f"factorisation residual {err:.2e} above {RESIDUAL_TOL}")
    return rs


def count_roots_in_annulus(rs: RootSet, r_inner: float, r_outer: float) -> int:
    """Number of roots with modulus in (r_inner, r_outer]."""
    if not r_inner < r_outer:
        raise InvalidArgument("need r_inner < r_outer")
    m = rs.moduli
    return int(np.count_nonzero((m > r_inner) & (m <= r_outer)))


def zzt_decompose(frame: SignalFrame, radius: float = 1.0, rs: RootSet | None = None) -> MixedPhaseDecomposition:
    """Split the roots along |z| = radius.

    The anticausal factor is prod(1 - z / r) over roots outside the circle,
    so its value at index 0 is 1 and it occupies indices -(n_out)..0. The
    causal factor collects the roots inside together with all of the gain.
    Sign, delay and output layout follow the cepstral decomposition so the
    two can be compared sample by sample.
    """
    if radius <= 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    if rs is None:
        rs = compute_roots(frame)
    m = rs.moduli
    if np.any(np.abs(m - radius) <= BOUNDARY_TOL):
        raise BoundaryDegenerate(f"a root lies on the circle |z| = {radius}")
    inside, outside = rs.roots[m < radius], rs.roots[m > radius]
    L = rs.length

    # (1 - r z**-1) = -r z**-1 (1 - z/r) for every root outside the circle
    n_out = outside.size
    gain = rs.gain * np.real(np.prod(-outside))
    sign = -1 if gain < 0 else 1
    n = _grid_size(L)
    anti = np.zeros(L)
    anti[L - 1 - n_out :] = _factor(outside, n, anticausal=True)[::-1]  # z**k at index -k
    caus = np.zeros(L)
    caus[: inside.size + 1] = abs(gain) * _factor(inside, n, anticausal=False)
    delay = -(rs.leading_delay + n_out)

    base = dict(sample_rate=frame.sample_rate, anchor_offset=frame.anchor_offset,
                position=frame.position, mode=frame.mode)
    return MixedPhaseDecomposition(
        anticausal=SignalFrame(anti, origin=L - 1, **base),
        causal=SignalFrame(caus, origin=0, **base),
        cepstrum=Cepstrum(np.zeros(1), 0, frame.sample_rate, delay, float(delay), sign),
        radius_used=float(radius),
        removed_delay=delay,
        gain_sign=sign,
        fft_size=0,
        frame_length=L,
        warnings=(),
    )
