"""Mixed-phase decomposition by complex cepstrum.

The anticausal (maximum-phase) part is rebuilt from the negative quefrencies,
the causal part from the origin and the positive quefrencies. Both are
cropped to the frame length: a frame of length L is a polynomial of degree
L-1, so neither factor can be longer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .spectral import (
    Cepstrum,
    SignalFrame,
    complex_cepstrum,
    default_fft_size,
    inverse_complex_cepstrum,
)


@dataclass(frozen=True)
class MixedPhaseDecomposition:
    anticausal: SignalFrame  # indices -(L-1)..0
    causal: SignalFrame  # indices 0..L-1
    cepstrum: Cepstrum
    radius_used: float = 1.0
    removed_delay: int = 0
    gain_sign: int = 1
    fft_size: int = 0
    frame_length: int = 0
    warnings: tuple[str, ...] = field(default=())
    search: object | None = None  # RadiusSearchResult for chirp runs

    @property
    def energy_ratio(self) -> float:
        """Anticausal energy over total component energy."""
        ea = float(np.sum(self.anticausal.samples**2))
        ec = float(np.sum(self.causal.samples**2))
        return ea / (ea + ec)


def modulate(samples: np.ndarray, radius: float, indices: np.ndarray | None = None) -> np.ndarray:
    """Multiply sample n by radius**(-n)."""
    if indices is None:
        indices = np.arange(len(samples))
    return np.asarray(samples, dtype=float) * np.power(float(radius), -indices.astype(float))


def decompose_at_radius(
    frame: SignalFrame, radius: float = 1.0, fft_size: int | None = None
) -> MixedPhaseDecomposition:
    """Split ``frame`` along the circle |z| = radius.

    The frame is modulated by radius**(-n), split at the quefrency origin,
    and each component is de-modulated by radius**(+n) on its own signed
    support. The radius**(-delay) factor left over from the circular-delay
    removal is folded into the causal side together with the gain.
    """
    if radius <= 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    L = frame.length
    if fft_size is None:
        fft_size = default_fft_size(L)
    work = frame.with_samples(modulate(frame.samples, radius), origin=0)
    cep = complex_cepstrum(work, fft_size)
    mid = fft_size // 2
    crop = min(L, mid)

    anti = inverse_complex_cepstrum(cep, "anticausal").samples[mid - crop + 1 : mid + 1]
    caus = inverse_complex_cepstrum(cep, "causal").samples[mid : mid + crop]
    if radius != 1.0:
        # undo the modulation: multiply by radius**(+n) on each support
        anti = modulate(anti, 1.0 / radius, np.arange(-(crop - 1), 1))
        caus = modulate(caus, 1.0 / radius, np.arange(crop)) * radius ** (-cep.delay)

    base = dict(sample_rate=frame.sample_rate, anchor_offset=frame.anchor_offset,
                position=frame.position, mode=frame.mode)
    return MixedPhaseDecomposition(
        anticausal=SignalFrame(anti, origin=crop - 1, **base),
        causal=SignalFrame(caus, origin=0, **base),
        cepstrum=cep,
        radius_used=float(radius),
        removed_delay=cep.delay,
        gain_sign=cep.sign,
        fft_size=fft_size,
        frame_length=L,
        warnings=cep.warnings,
    )


def decompose_traditional(frame: SignalFrame, fft_size: int | None = None) -> MixedPhaseDecomposition:
    """Split at the quefrency origin on the unit circle."""
    return decompose_at_radius(frame, 1.0, fft_size)


def reconstruct(d: MixedPhaseDecomposition) -> SignalFrame:
    """Convolve the components back together and restore delay and sign."""
    a, c = d.anticausal, d.causal
    if a.sample_rate != c.sample_rate or d.cepstrum.fft_size != d.fft_size:
        raise InvalidArgument("components do not come from the same decomposition")
    if a.origin != a.length - 1 or c.origin != 0:
        raise InvalidArgument("unexpected component supports")
    full = np.convolve(a.samples, c.samples)
    first = -(a.length - 1)  # signed index of full[0]
    idx = np.arange(d.frame_length) + d.removed_delay - first
    ok = (idx >= 0) & (idx < len(full))
    out = np.zeros(d.frame_length)
    out[ok] = full[idx[ok]]
    return SignalFrame(d.gain_sign * out, c.sample_rate, anchor_offset=c.anchor_offset,
                       position=c.position, mode=c.mode)
