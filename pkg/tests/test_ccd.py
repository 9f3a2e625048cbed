from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpccd.ccd import decompose_at_radius, decompose_traditional, reconstruct
from chirpccd.errors import InvalidArgument
from chirpccd.spectral import SignalFrame, analyze
from chirpccd.synth import PRESETS, gen_maxphase_pulse
from chirpccd.zzt import zzt_decompose

from oracles import (
    aligned_nrms,
    corpus,
    label,
    nrms,
    offset_frames,
    poly_from_roots,
    random_roots,
    rate_at,
    windowed_pulse,
)

FS = 16000.0
OFFSETS = (-0.25, -0.1875, -0.125, -0.0625, 0.0, 0.0625, 0.125, 0.1875, 0.25)


def frame(x):
    return SignalFrame(np.asarray(x, dtype=float), FS)


def rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b)


@pytest.fixture(scope="module")
def utterances():
    return {f0: [corpus(f0, p, duration=1.0, seed=i) for i, p in enumerate(PRESETS)]
            for f0 in (100.0, 200.0)}


# decompose_traditional


def test_minimum_phase_frame_has_no_anticausal_energy():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = poly_from_roots(random_roots(rng, 40, 0.1, 0.9))
        d = decompose_traditional(frame(x))
        a = d.anticausal.samples
        assert a[-1] == pytest.approx(1.0)
        assert np.sum(a[:-1] ** 2) <= 1e-6 * np.sum(x**2)


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_maximum_phase_pulse_goes_to_anticausal(preset):
    p = gen_maxphase_pulse(PRESETS[preset], 0.01, FS).samples
    d = decompose_traditional(frame(p))
    c = d.causal.samples
    assert np.sum(c[1:] ** 2) <= 1e-6 * c[0] ** 2
    a = d.gain_sign * d.anticausal.samples[-len(p) :]
    assert np.corrcoef(a, p)[0, 1] >= 0.999


def test_unit_circle_split_matches_root_split_on_corpus(utterances):
    # sample-wise agreement with the explicit factorisation of the same frame
    worst = 0.0
    for f0, utts in utterances.items():
        for u in utts:
            for _, fr, _, _, _ in list(offset_frames(u, 0.0))[::4]:
                d, z = decompose_traditional(fr), zzt_decompose(fr)
                assert d.removed_delay == z.removed_delay
                assert d.gain_sign == z.gain_sign
                worst = max(worst, nrms(d.anticausal.samples, z.anticausal.samples))
    assert worst <= 0.05


@pytest.mark.parametrize("f0", [100.0, 200.0])
def test_gci_centred_frame_recovers_pulse(utterances, f0):
    errors = []
    for u in utterances[f0]:
        for k, fr, _, c, w in offset_frames(u, 0.0):
            a = decompose_traditional(fr).anticausal.samples
            errors.append(aligned_nrms(a, windowed_pulse(u, k, c, w), 3))
    assert max(errors) <= 0.05


def test_traditional_radius_is_one():
    d = decompose_traditional(frame([1.0, -2.5, 1.0]))
    assert d.radius_used == 1.0
    with pytest.raises(InvalidArgument):
        decompose_at_radius(frame([1.0, 0.5]), 0.0)


# reconstruct


def test_impulse_reconstructs():
    d = decompose_traditional(frame([0, 0, 3.0, 0, 0]))
    assert np.allclose(reconstruct(d).samples, [0, 0, 3.0, 0, 0], atol=1e-12)


def test_single_zero_reconstructs():
    d = decompose_traditional(frame([1, -0.5]), 4096)
    assert np.max(np.abs(reconstruct(d).samples - [1, -0.5])) <= 1e-6


def test_mismatched_components():
    d = decompose_traditional(frame([1, -0.5, 0.2]), 64)
    other = decompose_traditional(frame([1, -0.5, 0.2]), 128)
    with pytest.raises(InvalidArgument):
        reconstruct(replace(d, cepstrum=other.cepstrum))


def test_corpus_frames_reconstruct(utterances):
    # 500 frames spread over pitch, phonation and window offset
    rng = np.random.default_rng(0)
    pool = [fr for utts in utterances.values() for u in utts
            for frac in OFFSETS for _, fr, _, _, _ in offset_frames(u, frac)]
    picks = rng.choice(len(pool), 500, replace=False)
    worst = max(rel(reconstruct(decompose_traditional(pool[i])).samples, pool[i].samples)
                for i in picks)
    assert worst <= 1e-4


# invariants


def test_component_spectra_multiply_to_frame_spectrum(utterances):
    for u in utterances[200.0]:
        for _, fr, _, _, _ in offset_frames(u, 0.0625):
            d = decompose_traditional(fr)
            n = d.fft_size
            A = np.abs(analyze(d.anticausal, n).bins)
            C = np.abs(analyze(d.causal, n).bins)
            X = np.abs(analyze(fr, n).bins)
            assert np.max(np.abs(A * C - X)) <= 1e-4 * np.max(X)


def test_anticausal_stays_left_of_centre(utterances):
    # put the anticausal estimate back in frame time: its origin lands on
    # frame sample -removed_delay
    for f0, utts in utterances.items():
        for u in utts:
            for _, fr, T0, _, _ in offset_frames(u, 0.0):
                correct, _, d = label(fr, T0, "traditional")
                if not correct:
                    continue
                a = d.anticausal.samples
                pos = np.arange(-(len(a) - 1), 1) - d.removed_delay
                beyond = pos > fr.length // 2
                assert np.sum(a[beyond] ** 2) <= 0.01 * np.sum(a**2)


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
@settings(max_examples=30)
def test_scale_covariance(seed, alpha):
    # the gain lives on the causal side: it scales, the anticausal part
    # (1 at its origin) is unchanged
    rng = np.random.default_rng(seed)
    x = poly_from_roots(random_roots(rng, 20, 0.5, 1.6), rng.uniform(0.5, 2))
    d1 = decompose_traditional(frame(x))
    d2 = decompose_traditional(frame(alpha * x))
    a1, c1 = d1.anticausal.samples, d1.causal.samples
    assert np.max(np.abs(d2.anticausal.samples - a1)) <= 1e-8 * np.max(np.abs(a1))
    assert np.max(np.abs(d2.causal.samples - alpha * c1)) <= 1e-8 * alpha * np.max(np.abs(c1))


@pytest.mark.parametrize("f0", [100.0, 200.0])
def test_correct_rate_peaks_at_the_gci(utterances, f0):
    rates = dict((frac, rate_at(utterances[f0], frac, "traditional")[0]) for frac in OFFSETS)
    assert rates[0.0] >= max(rates.values()) - 0.03
    for side in (1, -1):
        seq = [rates[side * abs(o)] for o in OFFSETS if o >= 0]
        assert all(b <= a + 0.03 for a, b in zip(seq, seq[1:]))
