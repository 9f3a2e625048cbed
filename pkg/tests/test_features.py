import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chirpccd.errors import EmptyOutput, FeatureUnavailable, InvalidArgument
from chirpccd.features import (
    GlottalFeatures,
    compute_h1h2,
    compute_hrf,
    compute_naq,
    extract_features,
    feature_histograms,
    fix_polarity,
    glottal_cycle,
    harmonic_amplitudes,
    histogram_l1,
    periodize,
)
from chirpccd.quality import classify_decomposition
from chirpccd.spectral import SignalFrame
from chirpccd.synth import PRESETS, gen_maxphase_pulse

FS = 16000.0


def frame(x, fs=FS):
    return SignalFrame(np.asarray(x, dtype=float), fs)


def triangle_derivative(rise, fall, period, amp=1.0):
    d = np.zeros(period)
    d[:rise] = amp / rise
    d[rise : rise + fall] = -amp / fall
    return d


def dense_naq(rise, fall, period, leak=0.99, factor=64):
    """NAQ of the analytic triangle sampled ``factor`` times more densely.

    The leak is matched per unit time, so the integrator has the same time
    constant in seconds as the one applied at the base rate.
    """
    d = np.repeat(triangle_derivative(rise, fall, period), factor)
    d = d - d.mean()
    a = leak ** (1.0 / factor)
    y = np.empty_like(d)
    acc = 0.0
    for i, v in enumerate(d):
        acc = a * acc + v / factor
        y[i] = acc
    return np.ptp(y) / (-d.min() * period)


def tones(f0, amps, duration=1.0, fs=FS):
    t = np.arange(int(duration * fs)) / fs
    return sum(a * np.sin(2 * np.pi * (k + 1) * f0 * t) for k, a in enumerate(amps))


def dtft_at(x, f, fs=FS):
    n = np.arange(len(x))
    return abs(np.sum(x * np.exp(-2j * np.pi * f * n / fs)))


def pulse_cycle(preset, T0=0.005):
    p = gen_maxphase_pulse(PRESETS[preset], T0, FS).samples
    cycle = np.zeros(int(round(T0 * FS)))
    cycle[-len(p) :] = p
    return cycle


# NAQ


@pytest.mark.parametrize("rise,fall,period", [(40, 10, 80), (30, 20, 100), (50, 5, 160)])
def test_naq_triangle_closed_form(rise, fall, period):
    # pure integration: the flow is the triangle itself, so NAQ = fall / period
    d = triangle_derivative(rise, fall, period, 3.0)
    got = compute_naq(frame(d), period / FS, leak=1.0)
    assert got == pytest.approx(fall / period, rel=1e-9)


@pytest.mark.parametrize("rise,fall,period", [(40, 10, 80), (30, 20, 100), (50, 5, 160)])
def test_naq_triangle_dense_oracle(rise, fall, period):
    d = triangle_derivative(rise, fall, period)
    got = compute_naq(frame(d), period / FS)
    assert got == pytest.approx(dense_naq(rise, fall, period), rel=0.01)


@given(st.floats(1e-3, 1e3))
def test_naq_scale_invariant(alpha):
    d = triangle_derivative(30, 12, 90)
    assert compute_naq(frame(alpha * d), 90 / FS) == pytest.approx(compute_naq(frame(d), 90 / FS), rel=1e-12)


def test_naq_needs_negative_peak():
    with pytest.raises(FeatureUnavailable):
        compute_naq(frame(np.abs(np.sin(np.arange(50)))), 50 / FS)
    with pytest.raises(InvalidArgument):
        compute_naq(frame(triangle_derivative(5, 5, 20)), 0.0)


def test_naq_orders_phonation_types():
    naq = {p: compute_naq(frame(pulse_cycle(p)), 0.005) for p in PRESETS}
    assert naq["tense"] < naq["modal"] < naq["lax"]


def test_polarity():
    d = triangle_derivative(10, 5, 30)
    assert np.array_equal(fix_polarity(d), d)
    assert np.array_equal(fix_polarity(-d), d)


# H1-H2


def test_h1h2_two_to_one():
    assert compute_h1h2(frame(tones(200, [1, 0.5])), 200) == pytest.approx(6.0206, abs=0.1)


def test_h1h2_equal_harmonics():
    assert compute_h1h2(frame(tones(150, [1, 1])), 150) == pytest.approx(0.0, abs=0.1)


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_h1h2_of_pulse_matches_dense_dft(preset):
    cycle = pulse_cycle(preset)
    f0 = FS / len(cycle)
    ref = 20 * np.log10(dtft_at(cycle, f0) / dtft_at(cycle, 2 * f0))
    assert compute_h1h2(frame(periodize(cycle)), f0) == pytest.approx(ref, abs=0.5)


def test_h1h2_missing_harmonic():
    with pytest.raises(FeatureUnavailable):
        compute_h1h2(frame(tones(3700, [1, 0.5])), 3700)  # 2 f0 band crosses fs/2
    with pytest.raises(FeatureUnavailable):
        compute_h1h2(frame(tones(200, [1.0])), 200)  # nothing near 400 Hz


# HRF


def test_hrf_balanced():
    assert compute_hrf(frame(tones(1000, [1, 0.5, 0.5])), 1000) == pytest.approx(0.0, abs=0.1)


def test_hrf_pure_tone_hits_floor():
    assert compute_hrf(frame(tones(1000, [1.0])), 1000) == -60.0


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_hrf_of_pulse_matches_dense_dft(preset):
    cycle = pulse_cycle(preset)
    f0 = FS / len(cycle)
    n_harm = len(harmonic_amplitudes(frame(periodize(cycle)), f0))
    amps = [dtft_at(cycle, k * f0) for k in range(1, n_harm + 1)]
    ref = 20 * np.log10(sum(amps[1:]) / amps[0])
    assert compute_hrf(frame(periodize(cycle)), f0) == pytest.approx(ref, abs=0.5)


def test_hrf_needs_three_harmonics():
    with pytest.raises(FeatureUnavailable):
        compute_hrf(frame(tones(3000, [1.0, 0.5])), 3000)


# extract_features


def anticausal_of(cycle):
    return SignalFrame(np.concatenate((np.zeros(7), cycle)), FS, origin=len(cycle) + 6)


def test_extract_features():
    cycle = pulse_cycle("modal")
    f = extract_features(anticausal_of(cycle), 0.005, frame_id=3, label=classify_decomposition(1500))
    assert f.frame_id == 3 and f.f0 == pytest.approx(200)
    assert f.naq == pytest.approx(compute_naq(frame(cycle), 0.005))
    assert np.isfinite([f.h1h2, f.hrf]).all() and f.naq > 0


def test_features_scale_invariant():
    cycle = pulse_cycle("lax")
    a = extract_features(anticausal_of(cycle), 0.005)
    b = extract_features(anticausal_of(2.5 * cycle), 0.005)
    assert (b.naq, b.h1h2, b.hrf) == pytest.approx((a.naq, a.h1h2, a.hrf), rel=1e-9)


def test_extraction_only_from_correct_frames():
    with pytest.raises(InvalidArgument):
        extract_features(anticausal_of(pulse_cycle("modal")), 0.005, label=classify_decomposition(4000))


def test_cycle_ends_at_origin():
    a = SignalFrame(np.arange(-20.0, 1.0), FS, origin=20)
    cyc = glottal_cycle(a, 5 / FS)
    assert len(cyc) == 5 and abs(cyc[0]) == 4.0 and cyc[-1] == 0.0
    with pytest.raises(InvalidArgument):
        glottal_cycle(a, 2 / FS)


# histograms


def feats(values, correct=True):
    lab = classify_decomposition(1000 if correct else 4000)
    return [GlottalFeatures(v, v, v, 200.0, i, lab) for i, v in enumerate(values)]


def test_single_frame_is_one_unit_bin():
    h = feature_histograms(feats([0.1]), 5)
    for edges, w in h.values():
        assert len(edges) == 6 and w.sum() == 1.0 and np.count_nonzero(w) == 1


def test_incorrect_frames_are_dropped():
    h = feature_histograms(feats([0.1, 0.2]) + feats([5.0], correct=False), 2)
    edges, _ = h["naq"]
    assert edges[-1] == pytest.approx(0.2)
    with pytest.raises(EmptyOutput):
        feature_histograms(feats([1.0], correct=False))
    with pytest.raises(EmptyOutput):
        feature_histograms([])


def test_shared_edges_and_l1():
    edges = {n: np.linspace(0, 1, 5) for n in ("naq", "h1h2", "hrf")}
    a = feature_histograms(feats([0.1, 0.1, 0.6, 0.9]), edges)
    b = feature_histograms(feats([0.1, 0.6, 0.6, 0.9]), edges)
    assert histogram_l1(a["naq"], b["naq"]) == pytest.approx(0.5)
    assert histogram_l1(a["naq"], a["naq"]) == 0.0
    with pytest.raises(InvalidArgument):
        histogram_l1(a["naq"], (np.linspace(0, 2, 5), a["naq"][1]))


def test_unknown_feature_name():
    with pytest.raises(InvalidArgument):
        feats([0.1])[0].value("oq")
