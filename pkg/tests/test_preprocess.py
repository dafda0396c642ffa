import math

import numpy as np
import pytest

from vitalsign.errors import AllInvalid, IrrationalRatio, LeadingMissing, NonPositiveRate
from vitalsign.preprocess import (PreprocessConfig, Signal, SmoothingConfig, anti_aliasing_filter, clip_first_hour,
    forward_fill, moving_average, preprocess_pipeline, preprocess_record, rational_ratio, resample, truncate_tails)
from vitalsign.record import RawRecord


NaN = math.nan


def record(samples, rate=1.0):
    return RawRecord('p', samples, rate)


def naive_moving_average(samples, width):
    smoothed = []
    for t in range(len(samples)):
        window = samples[max(0, t - width + 1):t + 1]
        total = 0.0
        for value in window:
            total += value
        smoothed.append(total / len(window))
    return np.array(smoothed)


def test_truncate_tails():
    truncated = truncate_tails(record([0, 0, 80, 82, NaN]))

    assert truncated.samples.tolist() == [80, 82]
    assert truncated.start_offset_s == 2.0


def test_truncate_keeps_interior_zeros():
    assert truncate_tails(record([80, 0, 82])).samples.tolist() == [80, 0, 82]


def test_truncate_all_invalid():
    with pytest.raises(AllInvalid):
        truncate_tails(record([0, NaN, 0]))


def test_forward_fill():
    assert forward_fill(record([80, NaN, NaN, 84])).samples.tolist() == [80, 80, 80, 84]


def test_forward_fill_without_gaps_is_identity():
    original = record([80.0, 81.0, 82.0])
    assert forward_fill(original) == original


def test_forward_fill_leading_missing():
    with pytest.raises(LeadingMissing):
        forward_fill(record([NaN, 80]))


def test_moving_average_hand_example():
    smoothed = moving_average(Signal([1, 2, 3, 4], 1.0), SmoothingConfig(2))
    assert smoothed.samples.tolist() == [1, 1.5, 2.5, 3.5]


def test_moving_average_of_constant_is_exact():
    smoothed = moving_average(Signal(np.full(50, 83.7), 1.0), SmoothingConfig(7))
    assert (smoothed.samples == 83.7).all()


def test_moving_average_width_one_is_identity():
    signal = Signal([3.0, 1.0, 2.0], 1.0)
    assert moving_average(signal, SmoothingConfig(1)) == signal


def test_moving_average_matches_naive_loop(rng):
    for _ in range(20):
        samples = rng.normal(85, 10, int(rng.integers(1, 300)))
        width = int(rng.integers(1, 60))

        smoothed = moving_average(Signal(samples, 1.0), SmoothingConfig(width)).samples
        assert np.allclose(smoothed, naive_moving_average(samples, width), rtol=1e-12, atol=1e-9)

        # Every output lies within the range of the window it averages.
        for t in range(len(samples)):
            window = samples[max(0, t - width + 1):t + 1]
            assert window.min() - 1e-9 <= smoothed[t] <= window.max() + 1e-9


def test_smoothing_window_must_be_positive():
    with pytest.raises(ValueError):
        SmoothingConfig(0)


def test_rational_ratio():
    assert rational_ratio(1.0, 0.5) == (2, 1)
    assert rational_ratio(1.0, 0.17) == (100, 17)
    assert rational_ratio(1.0, 1.0) == (1, 1)


def test_irrational_ratio():
    with pytest.raises(IrrationalRatio):
        rational_ratio(1.0, math.pi)


def test_resample_to_same_rate_is_identity():
    signal = Signal([80.0, 81.0, 79.5], 1.0)
    assert resample(signal, 1.0) == signal


def test_resample_length():
    signal = Signal(np.full(9021, 80.0), 1 / 6)
    resampled = resample(signal, 1.0)

    assert len(resampled) == 54126
    assert resampled.sampling_rate_hz == 1.0


def test_resample_rejects_non_positive_rate():
    with pytest.raises(NonPositiveRate):
        resample(Signal([1.0, 2.0], 1.0), 0.0)


def test_resampled_sine_matches_analytic():
    frequency = 0.05
    times = np.arange(400) / 0.5
    resampled = resample(Signal(np.sin(2 * np.pi * frequency * times), 0.5), 1.0)

    trim = len(anti_aliasing_filter(2, 1)) // 2 + 1
    expected = np.sin(2 * np.pi * frequency * resampled.times)

    error = np.abs(resampled.samples - expected)[trim:-trim]
    assert error.max() <= 0.05


def test_clip_first_hour():
    assert len(clip_first_hour(Signal(np.ones(7200), 1.0))) == 3600
    assert len(clip_first_hour(Signal(np.ones(1800), 1.0))) == 1800

    clipped = clip_first_hour(Signal(np.ones(7200), 1.0))
    assert clipped.times[-1] <= 3600


def test_native_window_scales_with_rate():
    cfg = PreprocessConfig(window=300)

    assert cfg.native_window(1.0) == 300
    assert cfg.native_window(0.5) == 150
    assert cfg.native_window(0.17) == 51
    assert PreprocessConfig.one_hour_window().window == 3600


def test_clean_record_passes_through_unchanged(rng):
    samples = rng.normal(85, 5, 3600)
    signal = preprocess_pipeline(record(samples), PreprocessConfig(window=1))

    assert signal.sampling_rate_hz == 1.0
    assert np.array_equal(signal.samples, samples)


@pytest.mark.parametrize('rate', [1.0, 0.5, 0.17])
@pytest.mark.parametrize('clip_before_smoothing', [False, True])
def test_pipeline_output_is_clean(rng, rate, clip_before_smoothing):
    samples = rng.normal(85, 5, int(3600 * rate) + 40)
    samples[10:25] = NaN
    samples[:3] = 0

    cfg = PreprocessConfig(clip_before_smoothing=clip_before_smoothing)
    signal = preprocess_pipeline(record(samples, rate), cfg)

    assert signal.sampling_rate_hz == 1.0
    assert np.isfinite(signal.samples).all()
    assert len(signal) <= 3600


@pytest.mark.parametrize('rate, expected_length', [(0.5, 2), (0.17, 6)])
def test_single_sample_record_becomes_a_constant_signal(rate, expected_length):
    signal = preprocess_pipeline(record([80.0], rate))

    assert signal.sampling_rate_hz == 1.0
    assert np.array_equal(signal.samples, np.full(expected_length, 80.0))


def test_preprocessed_record_keeps_its_admission_offset():
    raw = RawRecord('p', [0.0, NaN, 80.0, 81.0, 82.0, 83.0, 0.0], 0.5, start_offset_s=10.0)
    cfg = PreprocessConfig(window=1)

    clean = preprocess_record(raw, cfg)

    # Two dropped leading samples at 0.5 Hz push the first kept sample 4 s later.
    assert clean.patient_id == 'p'
    assert clean.start_offset_s == 14.0
    assert clean.sampling_rate_hz == 1.0
    assert np.array_equal(clean.samples, preprocess_pipeline(raw, cfg).samples)
