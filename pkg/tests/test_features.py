import math

import numpy as np
import pytest

from vitalsign.errors import DimensionMismatch, TooFewRows, TooShort
from vitalsign.features import (FEATURE_COUNT, FEATURE_NAMES, FeatureVector, Normalizer, apply_normalizer,
    averaged_power, energy_spectral_density, extract_features, extract_matrix, fit_normalizer, periodogram)
from vitalsign.preprocess import Signal


VALUE_FEATURES = FEATURE_NAMES[:10]


def naive_features(samples):
    """ Straightforward loop-based reference for every feature. """

    values = [float(value) for value in samples]
    n = len(values)

    mean = sum(values) / n
    deviations = [value - mean for value in values]
    m2 = sum(d ** 2 for d in deviations) / n
    m3 = sum(d ** 3 for d in deviations) / n
    m4 = sum(d ** 4 for d in deviations) / n
    variance = sum(d ** 2 for d in deviations) / (n - 1)

    ordered = sorted(values)
    median = ordered[n // 2] if n % 2 else (ordered[n // 2 - 1] + ordered[n // 2]) / 2

    counts = {}
    for value in values:
        rounded = math.floor(value + 0.5)
        counts[rounded] = counts.get(rounded, 0) + 1
    best = max(counts.values())
    mode = min(value for value, count in counts.items() if count == best)

    power = sum(value * value for value in values) / n

    return {
        'max': max(values),
        'min': min(values),
        'mean': mean,
        'median': median,
        'mode': mode,
        'std': math.sqrt(variance),
        'variance': variance,
        'range': max(values) - min(values),
        'kurtosis': m4 / m2 ** 2,
        'skewness': m3 / m2 ** 1.5,
        'averaged_power': power,

        # Parseval: the spectral mean power equals the time-domain one.
        'energy_spectral_density': power,
    }


def random_signal(rng):
    length = int(rng.integers(16, 4097))
    rate = float(rng.choice([0.17, 0.5, 1.0]))
    return Signal(rng.normal(85, 8, length) + rng.exponential(3, length), rate)


def test_matches_naive_reference(rng):
    for _ in range(200):
        signal = random_signal(rng)
        extracted = extract_features(signal).as_dict()

        for name, expected in naive_features(signal.samples).items():
            assert extracted[name] == pytest.approx(expected, rel=1e-9, abs=1e-9), name


def test_parseval(rng):
    for _ in range(100):
        signal = random_signal(rng)
        assert energy_spectral_density(signal) == pytest.approx(averaged_power(signal), rel=1e-6)


def test_periodogram_against_explicit_dft(rng):
    samples = rng.normal(size=24)
    signal = Signal(samples, 0.5)

    n = len(samples)
    index = np.arange(n)
    explicit = [(2.0 / n) * abs(np.sum(samples * np.exp(-2j * np.pi * k * index / n))) ** 2 for k in range(n)]

    _, power = periodogram(signal)
    assert np.allclose(power, explicit, rtol=1e-10)


def test_constant_signal():
    features = extract_features(Signal(np.full(10, 72.0), 1.0))

    for name in ('max', 'min', 'mean', 'median', 'mode'):
        assert features[name] == 72.0
    for name in ('std', 'variance', 'range', 'skewness', 'kurtosis'):
        assert features[name] == 0.0

    assert features['averaged_power'] == 72.0 ** 2
    assert features['energy_spectral_density'] == pytest.approx(72.0 ** 2, rel=1e-12)


def test_hand_example():
    features = extract_features(Signal([1, 2, 3, 4], 1.0))

    assert features['mean'] == 2.5
    assert features['median'] == 2.5
    assert features['range'] == 3
    assert features['variance'] == pytest.approx(5 / 3)
    assert features['averaged_power'] == 7.5
    assert features['mode'] == 1


def test_averaged_power_examples():
    assert averaged_power(Signal([3.0], 1.0)) == 9.0
    assert averaged_power(Signal([1.0, -1.0, 1.0, -1.0], 1.0)) == 1.0


def test_sinusoid_power():
    amplitude = 4.0
    index = np.arange(400)
    signal = Signal(amplitude * np.sin(2 * np.pi * 5 * index / 400), 1.0)

    assert energy_spectral_density(signal) == pytest.approx(amplitude ** 2 / 2, rel=1e-9)


def test_too_short():
    with pytest.raises(TooShort):
        extract_features(Signal([80.0, 81.0, 82.0], 1.0))


def test_value_features_are_permutation_invariant(rng):
    for _ in range(20):
        signal = random_signal(rng)
        shuffled = Signal(rng.permutation(signal.samples), signal.sampling_rate_hz)

        original = extract_features(signal)
        permuted = extract_features(shuffled)
        for name in VALUE_FEATURES:
            assert permuted[name] == pytest.approx(original[name], rel=1e-9, abs=1e-9), name


def test_affine_response(rng):
    scale = 2.0

    for _ in range(20):
        samples = rng.integers(55, 130, int(rng.integers(16, 600))).astype(np.float64)
        original = extract_features(Signal(samples, 1.0))
        scaled = extract_features(Signal(scale * samples, 1.0))

        for name in ('max', 'min', 'mean', 'median', 'mode', 'std', 'range'):
            assert scaled[name] == pytest.approx(scale * original[name], rel=1e-9), name
        for name in ('variance', 'averaged_power', 'energy_spectral_density'):
            assert scaled[name] == pytest.approx(scale ** 2 * original[name], rel=1e-9), name
        for name in ('skewness', 'kurtosis'):
            assert scaled[name] == pytest.approx(original[name], rel=1e-9, abs=1e-12), name


def test_feature_vector_identities(rng):
    values = extract_features(random_signal(rng)).values.copy()

    broken = values.copy()
    broken[FEATURE_NAMES.index('range')] += 1.0
    with pytest.raises(ValueError):
        FeatureVector(broken)

    # Normalized vectors only promise finiteness.
    assert FeatureVector(broken, normalized=True)['range'] == broken[7]

    with pytest.raises(DimensionMismatch):
        FeatureVector(values[:5])


def test_extract_matrix(rng):
    signals = [random_signal(rng) for _ in range(3)]
    matrix = extract_matrix(signals)

    assert matrix.shape == (3, FEATURE_COUNT)
    assert np.array_equal(matrix[1], extract_features(signals[1]).values)


def test_normalizer_two_rows():
    rows = np.vstack([np.zeros(FEATURE_COUNT), np.full(FEATURE_COUNT, 2.0)])
    normalizer = fit_normalizer(rows)

    assert np.allclose(normalizer.center, 1.0)
    assert np.allclose(normalizer.scale, math.sqrt(2.0))


def test_normalizer_constant_column(rng):
    rows = rng.normal(size=(10, FEATURE_COUNT))
    rows[:, 3] = 5.0
    normalizer = fit_normalizer(rows)

    assert normalizer.center[3] == 5.0
    assert normalizer.scale[3] == 1.0


def test_normalizer_self_consistency(rng):
    rows = rng.normal(80, 12, size=(50, FEATURE_COUNT))
    normalized = fit_normalizer(rows).apply_matrix(rows)

    assert np.abs(normalized.mean(axis=0)).max() < 1e-9
    assert np.allclose(normalized.std(axis=0, ddof=1), 1.0)


def test_normalizer_needs_two_rows():
    with pytest.raises(TooFewRows):
        fit_normalizer(np.ones((1, FEATURE_COUNT)))


def test_identity_normalizer(rng):
    vector = extract_features(random_signal(rng))
    normalized = apply_normalizer(Normalizer.identity(), vector)

    assert normalized.normalized
    assert np.array_equal(normalized.values, vector.values)


def test_normalizer_round_trips_through_dict(rng):
    normalizer = fit_normalizer(rng.normal(size=(5, FEATURE_COUNT)))
    restored = Normalizer.from_dict(normalizer.to_dict())

    assert np.array_equal(restored.center, normalizer.center)
    assert np.array_equal(restored.scale, normalizer.scale)
