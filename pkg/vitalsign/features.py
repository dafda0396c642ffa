"""
Feature extraction -- describes each preprocessed heart-rate signal by twelve statistical and
signal-based features, and learns the per-feature normalization applied before classification.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import TooShort, TooFewRows, DimensionMismatch


log = logging.getLogger(__name__)

# Column order of every feature vector, feature matrix and feature CSV.
FEATURE_NAMES = (
    'max', 'min', 'mean', 'median', 'mode', 'std', 'variance', 'range',
    'kurtosis', 'skewness', 'averaged_power', 'energy_spectral_density',
)
FEATURE_COUNT = len(FEATURE_NAMES)

# Kurtosis and skewness need at least this many samples to mean anything.
MINIMUM_SIGNAL_LENGTH = 4

# Relative slack allowed when checking the identities between features.
IDENTITY_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """ The twelve features of one record, in FEATURE_NAMES order.

    Raw vectors satisfy max ≥ mean ≥ min, range = max − min and variance = std²; normalized
    vectors (normalized=True) only promise finite values.
    """

    values: np.ndarray
    normalized: bool = field(default=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

        if len(values) != FEATURE_COUNT:
            raise DimensionMismatch("a feature vector has {} entries, not {}".format(FEATURE_COUNT, len(values)))
        if not np.isfinite(values).all():
            raise ValueError("feature values must be finite")

        if not self.normalized:
            self.check_identities()


    def check_identities(self):
        """ Raises if the raw-feature identities don't hold. """

        f = self.as_dict()
        slack = IDENTITY_TOLERANCE * max(1.0, abs(f['max']), abs(f['min']))

        if not (f['max'] + slack >= f['mean'] >= f['min'] - slack):
            raise ValueError("mean lies outside [min, max]")
        if abs(f['range'] - (f['max'] - f['min'])) > slack:
            raise ValueError("range isn't max - min")
        if abs(f['variance'] - f['std'] ** 2) > IDENTITY_TOLERANCE * max(1.0, f['variance']):
            raise ValueError("variance isn't std squared")


    def as_dict(self):
        return dict(zip(FEATURE_NAMES, self.values.tolist()))

    def __getitem__(self, key):
        if isinstance(key, str):
            key = FEATURE_NAMES.index(key)
        return float(self.values[key])

    def __len__(self):
        return FEATURE_COUNT

    def __repr__(self):
        body = ', '.join("{}={:.4g}".format(name, value) for name, value in self.as_dict().items())
        return "<FeatureVector {}>".format(body)


def averaged_power(signal):
    """ Mean of the squared samples: the signal's energy divided by its sample count. """

    samples = signal.samples
    return float(np.dot(samples, samples) / len(samples))


def periodogram(signal):
    """ Returns (frequencies in Hz, P[k]) with P[k] = (ΔT/N)·|DFT(S)[k]|² over all N bins. """

    samples = signal.samples
    n = len(samples)
    dt = 1.0 / signal.sampling_rate_hz

    spectrum = np.fft.fft(samples)
    power = (dt / n) * (spectrum.real ** 2 + spectrum.imag ** 2)
    return np.fft.fftfreq(n, d=dt), power


def energy_spectral_density(signal):
    """ Mean power estimated from the periodogram: ΣP[k] / (N·ΔT).

    By Parseval's theorem this equals averaged_power() up to rounding, independent of the rate.
    """

    _, power = periodogram(signal)
    dt = 1.0 / signal.sampling_rate_hz
    return float(power.sum() / (len(power) * dt))


def rounded_mode(samples):
    """ Mode of the samples rounded half-up to whole beats/min; ties go to the smallest value. """

    values, counts = np.unique(np.floor(samples + 0.5), return_counts=True)
    return float(values[np.argmax(counts)])


def extract_features(signal):
    """ Computes the FeatureVector of a preprocessed signal. """

    samples = signal.samples
    n = len(samples)

    if n < MINIMUM_SIGNAL_LENGTH:
        raise TooShort("need at least {} samples to extract features, got {}".format(MINIMUM_SIGNAL_LENGTH, n))

    high = float(samples.max())
    low = float(samples.min())

    # Constant signals get exact zeros for every spread and shape feature.
    if high == low:
        mean = high
        variance = skewness = kurtosis = 0.0
    else:
        mean = min(max(float(samples.mean()), low), high)
        deviations = samples - mean
        squared = deviations ** 2

        m2 = squared.mean()
        m3 = (squared * deviations).mean()
        m4 = (squared ** 2).mean()

        variance = float(squared.sum() / (n - 1))
        skewness = float(m3 / m2 ** 1.5)
        kurtosis = float(m4 / m2 ** 2)

    values = [
        high,
        low,
        mean,
        float(np.median(samples)),
        rounded_mode(samples),
        float(np.sqrt(variance)),
        variance,
        high - low,
        kurtosis,
        skewness,
        averaged_power(signal),
        energy_spectral_density(signal),
    ]
    return FeatureVector(values)


def extract_matrix(signals):
    """ Stacks the feature vectors of several signals into an (n, 12) array. """

    rows = [extract_features(signal).values for signal in signals]
    if not rows:
        return np.empty((0, FEATURE_COUNT))
    return np.vstack(rows)


@dataclass(frozen=True, eq=False)
class Normalizer:
    """ Per-feature z-score transform learned from training rows. Scales are always positive. """

    center: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'center', np.array(self.center, dtype=np.float64))
        object.__setattr__(self, 'scale', np.array(self.scale, dtype=np.float64))

        if self.center.shape != self.scale.shape:
            raise DimensionMismatch("normalizer center and scale differ in length")
        if not (self.scale > 0).all():
            raise ValueError("normalizer scales must be positive")

    @property
    def feature_count(self):
        return len(self.center)

    def apply_matrix(self, rows):
        rows = np.asarray(rows, dtype=np.float64)
        if rows.shape[-1] != self.feature_count:
            raise DimensionMismatch("expected {} features, got {}".format(self.feature_count, rows.shape[-1]))
        return (rows - self.center) / self.scale

    def to_dict(self):
        return {'center': self.center.tolist(), 'scale': self.scale.tolist()}

    @classmethod
    def from_dict(cls, document):
        return cls(center=document['center'], scale=document['scale'])

    @classmethod
    def identity(cls, feature_count=FEATURE_COUNT):
        return cls(center=np.zeros(feature_count), scale=np.ones(feature_count))


def fit_normalizer(rows):
    """ Learns per-feature mean and sample standard deviation; constant features get scale 1. """

    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise TooFewRows("need at least two rows to fit a normalizer")

    constant = rows.max(axis=0) == rows.min(axis=0)
    center = np.where(constant, rows[0], rows.mean(axis=0))
    scale = np.where(constant, 1.0, rows.std(axis=0, ddof=1))

    return Normalizer(center=center, scale=scale)


def apply_normalizer(normalizer, vector):
    """ Normalizes one feature vector. """

    values = vector.values if isinstance(vector, FeatureVector) else vector
    return FeatureVector(normalizer.apply_matrix(values), normalized=True)
