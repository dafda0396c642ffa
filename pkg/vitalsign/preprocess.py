"""
Signal preprocessing -- turns a raw, gappy record into a clean, uniformly sampled first-hour Signal.

The stages run in the order: truncate tails, forward-fill, smooth, resample; the first-hour clip
is applied last unless configured to run before smoothing.
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from scipy.signal import firwin, resample_poly

from .errors import AllInvalid, LeadingMissing, IrrationalRatio, NonNumericSample, NonPositiveRate
from .record import RawRecord


log = logging.getLogger(__name__)

FIRST_HOUR_S = 3600.0

# Resampling ratios are approximated by L/M with L, M no larger than this.
MAXIMUM_RATIO_TERM = 1000
RATIO_TOLERANCE = 1e-9

# Anti-aliasing filter design.
KAISER_BETA = 5.0
TAPS_PER_RATE_TERM = 8
CUTOFF_MARGIN = 0.9


@dataclass(frozen=True, eq=False)
class Signal:
    """ A clean heart-rate series: uniformly sampled, no missing values, all finite. """

    samples: np.ndarray
    sampling_rate_hz: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).ravel()
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'sampling_rate_hz', float(self.sampling_rate_hz))

        if not self.sampling_rate_hz > 0:
            raise NonPositiveRate("signal rate must be positive")
        if len(samples) == 0:
            raise NonNumericSample("a signal needs at least one sample")
        if not np.isfinite(samples).all():
            raise NonNumericSample("signals may not contain missing or infinite values")

    @property
    def length(self):
        return len(self.samples)

    def __len__(self):
        return len(self.samples)

    @property
    def times(self):
        """ Sample times, in seconds from the first sample. """
        return np.arange(len(self.samples)) / self.sampling_rate_hz

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return self.sampling_rate_hz == other.sampling_rate_hz and np.array_equal(self.samples, other.samples)

    __hash__ = None


@dataclass(frozen=True)
class SmoothingConfig:
    """ Moving-average settings; window_len is the width ρ in samples. """

    window_len: int = 1

    def __post_init__(self):
        if int(self.window_len) != self.window_len or self.window_len < 1:
            raise ValueError("smoothing window must be a positive whole number of samples")


@dataclass(frozen=True)
class PreprocessConfig:
    """ Settings for the whole preprocessing chain.

    Fields:
        window -- Smoothing width in samples at the target rate; scaled to each record's own rate.
        target_hz -- The common output rate.
        first_hour_only -- Keep only the first hour of the output.
        clip_before_smoothing -- Apply the first-hour clip before smoothing instead of last.
    """

    window: int = 300
    target_hz: float = 1.0
    first_hour_only: bool = True
    clip_before_smoothing: bool = False

    def native_window(self, sampling_rate_hz):
        """ Returns the smoothing width, in samples at the given rate, equivalent to `window` at the target rate. """
        return max(1, int(round(self.window * sampling_rate_hz / self.target_hz)))

    @classmethod
    def one_hour_window(cls, target_hz=1.0, **kwargs):
        """ A config whose smoothing window spans a full hour. """
        return cls(window=int(round(FIRST_HOUR_S * target_hz)), target_hz=target_hz, **kwargs)


def record_to_signal(record):
    """ Wraps a record that has no missing samples as a Signal. """
    return Signal(record.samples, record.sampling_rate_hz)


def signal_to_record(signal, patient_id, start_offset_s=0.0):
    return RawRecord(patient_id=patient_id, samples=signal.samples, sampling_rate_hz=signal.sampling_rate_hz,
        start_offset_s=start_offset_s)


def truncate_tails(record):
    """ Drops the leading and trailing runs made only of zeros and missing samples. """

    samples = record.samples
    valid = np.flatnonzero(~(np.isnan(samples) | (samples == 0)))

    if len(valid) == 0:
        raise AllInvalid("record {!r} holds only zeros and missing values".format(record.patient_id))

    first, last = valid[0], valid[-1]
    if first == 0 and last == len(samples) - 1:
        return record

    return replace(record, samples=samples[first:last + 1],
        start_offset_s=record.start_offset_s + first / record.sampling_rate_hz)


def forward_fill(record):
    """ Replaces every missing sample with the closest present sample before it. """

    samples = record.samples
    missing = np.isnan(samples)

    if not missing.any():
        return record

    if missing[0]:
        raise LeadingMissing("record {!r} starts with a missing sample".format(record.patient_id))

    # Index of the latest present sample at or before each position.
    source = np.where(missing, 0, np.arange(len(samples)))
    np.maximum.accumulate(source, out=source)
    return record.with_samples(samples[source])


def moving_average(signal, cfg):
    """ Trailing moving average of width ρ; the first ρ-1 outputs average everything seen so far. """

    width = int(cfg.window_len)
    samples = signal.samples

    if width == 1:
        return signal

    # Work on offsets from the first sample; keeps the running sums small and constants exact.
    reference = samples[0]
    running = np.concatenate(([0.0], np.cumsum(samples - reference)))

    counts = np.minimum(np.arange(1, len(samples) + 1), width)
    ends = np.arange(1, len(samples) + 1)
    smoothed = reference + (running[ends] - running[ends - counts]) / counts

    return Signal(smoothed, signal.sampling_rate_hz)


def rational_ratio(target_hz, source_hz):
    """ Returns (L, M), the up/down factors with target/source ≈ L/M and L, M ≤ 1000. """

    exact = target_hz / source_hz
    ratio = Fraction(exact).limit_denominator(MAXIMUM_RATIO_TERM)

    if ratio.numerator == 0 or ratio.numerator > MAXIMUM_RATIO_TERM or \
            abs(float(ratio) - exact) > RATIO_TOLERANCE * exact:
        raise IrrationalRatio("can't express {} Hz -> {} Hz as a ratio of small integers".format(
            source_hz, target_hz))

    return ratio.numerator, ratio.denominator


def anti_aliasing_filter(up, down):
    """ Linear-phase windowed-sinc low-pass used by the polyphase resampler. """

    taps = TAPS_PER_RATE_TERM * max(up, down) + 1
    cutoff = CUTOFF_MARGIN * min(1.0 / up, 1.0 / down)
    return firwin(taps, cutoff, window=('kaiser', KAISER_BETA))


def resample(signal, target_hz):
    """ Resamples to target_hz by polyphase FIR interpolation (upsample L, filter, decimate M).

    The output holds ceil(n × L / M) samples, time-aligned with the input.
    """

    if not target_hz > 0:
        raise NonPositiveRate("target rate must be positive")

    up, down = rational_ratio(target_hz, signal.sampling_rate_hz)
    if up == down == 1:
        return Signal(signal.samples, target_hz)

    # A lone sample has no slope to extend; it stands for a constant signal.
    if len(signal) == 1:
        return Signal(np.full(-(-up // down), signal.samples[0]), target_hz)

    taps = anti_aliasing_filter(up, down)

    # Extending the edges along a fitted line keeps the filter from pulling the ends toward zero.
    resampled = resample_poly(signal.samples, up, down, window=taps, padtype='line')

    return Signal(resampled, target_hz)


def clip_first_hour(signal):
    """ Keeps at most the first hour of samples. """

    limit = int(math.floor(FIRST_HOUR_S * signal.sampling_rate_hz + 1e-9))
    if len(signal) <= limit:
        return signal

    return Signal(signal.samples[:limit], signal.sampling_rate_hz)


def preprocess_pipeline(record, cfg=None):
    """ Runs the full chain over a raw record; returns a Signal at cfg.target_hz. """
    return _run_chain(record, cfg or PreprocessConfig())[1]


def preprocess_record(record, cfg=None):
    """ Runs the full chain, keeping the result as a record.

    The record's start offset is that of its first kept sample, so truncated leading tails
    still count toward the time since admission.
    """

    trimmed, signal = _run_chain(record, cfg or PreprocessConfig())
    return signal_to_record(signal, record.patient_id, trimmed.start_offset_s)


def _run_chain(record, cfg):
    """ Returns (the record after tail truncation and filling, the preprocessed Signal). """

    record = forward_fill(truncate_tails(record))
    signal = record_to_signal(record)

    if cfg.first_hour_only and cfg.clip_before_smoothing:
        signal = clip_first_hour(signal)

    signal = moving_average(signal, SmoothingConfig(cfg.native_window(signal.sampling_rate_hz)))
    signal = resample(signal, cfg.target_hz)

    # Runs even after an early clip: rounding up in the resampler can add a sample.
    if cfg.first_hour_only:
        signal = clip_first_hour(signal)

    log.debug("preprocessed %s: %d samples at %s Hz", record.patient_id, len(signal), signal.sampling_rate_hz)
    return record, signal
