"""
Synthetic CCU cohort generator.

Produces heart-rate records whose per-class statistics sit near the published cohort means, so the
whole pipeline can be exercised without access to restricted clinical data. This is not a
physiological simulator: each series is a per-patient baseline, AR(1) noise, an admission surge, rare
positive bursts and dropout runs. The surge holds the rate away from baseline for the first minute
or so; the expanding start of the moving average keeps a long tail of it, which gives the heavy-tailed
value distributions seen in real monitors. Interior bursts are mostly averaged away.
"""

import functools
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .clinical_types import CareUnit, Outcome
from .manifest import CohortManifest, ManifestEntry, write_manifest
from .record import RawRecord, save_record
from .workers import WorkerPool, derive_seed


log = logging.getLogger(__name__)

# Plausibility clamp applied after bursts are added, in beats/min.
MINIMUM_RATE_BPM = 20.0
MAXIMUM_RATE_BPM = 250.0

# Bursts last a uniformly-drawn number of samples in this (inclusive) range.
SPIKE_LENGTH_RANGE = (5, 20)

# Dropout runs have geometric lengths with this mean, in samples.
MEAN_MISSING_RUN = 10

RECORD_DIRECTORY = 'records'
MANIFEST_NAME = 'manifest.csv'


@dataclass(frozen=True)
class ClassParams:
    """ Generator settings for one outcome class.

    Fields:
        baseline_mean -- Target mean heart rate of the class, beats/min.
        baseline_sd -- Spread of per-patient baselines around their mode centre.
        ar_coefficient -- AR(1) coefficient of the noise process, in [0, 1).
        noise_sd -- Marginal standard deviation of the AR(1) noise.
        spike_prob -- Per-sample probability that a burst starts.
        spike_scale -- Scale of the half-normal burst amplitude.
        missing_run_prob -- Per-sample probability that a dropout run starts.
        low_mode_prob -- Fraction of patients whose baseline sits in a low (bradycardic) mode.
        low_mode_offset -- Offset of the low mode from baseline_mean; the high mode is shifted to keep the class mean.
        noise_jitter -- Log-normal sigma applied to noise_sd per patient.
        surge_duration_s -- How long the admission surge lasts, in seconds; 0 disables it.
        surge_median -- Median surge amplitude, beats/min.
        surge_sigma -- Log-normal sigma of the surge amplitude.
        surge_up_prob -- Probability that the surge raises the rate rather than lowering it.
    """

    baseline_mean:    float
    baseline_sd:      float
    ar_coefficient:   float
    noise_sd:         float
    spike_prob:       float
    spike_scale:      float
    missing_run_prob: float
    low_mode_prob:    float = 0.0
    low_mode_offset:  float = 0.0
    noise_jitter:     float = 0.0
    surge_duration_s: float = 0.0
    surge_median:     float = 0.0
    surge_sigma:      float = 0.0
    surge_up_prob:    float = 0.5

    def validate(self):
        for name in ('spike_prob', 'missing_run_prob', 'low_mode_prob', 'surge_up_prob'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError("{} must lie in [0, 1]".format(name))

        if not 0.0 <= self.ar_coefficient < 1.0:
            raise ValueError("ar_coefficient must lie in [0, 1)")

        for name in ('baseline_sd', 'noise_sd', 'spike_scale', 'noise_jitter', 'surge_duration_s', 'surge_median',
                'surge_sigma'):
            if getattr(self, name) < 0:
                raise ValueError("{} must be nonnegative".format(name))

        if self.low_mode_prob == 1.0 and self.low_mode_offset != 0.0:
            raise ValueError("a class can't consist solely of an offset low mode")


    def expected_spike_level(self):
        """ Mean contribution of bursts to a sample, ignoring clamping. """

        low, high = SPIKE_LENGTH_RANGE
        mean_length = (low + high) / 2
        mean_amplitude = self.spike_scale * math.sqrt(2 / math.pi)
        return self.spike_prob * mean_length * mean_amplitude


    def expected_surge_level(self, duration_s):
        """ Mean contribution of the admission surge to a sample of a record lasting duration_s. """

        if self.surge_duration_s == 0 or self.surge_median == 0:
            return 0.0

        mean_amplitude = self.surge_median * math.exp(self.surge_sigma ** 2 / 2)
        fraction = min(self.surge_duration_s, duration_s) / duration_s
        return (2 * self.surge_up_prob - 1) * mean_amplitude * fraction


    def draw_surge(self, rng):
        """ Draws one patient's signed surge amplitude. """

        amplitude = self.surge_median * math.exp(rng.normal(0.0, self.surge_sigma))
        return amplitude if rng.random() < self.surge_up_prob else -amplitude


    def mode_centres(self):
        """ Returns the (low, high) baseline centres; they average to baseline_mean. """

        low = self.baseline_mean + self.low_mode_offset
        if self.low_mode_prob == 0.0:
            return low, self.baseline_mean

        high = self.baseline_mean - self.low_mode_prob * self.low_mode_offset / (1.0 - self.low_mode_prob)
        return low, high


    def draw_baseline(self, rng, duration_s):
        """ Draws one patient's baseline (with the expected burst and surge contributions taken back out). """

        low, high = self.mode_centres()
        in_low_mode = rng.random() < self.low_mode_prob
        centre = low if in_low_mode else high
        return rng.normal(centre, self.baseline_sd) - self.expected_spike_level() - \
            self.expected_surge_level(duration_s)


@dataclass(frozen=True)
class SynthConfig:
    """ Everything needed to generate a cohort; generation is a pure function of this. """

    n_survived:   int
    n_passed:     int
    seed:         int
    rates_hz:     tuple
    duration_s:   float
    class_params: dict = field(hash=False)

    def validate(self):
        if self.n_survived < 0 or self.n_passed < 0:
            raise ValueError("patient counts must be nonnegative")

        if not self.rates_hz or any(rate <= 0 for rate in self.rates_hz):
            raise ValueError("sampling rates must be positive")

        if not self.duration_s > 0:
            raise ValueError("duration must be positive")

        for outcome in Outcome:
            if outcome not in self.class_params:
                raise ValueError("no generator parameters for class {}".format(outcome.name))
            self.class_params[outcome].validate()

    @property
    def n_patients(self):
        return self.n_survived + self.n_passed


def default_config(n_survived=2614, n_passed=365, seed=7):
    """ The calibrated default: 88.46 vs 81.92 beats/min class means, recorded at 1, 0.5 or 0.17 Hz for an hour. """

    return SynthConfig(
        n_survived=n_survived,
        n_passed=n_passed,
        seed=seed,
        rates_hz=(1.0, 0.5, 0.17),
        duration_s=3600.0,
        class_params={
            Outcome.PASSED_AWAY: ClassParams(
                baseline_mean=88.46, baseline_sd=2.0, ar_coefficient=0.9, noise_sd=2.6,
                spike_prob=0.002, spike_scale=15.0, missing_run_prob=0.002,
                low_mode_prob=0.25, low_mode_offset=-18.0, noise_jitter=0.3,
                surge_duration_s=50.0, surge_median=14.0, surge_sigma=0.3, surge_up_prob=0.61),
            Outcome.SURVIVED: ClassParams(
                baseline_mean=81.92, baseline_sd=2.0, ar_coefficient=0.9, noise_sd=2.25,
                spike_prob=0.0015, spike_scale=12.0, missing_run_prob=0.002,
                noise_jitter=0.3,
                surge_duration_s=50.0, surge_median=12.0, surge_sigma=0.3, surge_up_prob=0.64),
        },
    )


def patient_id_for_index(index):
    return "p{:05d}".format(index)


def _add_bursts(series, params, rng):
    low, high = SPIKE_LENGTH_RANGE

    for start in np.flatnonzero(rng.random(len(series)) < params.spike_prob):
        length = rng.integers(low, high + 1)
        series[start:start + length] += abs(rng.normal(0.0, params.spike_scale))


def _add_dropouts(series, params, rng):
    for start in np.flatnonzero(rng.random(len(series)) < params.missing_run_prob):
        length = rng.geometric(1.0 / MEAN_MISSING_RUN)
        series[start:start + length] = np.nan


def generate_patient(cfg, index, outcome):
    """ Generates the record of patient `index`; depends only on (cfg, index, outcome). """

    rng = np.random.default_rng(derive_seed(cfg.seed, index))
    params = cfg.class_params[outcome]

    rate = float(cfg.rates_hz[rng.integers(len(cfg.rates_hz))])
    n_samples = max(1, int(math.floor(cfg.duration_s * rate)))

    baseline = params.draw_baseline(rng, cfg.duration_s)
    noise_sd = params.noise_sd
    if params.noise_jitter > 0:
        noise_sd *= math.exp(rng.normal(0.0, params.noise_jitter))
    surge = params.draw_surge(rng)

    # Stationary AR(1): innovations scaled so the marginal deviation is noise_sd,
    # with the filter state seeded from the stationary distribution.
    phi = params.ar_coefficient
    innovations = rng.normal(0.0, noise_sd * math.sqrt(1.0 - phi ** 2), n_samples)
    initial_state = [phi * rng.normal(0.0, noise_sd)]
    noise, _ = lfilter([1.0], [1.0, -phi], innovations, zi=initial_state)

    series = baseline + noise
    series[:int(round(params.surge_duration_s * rate))] += surge
    _add_bursts(series, params, rng)
    np.clip(series, MINIMUM_RATE_BPM, MAXIMUM_RATE_BPM, out=series)
    _add_dropouts(series, params, rng)

    return RawRecord(patient_id=patient_id_for_index(index), samples=series, sampling_rate_hz=rate)


def _generate_task(cfg, task):
    index, outcome = task
    return generate_patient(cfg, index, outcome)


def assign_outcomes(cfg):
    """ Returns the outcome of every patient index: the class list shuffled under the seed. """

    outcomes = np.array([Outcome.PASSED_AWAY] * cfg.n_passed + [Outcome.SURVIVED] * cfg.n_survived, dtype=object)
    order = np.random.default_rng(derive_seed(cfg.seed, -1)).permutation(len(outcomes))
    return [Outcome(outcome) for outcome in outcomes[order]]


def generate_cohort(cfg, pool=None):
    """ Generates a cohort; returns (manifest, records), records in manifest order.

    Identical for a given config whatever the pool size, since each patient is seeded by its index.
    """

    cfg.validate()
    pool = pool or WorkerPool(1)

    outcomes = assign_outcomes(cfg)
    records = pool.map(functools.partial(_generate_task, cfg), list(enumerate(outcomes)))

    entries = [
        ManifestEntry(
            patient_id=record.patient_id,
            record_path="{}/{}.hrw".format(RECORD_DIRECTORY, record.patient_id),
            care_unit=CareUnit.CCU,
            outcome=outcome,
        )
        for record, outcome in zip(records, outcomes)
    ]

    log.info("generated %d patients (%d passed away, %d survived)", cfg.n_patients, cfg.n_passed, cfg.n_survived)
    return CohortManifest(entries), tuple(records)


def write_cohort(manifest, records, out_dir):
    """ Writes each record as HRW under out_dir/records, and the manifest as out_dir/manifest.csv. """

    os.makedirs(os.path.join(out_dir, RECORD_DIRECTORY), exist_ok=True)

    for entry, record in zip(manifest, records):
        save_record(record, os.path.join(out_dir, entry.record_path))

    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    write_manifest(manifest, manifest_path)
    return manifest_path
