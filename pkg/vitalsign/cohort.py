"""
Cohort definitions -- the labeled feature matrix the classifiers learn from, and its CSV form.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .clinical_types import Outcome
from .errors import DimensionMismatch, DuplicatePatient, MalformedHeader
from .features import FEATURE_NAMES, FEATURE_COUNT


log = logging.getLogger(__name__)

FEATURE_CSV_COLUMNS = ['patient_id', 'outcome'] + list(FEATURE_NAMES)

# Every float is written with enough digits to read back bit-for-bit.
FLOAT_FORMAT = '%.17g'


@dataclass(frozen=True, eq=False)
class Cohort:
    """ Feature rows for a set of patients, in a fixed order.

    Fields:
        features -- (n, 12) array, columns in FEATURE_NAMES order.
        labels -- n labels; 1 for PassedAway, 0 for Survived.
        patient_ids -- n unique patient identifiers.
        care_units -- n CareUnits, or empty when the source didn't carry them.
    """

    features:    np.ndarray
    labels:      np.ndarray
    patient_ids: tuple
    care_units:  tuple = field(default=())

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64).reshape(-1, FEATURE_COUNT)
        labels = np.array(self.labels, dtype=np.int64).ravel()

        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'patient_ids', tuple(self.patient_ids))
        object.__setattr__(self, 'care_units', tuple(self.care_units))

        if not len(features) == len(labels) == len(self.patient_ids):
            raise DimensionMismatch("cohort has {} feature rows, {} labels and {} patient ids".format(
                len(features), len(labels), len(self.patient_ids)))
        if self.care_units and len(self.care_units) != len(labels):
            raise DimensionMismatch("cohort care units don't match its rows")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("cohort labels must be 0 or 1")
        if len(set(self.patient_ids)) != len(self.patient_ids):
            raise DuplicatePatient("cohort contains a patient more than once")


    def __len__(self):
        return len(self.labels)

    @property
    def outcomes(self):
        return [Outcome.from_label(label) for label in self.labels]

    def count(self, outcome):
        return int(np.count_nonzero(self.labels == Outcome.parse(outcome).label))

    def subset(self, indices):
        """ Returns the cohort made of the given rows, in the given order. """

        indices = np.asarray(indices, dtype=np.int64)
        units = tuple(self.care_units[i] for i in indices) if self.care_units else ()
        return Cohort(self.features[indices], self.labels[indices],
            [self.patient_ids[i] for i in indices], units)


    def to_frame(self):
        """ Returns the cohort as a DataFrame laid out like the feature CSV. """

        frame = pd.DataFrame(self.features, columns=list(FEATURE_NAMES))
        frame.insert(0, 'outcome', [outcome.token for outcome in self.outcomes])
        frame.insert(0, 'patient_id', list(self.patient_ids))
        return frame


def write_feature_csv(cohort, path):
    """ Writes a feature CSV: header patient_id,outcome,<the twelve features>, one row per patient. """
    cohort.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)


def read_feature_csv(path):
    """ Reads a feature CSV written by write_feature_csv(). """

    try:
        frame = pd.read_csv(path, dtype={'patient_id': str, 'outcome': str}, keep_default_na=False,
            float_precision='round_trip')
    except pd.errors.EmptyDataError:
        raise MalformedHeader("feature file {} is empty; expected a header line".format(path)) from None

    if list(frame.columns) != FEATURE_CSV_COLUMNS:
        raise MalformedHeader("feature file header must be {}".format(','.join(FEATURE_CSV_COLUMNS)))

    try:
        features = frame[list(FEATURE_NAMES)].to_numpy(dtype=np.float64)
    except ValueError:
        raise MalformedHeader("feature file {} holds non-numeric feature values".format(path)) from None

    labels = [Outcome.parse(token).label for token in frame['outcome']]

    cohort = Cohort(features, labels, frame['patient_id'].tolist())
    log.info("read %d feature rows from %s", len(cohort), path)
    return cohort


def class_statistics(cohort):
    """ Returns the per-class mean of every feature, as a DataFrame indexed by feature name.

    Columns are 'passed_away' and 'survived'; a class with no rows gets NaN means.
    """

    frame = pd.DataFrame(cohort.features, columns=list(FEATURE_NAMES))
    frame['label'] = cohort.labels

    means = frame.groupby('label').mean().T
    statistics = pd.DataFrame(index=list(FEATURE_NAMES))
    statistics.index.name = 'feature'

    for outcome in (Outcome.PASSED_AWAY, Outcome.SURVIVED):
        column = outcome.name.lower()
        statistics[column] = means[outcome.label] if outcome.label in means.columns else np.nan

    return statistics
