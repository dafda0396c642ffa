"""
Core classifier definitions for vitalsign.
"""

import logging

import numpy as np
from scipy.special import expit

from .enumerable import VitalSignEnumerable
from .errors import DimensionMismatch, EmptyData, InvalidLabels, UnknownParameter
from .features import FeatureVector


log = logging.getLogger(__name__)

# Scores at or above this are predicted positive (PassedAway) unless a caller says otherwise.
DEFAULT_THRESHOLD = 0.5


def check_training_data(features, labels):
    """ Validates and converts a training set; returns (float64 (n, d) features, int64 0/1 labels). """

    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels).ravel()

    if features.ndim != 2:
        raise DimensionMismatch("training features must form an (n, d) matrix")
    if len(features) == 0:
        raise EmptyData("can't train on an empty data set")
    if len(labels) != len(features):
        raise InvalidLabels("got {} labels for {} feature rows".format(len(labels), len(features)))
    if not np.isin(labels, (0, 1)).all():
        raise InvalidLabels("labels must be 0 (survived) or 1 (passed away)")
    if not np.isfinite(features).all():
        raise ValueError("training features must be finite")

    return features, labels.astype(np.int64)


def signed_labels(labels):
    """ Maps 0/1 labels onto -1/+1. """
    return 2.0 * np.asarray(labels, dtype=np.float64) - 1.0


def sigmoid(values):
    """ Monotone squashing of margins into [0, 1]; a ranking convenience, not a calibration. """
    return expit(values)


class Classifier(VitalSignEnumerable):
    """ Base class for vitalsign's binary classifiers.

    Subclasses set UI_NAME (the variant tag), UI_DESCRIPTION, INTERPRETABLE and DEFAULT_PARAMS, and
    implement fit(), _score_many(), get_state() and set_state(). Every hyperparameter a variant
    accepts appears in DEFAULT_PARAMS.
    """

    # Whether a person can read the trained model's reasoning (transparent) or not (black box).
    INTERPRETABLE = False

    # Hyperparameters accepted by this variant, with their defaults.
    DEFAULT_PARAMS = {}


    def __init__(self, feature_count, params=None):
        """ Creates an untrained classifier; most callers want train() instead. """

        self.feature_count = int(feature_count)
        self.params = self.resolve_params(params)

        # Free-form record of how training went (convergence, out-of-bag accuracy, ...).
        self.diagnostics = {}


    @property
    def variant(self):
        return self.UI_NAME


    @classmethod
    def resolve_params(cls, params=None):
        """ Returns the full parameter set: defaults, overridden by the given values. """

        params = dict(params or {})

        unknown = sorted(set(params) - set(cls.DEFAULT_PARAMS))
        if unknown:
            raise UnknownParameter("{} doesn't take parameter(s) {}; valid: {}".format(
                cls.UI_NAME, ', '.join(unknown), ', '.join(sorted(cls.DEFAULT_PARAMS)) or 'none'))

        resolved = dict(cls.DEFAULT_PARAMS)
        resolved.update(params)
        return resolved


    @classmethod
    def takes_seed(cls):
        return 'seed' in cls.DEFAULT_PARAMS


    @classmethod
    def train(cls, features, labels, params=None):
        """ Trains a new classifier of this variant on (features, labels). """

        features, labels = check_training_data(features, labels)

        model = cls(features.shape[1], params)
        model.fit(features, labels)

        log.debug("trained %s on %d rows", cls.UI_NAME, len(labels))
        return model


    def fit(self, features, labels):
        """ Learns this model's state from validated training data. """
        raise NotImplementedError("classifier must implement fit()")


    def _score_many(self, features):
        """ Scores validated rows; must return values in [0, 1], larger meaning 'more likely positive'. """
        raise NotImplementedError("classifier must implement _score_many()")


    def _check_features(self, features):
        if isinstance(features, FeatureVector):
            features = features.values

        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(1, -1)

        if features.shape[1] != self.feature_count:
            raise DimensionMismatch("{} model expects {} features, got {}".format(
                self.variant, self.feature_count, features.shape[1]))

        return features


    def score_many(self, features):
        """ Returns the score of every row of an (n, d) matrix. """
        return np.clip(self._score_many(self._check_features(features)), 0.0, 1.0)


    def score(self, vector):
        """ Returns the score in [0, 1] of a single feature vector. """
        return float(self.score_many(vector)[0])


    def predict_many(self, features, threshold=DEFAULT_THRESHOLD):
        return (self.score_many(features) >= threshold).astype(np.int64)


    def predict(self, vector, threshold=DEFAULT_THRESHOLD):
        """ Returns 1 (passed away) iff the vector's score reaches the threshold. """
        return int(self.score(vector) >= threshold)


    def get_state(self):
        """ Returns the trained state as a JSON-compatible dict. """
        raise NotImplementedError("classifier must implement get_state()")


    def set_state(self, state):
        """ Restores a state produced by get_state(). """
        raise NotImplementedError("classifier must implement set_state()")


    def __repr__(self):
        return "<{} trained on {} features>".format(self.__class__.__name__, self.feature_count)
