"""
Stage that trains one classifier on a whole feature table.
"""

import logging

import numpy as np

from ..features import fit_normalizer
from ..imbalance import oversample
from ..models import DEFAULT_ROSTER, parse_param_assignments, save_model, variant_class
from ..stage import (Stage, add_output_argument, add_seed_argument, add_balance_arguments, balance_config_from,
    add_param_argument, load_feature_cohort)


log = logging.getLogger(__name__)


def fit_on_cohort(cohort, variant, params, balance):
    """ Normalizes (and optionally oversamples) a whole cohort, then trains a model on it.

    Returns (model, normalizer, number of synthetic training rows).
    """

    normalizer = fit_normalizer(cohort.features)
    features = normalizer.apply_matrix(cohort.features)
    labels = cohort.labels
    n_synthetic = 0

    if balance is not None:
        balanced = oversample(features, labels, balance)
        features, labels, n_synthetic = balanced.features, balanced.labels, balanced.n_synthetic

    model = variant_class(variant).train(features, labels, params)
    return model, normalizer, n_synthetic


class TrainStage(Stage):
    """ Trains a classifier on every row of a feature CSV and saves it, normalizer included, as model.json. """

    UI_NAME = 'train'
    UI_DESCRIPTION = 'train one classifier on a feature table'


    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--data', default=None, help="feature CSV to train on")
        parser.add_argument('--model', default=DEFAULT_ROSTER[0], help="classifier variant to train")
        add_param_argument(parser, "set a hyperparameter of the model; may be repeated")
        add_output_argument(parser, 'model')
        add_seed_argument(parser)
        add_balance_arguments(parser)


    def run(self):
        settings = self.settings
        cohort = load_feature_cohort(settings.data)

        cls = variant_class(settings.model)
        params = parse_param_assignments(settings.param)
        if cls.takes_seed():
            params.setdefault('seed', settings.seed)

        model, normalizer, n_synthetic = fit_on_cohort(cohort, settings.model, params, balance_config_from(settings))

        accuracy = float(np.mean(model.predict_many(normalizer.apply_matrix(cohort.features)) == cohort.labels))
        log.info("training accuracy of %s: %.4f", model.variant, accuracy)

        path = self.output_path('model.json')
        save_model(model, path, normalizer)

        return "trained {} on {} patients ({} synthetic rows) into {}".format(
            model.variant, len(cohort), n_synthetic, path)
