"""
Trained-model front door -- trains any classifier variant by name, scores through a uniform
contract, and saves models as versioned JSON documents.
"""

import json
import logging
from dataclasses import dataclass, field

import yaml

from .classifier import Classifier, DEFAULT_THRESHOLD
from .classifiers import *
from .errors import UnknownVariant, UnknownParameter
from .features import Normalizer


log = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 'v1'

# The order models are listed and evaluated in when no roster is given.
DEFAULT_ROSTER = (
    'decision_tree',
    'linear_discriminant',
    'logistic_regression',
    'linear_svm',
    'gaussian_svm',
    'random_forest',
    'boosted_trees',
    'knn',
)


def variant_class(variant):
    """ Returns the Classifier subclass registered under the given variant tag. """

    cls = Classifier.get_subclass_from_name(variant)
    if cls is None:
        raise UnknownVariant("unknown model {!r}; valid models: {}".format(variant, ', '.join(Classifier.names())))
    return cls


@dataclass(frozen=True)
class ModelSpec:
    """ Names a classifier variant and the hyperparameters to train it with. """

    variant: str
    params:  dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        variant_class(self.variant).resolve_params(self.params)

    @property
    def classifier(self):
        return variant_class(self.variant)


def parse_param_assignments(assignments):
    """ Turns ['max_depth=5', 'gamma=null'] into {'max_depth': 5, 'gamma': None}; values are YAML scalars. """

    params = {}
    for assignment in assignments or ():
        name, separator, value = assignment.partition('=')
        if not separator or not name.strip():
            raise UnknownParameter("model parameters must be written name=value, not {!r}".format(assignment))
        params[name.strip()] = yaml.safe_load(value)
    return params


def train_model(variant, features, labels, params=None):
    """ Trains the named classifier variant. """
    return variant_class(variant).train(features, labels, params)


def score(model, vector):
    """ Returns the model's score in [0, 1] for one feature vector. """
    return model.score(vector)


def predict(model, vector, threshold=DEFAULT_THRESHOLD):
    """ Returns 1 (passed away) iff score(model, vector) >= threshold. """
    return model.predict(vector, threshold)


def model_to_document(model, normalizer=None):
    """ Returns the JSON-compatible document describing a trained model. """

    document = {
        'version': MODEL_FORMAT_VERSION,
        'variant': model.variant,
        'feature_count': model.feature_count,
        'params': model.params,
        'state': model.get_state(),
    }

    if normalizer is not None:
        document['normalizer'] = normalizer.to_dict()

    return document


def model_from_document(document):
    """ Rebuilds (model, normalizer or None) from a document made by model_to_document(). """

    if document.get('version') != MODEL_FORMAT_VERSION:
        raise UnknownVariant("unsupported model document version {!r}".format(document.get('version')))

    cls = variant_class(document['variant'])
    model = cls(document['feature_count'], document['params'])
    model.set_state(document['state'])

    normalizer = None
    if 'normalizer' in document:
        normalizer = Normalizer.from_dict(document['normalizer'])

    return model, normalizer


def save_model(model, path, normalizer=None):
    with open(path, 'w') as f:
        json.dump(model_to_document(model, normalizer), f, indent=1, sort_keys=True)
        f.write("\n")

    log.info("saved %s model to %s", model.variant, path)


def load_model(path):
    """ Loads a model saved by save_model(); returns (model, normalizer or None). """

    with open(path) as f:
        return model_from_document(json.load(f))


def group_params_by_variant(params, variants):
    """ Splits {'decision_tree.max_depth': 5, ...} into {'decision_tree': {'max_depth': 5}, ...}.

    A name without a variant prefix is only allowed when a single variant is being trained.
    """

    variants = list(variants)
    grouped = {variant: {} for variant in variants}

    for key, value in params.items():
        variant, separator, name = key.rpartition('.')

        if not separator:
            if len(variants) != 1:
                raise UnknownParameter("parameter {!r} must be written variant.{} when training several models".format(key, key))
            variant = variants[0]

        if variant not in grouped:
            raise UnknownParameter("parameter {!r} is for {!r}, which isn't being trained".format(key, variant))

        grouped[variant][name] = value

    return grouped
