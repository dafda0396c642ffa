"""
Tree ensembles: bagged random forests and AdaBoost.M1 over shallow CART trees.
"""

import logging
import math

import numpy as np

from ..classifier import Classifier, signed_labels, sigmoid
from ..workers import derive_seed
from .tree import train_tree, tree_labels, node_to_dict, node_from_dict


log = logging.getLogger(__name__)

TREE_PARAMS = ('max_depth', 'min_leaf', 'min_gain')


def _tree_params(params):
    return {name: params[name] for name in TREE_PARAMS}


def features_per_split(params, feature_count):
    """ Returns mtry, the number of features each forest node may consider: ceil(√d) unless set. """

    mtry = params['mtry']
    if mtry is None:
        mtry = int(math.ceil(math.sqrt(feature_count)))

    if int(mtry) < 1:
        raise ValueError("mtry must be at least 1")
    return min(int(mtry), feature_count)


class RandomForest(Classifier):
    """ Bootstrap-aggregated CART trees; the score is the fraction of trees voting positive. """

    UI_NAME = 'random_forest'
    UI_DESCRIPTION = 'bagged CART trees with random feature subsets at each split'
    INTERPRETABLE = False

    DEFAULT_PARAMS = {
        'n_trees': 60,
        'mtry': None,
        'bootstrap': True,
        'max_depth': 10,
        'min_leaf': 2,
        'min_gain': 0.0,
        'seed': 0,
    }


    def fit(self, features, labels):
        count, feature_count = features.shape
        mtry = features_per_split(self.params, feature_count)
        every_feature = np.arange(feature_count)

        out_of_bag_votes = np.zeros(count)
        out_of_bag_trees = np.zeros(count)

        self.trees = []
        for index in range(int(self.params['n_trees'])):

            # Each tree owns its generator, so its draws don't depend on the trees before it.
            rng = np.random.default_rng(derive_seed(self.params['seed'], index))

            # Bootstrap by multiplicity: a row drawn k times carries weight k.
            if self.params['bootstrap']:
                weights = np.bincount(rng.integers(count, size=count), minlength=count).astype(np.float64)
            else:
                weights = np.ones(count)

            if mtry >= feature_count:
                sampler = lambda: every_feature
            else:
                sampler = lambda: np.sort(rng.choice(feature_count, size=mtry, replace=False))

            root = train_tree(features, labels, _tree_params(self.params), sample_weight=weights, feature_sampler=sampler)
            self.trees.append(root)

            left_out = weights == 0
            if left_out.any():
                out_of_bag_votes[left_out] += tree_labels(root, features[left_out])
                out_of_bag_trees[left_out] += 1

        self.diagnostics['mtry'] = mtry
        self.diagnostics['out_of_bag_accuracy'] = self._out_of_bag_accuracy(labels, out_of_bag_votes, out_of_bag_trees)


    @staticmethod
    def _out_of_bag_accuracy(labels, votes, trees):
        """ Accuracy of each row's vote among the trees that never saw it; None without any such rows. """

        judged = trees > 0
        if not judged.any():
            return None

        predicted = (votes[judged] / trees[judged] >= 0.5).astype(np.int64)
        return float(np.mean(predicted == labels[judged]))


    @property
    def out_of_bag_accuracy(self):
        return self.diagnostics.get('out_of_bag_accuracy')


    def _score_many(self, features):
        votes = np.zeros(len(features))
        for root in self.trees:
            votes += tree_labels(root, features)
        return votes / len(self.trees)


    def get_state(self):
        return {'trees': [node_to_dict(root) for root in self.trees]}

    def set_state(self, state):
        self.trees = [node_from_dict(document) for document in state['trees']]


class BoostedTrees(Classifier):
    """ AdaBoost.M1 over depth-limited CART trees; the score is the sigmoid of the weighted vote. """

    UI_NAME = 'boosted_trees'
    UI_DESCRIPTION = 'AdaBoost.M1 over depth-limited CART trees'
    INTERPRETABLE = False

    DEFAULT_PARAMS = {
        'n_rounds': 60,
        'max_depth': 3,
        'min_leaf': 1,
        'min_gain': 0.0,
    }


    def fit(self, features, labels):
        count = len(labels)
        weights = np.full(count, 1.0 / count)

        self.trees = []
        self.alphas = []
        errors = []
        stop_reason = None

        for round_number in range(int(self.params['n_rounds'])):
            root = train_tree(features, labels, _tree_params(self.params), sample_weight=weights)
            wrong = tree_labels(root, features) != labels
            error = float(weights[wrong].sum())

            if error >= 0.5:
                stop_reason = "round {} learner no better than chance (error {:.4f})".format(round_number, error)

                # Keep something to vote with, even if the very first learner failed.
                if not self.trees:
                    self.trees.append(root)
                    self.alphas.append(1.0)
                break

            errors.append(error)
            self.trees.append(root)

            # A perfect learner outvotes everything before it.
            if error == 0.0:
                self.alphas.append(sum(self.alphas) + 1.0)
                stop_reason = "round {} learner is perfect on the training set".format(round_number)
                break

            alpha = 0.5 * math.log((1.0 - error) / error)
            self.alphas.append(alpha)

            weights = weights * np.exp(np.where(wrong, alpha, -alpha))
            weights /= weights.sum()

        if stop_reason:
            log.warning("boosting stopped after %d rounds: %s", len(self.trees), stop_reason)

        bound = 1.0
        for error in errors:
            bound *= 2.0 * math.sqrt(error * (1.0 - error))

        margins = signed_labels(labels) * self.vote(features)
        self.diagnostics.update({
            'round_errors': errors,
            'round_weights': list(self.alphas),
            'training_error_bound': bound,
            'training_error': float(np.mean(margins <= 0)),
            'stop_reason': stop_reason,
        })


    def vote(self, features):
        """ Returns Σ alpha_t h_t(x), with each learner voting ±1. """

        total = np.zeros(len(features))
        for root, alpha in zip(self.trees, self.alphas):
            total += alpha * signed_labels(tree_labels(root, features))
        return total


    def _score_many(self, features):
        return sigmoid(self.vote(features))


    def get_state(self):
        return {'trees': [node_to_dict(root) for root in self.trees], 'alphas': list(self.alphas)}

    def set_state(self, state):
        self.trees = [node_from_dict(document) for document in state['trees']]
        self.alphas = [float(alpha) for alpha in state['alphas']]
