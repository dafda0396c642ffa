"""
CART decision trees, split on Gini's diversity index, with node risk and predictor importance.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..classifier import Classifier, check_training_data
from ..clinical_types import Outcome
from ..errors import InvalidDistribution, NoBranches
from ..features import FEATURE_NAMES


log = logging.getLogger(__name__)

# Gains closer than this are considered tied; a split must gain more than this to be made.
GAIN_TOLERANCE = 1e-12

# Slack allowed when checking that class fractions form a distribution.
DISTRIBUTION_TOLERANCE = 1e-9


def gini(fractions):
    """ Gini's diversity index of a class distribution: 1 - Σ p(i)². """

    fractions = np.asarray(fractions, dtype=np.float64).ravel()

    if len(fractions) == 0 or not np.isfinite(fractions).all():
        raise InvalidDistribution("class fractions must be a nonempty vector of finite values")
    if (fractions < -DISTRIBUTION_TOLERANCE).any() or abs(fractions.sum() - 1.0) > DISTRIBUTION_TOLERANCE:
        raise InvalidDistribution("class fractions must be nonnegative and sum to 1, not {}".format(fractions.tolist()))

    return float(1.0 - np.dot(fractions, fractions))


def _impurity(negative, positive, total):
    """ Binary GDI from class weights; symmetric in the two classes. """

    negative = negative / total
    positive = positive / total
    return 1.0 - (negative * negative + positive * positive)


@dataclass(frozen=True)
class Leaf:
    """ A terminal node.

    Fields:
        label -- Predicted label: 1 when at least half the node's weight is positive.
        fractions -- (survived, passed away) weight fractions at the node.
        gdi -- The node's Gini diversity index.
        node_probability -- Fraction of the training weight that reaches the node.
        samples -- Number of training rows that reach the node.
    """

    label:            int
    fractions:        tuple
    gdi:              float
    node_probability: float
    samples:          int


@dataclass(frozen=True)
class Branch:
    """ An internal node: rows with features[feature] <= threshold go left, the rest right. """

    feature:          int
    threshold:        float
    left:             object
    right:            object
    gdi:              float
    node_probability: float
    samples:          int


@dataclass(frozen=True)
class Split:
    gain:      float
    feature:   int
    threshold: float


def midpoint_threshold(below, above):
    """ Returns the threshold between two consecutive distinct values; never equal to `above`. """

    threshold = (below + above) / 2.0
    if threshold >= above:
        threshold = below
    return threshold


def find_best_split(features, labels, weights, candidate_features, min_leaf=1):
    """ Finds the split of one node's rows that most decreases the weighted GDI.

    Thresholds are midpoints between consecutive distinct values. Ties go to the lowest feature
    index, then the smallest threshold. Returns a Split, or None if no split leaves at least
    min_leaf rows on each side.
    """

    count = len(labels)
    if count < 2 * min_leaf:
        return None

    positive_weights = weights * labels
    negative_weights = weights * (1 - labels)

    positive = positive_weights.sum()
    negative = negative_weights.sum()
    total = negative + positive
    parent = _impurity(negative, positive, total)

    left_counts = np.arange(1, count)
    big_enough = (left_counts >= min_leaf) & (count - left_counts >= min_leaf)

    best = None
    for feature in candidate_features:
        order = np.argsort(features[:, feature], kind='stable')
        values = features[order, feature]

        left_positive = np.cumsum(positive_weights[order])[:-1]
        left_negative = np.cumsum(negative_weights[order])[:-1]
        right_positive = positive - left_positive
        right_negative = negative - left_negative

        left_total = left_negative + left_positive
        right_total = right_negative + right_positive

        # Only cut between distinct values.
        valid = big_enough & (values[:-1] < values[1:])
        if not valid.any():
            continue

        with np.errstate(divide='ignore', invalid='ignore'):
            children = (left_total * _impurity(left_negative, left_positive, left_total) +
                right_total * _impurity(right_negative, right_positive, right_total)) / total

        gains = np.where(valid, parent - children, -np.inf)
        position = int(np.flatnonzero(gains >= gains.max() - GAIN_TOLERANCE)[0])
        gain = float(gains[position])

        if best is None or gain > best.gain + GAIN_TOLERANCE:
            threshold = midpoint_threshold(values[position], values[position + 1])
            best = Split(gain, int(feature), float(threshold))

    return best


class _TreeBuilder:
    """ Grows one tree greedily, depth first. """

    def __init__(self, features, labels, weights, params, feature_sampler=None):
        self.features = features
        self.labels = labels
        self.weights = weights
        self.total_weight = weights.sum()

        self.max_depth = int(params['max_depth'])
        self.min_leaf = int(params['min_leaf'])
        self.min_gain = float(params['min_gain'])

        all_features = np.arange(features.shape[1])
        self.feature_sampler = feature_sampler or (lambda: all_features)


    def build(self, rows, depth=0):
        labels = self.labels[rows]
        weights = self.weights[rows]

        positive = float(np.dot(weights, labels))
        negative = float(np.dot(weights, 1 - labels))
        total = negative + positive

        fractions = (negative / total, positive / total)
        gdi = _impurity(negative, positive, total)
        probability = total / self.total_weight

        if depth < self.max_depth and gdi > 0:
            split = find_best_split(self.features[rows], labels, weights, self.feature_sampler(), self.min_leaf)

            if split is not None and split.gain > GAIN_TOLERANCE and split.gain >= self.min_gain:
                goes_left = self.features[rows, split.feature] <= split.threshold
                return Branch(
                    feature=split.feature,
                    threshold=split.threshold,
                    left=self.build(rows[goes_left], depth + 1),
                    right=self.build(rows[~goes_left], depth + 1),
                    gdi=gdi,
                    node_probability=probability,
                    samples=len(rows),
                )

        return Leaf(
            label=int(fractions[1] >= 0.5),
            fractions=fractions,
            gdi=gdi,
            node_probability=probability,
            samples=len(rows),
        )


def validate_tree_params(params):
    if int(params['max_depth']) < 0:
        raise ValueError("max_depth must be nonnegative")
    if int(params['min_leaf']) < 1:
        raise ValueError("min_leaf must be at least 1")
    if float(params['min_gain']) < 0:
        raise ValueError("min_gain must be nonnegative")


def train_tree(features, labels, params=None, sample_weight=None, feature_sampler=None):
    """ Grows a CART tree; returns its root node.

    Args:
        features, labels -- The training set; labels are 0/1.
        params -- dict with max_depth, min_leaf and min_gain; missing keys take DecisionTree defaults.
        sample_weight -- Optional nonnegative per-row weights; rows of weight 0 are left out.
        feature_sampler -- Optional callable returning the (sorted) feature indices each node may split on.
    """

    features, labels = check_training_data(features, labels)
    params = DecisionTree.resolve_params(params)
    validate_tree_params(params)

    if sample_weight is None:
        sample_weight = np.ones(len(labels))
    sample_weight = np.asarray(sample_weight, dtype=np.float64)

    rows = np.flatnonzero(sample_weight > 0)
    if len(rows) == 0:
        raise ValueError("at least one row needs a positive weight")

    builder = _TreeBuilder(features, labels, sample_weight, params, feature_sampler)
    return builder.build(rows)


def iter_nodes(node):
    """ Yields every node of a tree, parents before children, left before right. """

    stack = [node]
    while stack:
        node = stack.pop()
        yield node

        if isinstance(node, Branch):
            stack.append(node.right)
            stack.append(node.left)


def node_risk(node):
    """ Risk of a node: its GDI weighted by the probability of reaching it. """
    return node.gdi * node.node_probability


def branch_count(root):
    return sum(1 for node in iter_nodes(root) if isinstance(node, Branch))


def predictor_importance(root, feature_count=len(FEATURE_NAMES)):
    """ Sums, per feature, the risk removed by the splits on that feature, divided by the number of branches. """

    importance = np.zeros(feature_count)
    branches = 0

    for node in iter_nodes(root):
        if isinstance(node, Branch):
            importance[node.feature] += node_risk(node) - node_risk(node.left) - node_risk(node.right)
            branches += 1

    if branches == 0:
        raise NoBranches("the tree is a single leaf; no predictor was ever used")

    return importance / branches


def _route(root, features, pick):
    """ Sends each row down the tree; returns pick(leaf) for every row. """

    values = np.empty(len(features))
    pending = [(root, np.arange(len(features)))]

    while pending:
        node, rows = pending.pop()
        if len(rows) == 0:
            continue

        if isinstance(node, Leaf):
            values[rows] = pick(node)
            continue

        goes_left = features[rows, node.feature] <= node.threshold
        pending.append((node.left, rows[goes_left]))
        pending.append((node.right, rows[~goes_left]))

    return values


def tree_scores(root, features):
    """ Positive-class fraction of the leaf each row lands in. """
    return _route(root, features, lambda leaf: leaf.fractions[1])


def tree_labels(root, features):
    """ Label of the leaf each row lands in. """
    return _route(root, features, lambda leaf: leaf.label)


def node_to_dict(node):
    common = {
        'gdi': node.gdi,
        'node_probability': node.node_probability,
        'samples': node.samples,
    }

    if isinstance(node, Leaf):
        return dict(common, label=node.label, fractions=list(node.fractions))

    return dict(common, feature=node.feature, threshold=node.threshold,
        left=node_to_dict(node.left), right=node_to_dict(node.right))


def node_from_dict(document):
    if 'feature' in document:
        return Branch(
            feature=int(document['feature']),
            threshold=float(document['threshold']),
            left=node_from_dict(document['left']),
            right=node_from_dict(document['right']),
            gdi=float(document['gdi']),
            node_probability=float(document['node_probability']),
            samples=int(document['samples']),
        )

    return Leaf(
        label=int(document['label']),
        fractions=tuple(float(fraction) for fraction in document['fractions']),
        gdi=float(document['gdi']),
        node_probability=float(document['node_probability']),
        samples=int(document['samples']),
    )


def _node_summary(node):
    return "samples {}, gdi {:.4f}, probability {:.4f}".format(node.samples, node.gdi, node.node_probability)


def describe_tree(root, feature_names=FEATURE_NAMES):
    """ Renders a tree as indented if/else rules, one line per edge or leaf. """

    lines = ["root: {}".format(_node_summary(root))]

    def describe(node, depth):
        indent = "|   " * depth

        if isinstance(node, Leaf):
            outcome = Outcome.from_label(node.label)
            lines.append("{}|--- class: {} (passed away fraction {:.4f})".format(
                indent, outcome.token, node.fractions[1]))
            return

        name = feature_names[node.feature]
        for operator, child in (('<=', node.left), ('>', node.right)):
            lines.append("{}|--- {} {} {!r}  [{}]".format(indent, name, operator, node.threshold, _node_summary(child)))
            describe(child, depth + 1)

    describe(root, 0)
    return "\n".join(lines) + "\n"


class DecisionTree(Classifier):
    """ A single CART tree; its score is the positive fraction of the leaf a row lands in. """

    UI_NAME = 'decision_tree'
    UI_DESCRIPTION = 'CART tree split on Gini\'s diversity index'
    INTERPRETABLE = True

    DEFAULT_PARAMS = {
        'max_depth': 10,
        'min_leaf': 2,
        'min_gain': 0.0,
    }

    def fit(self, features, labels):
        self.root = train_tree(features, labels, self.params)
        self.diagnostics['branches'] = branch_count(self.root)

    def _score_many(self, features):
        return tree_scores(self.root, features)

    def predictor_importance(self):
        return predictor_importance(self.root, self.feature_count)

    def describe(self, feature_names=FEATURE_NAMES):
        return describe_tree(self.root, feature_names)

    def get_state(self):
        return {'root': node_to_dict(self.root)}

    def set_state(self, state):
        self.root = node_from_dict(state['root'])
