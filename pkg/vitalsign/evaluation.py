"""
Model evaluation -- k-fold cross-validation, confusion-matrix metrics, ROC curves and AUC.

PassedAway (label 1) is the positive class throughout.
"""

import functools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .classifier import DEFAULT_THRESHOLD
from .errors import SingleClass, TooFewSamples, DimensionMismatch
from .features import fit_normalizer
from .imbalance import oversample
from .models import ModelSpec
from .workers import WorkerPool, derive_seed


log = logging.getLogger(__name__)

DEFAULT_FOLDS = 10

METRICS_COLUMNS = ['Classifier', 'Precision', 'Recall', 'F1-score', 'Interpretability', 'AUC']


class Metric(float):
    """ A metric value that remembers whether its denominator was zero (in which case it's 0). """

    def __new__(cls, value, degenerate=False):
        metric = super().__new__(cls, value)
        metric.degenerate = degenerate
        return metric

    def __repr__(self):
        return "Metric({!r}{})".format(float(self), ", degenerate" if self.degenerate else "")


def _ratio(numerator, denominator):
    if denominator == 0:
        return Metric(0.0, degenerate=True)
    return Metric(numerator / denominator)


@dataclass(frozen=True)
class ConfusionCounts:
    """ Outcome counts of a set of predictions. """

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @classmethod
    def from_predictions(cls, labels, predicted):
        labels = np.asarray(labels).astype(bool)
        predicted = np.asarray(predicted).astype(bool)

        return cls(
            tp=int(np.count_nonzero(labels & predicted)),
            fp=int(np.count_nonzero(~labels & predicted)),
            tn=int(np.count_nonzero(~labels & ~predicted)),
            fn=int(np.count_nonzero(labels & ~predicted)),
        )

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    def to_dict(self):
        return {'tp': self.tp, 'fp': self.fp, 'tn': self.tn, 'fn': self.fn}


def precision(counts):
    """ TP / (TP + FP). """
    return _ratio(counts.tp, counts.tp + counts.fp)


def recall(counts):
    """ TP / (TP + FN). """
    return _ratio(counts.tp, counts.tp + counts.fn)


def f1_score(precision_value, recall_value):
    """ Harmonic mean of a precision and a recall. """

    total = precision_value + recall_value
    if total == 0:
        return Metric(0.0, degenerate=True)
    return Metric(2.0 * precision_value * recall_value / total)


def f1(counts):
    p = precision(counts)
    r = recall(counts)

    value = f1_score(p, r)
    return Metric(float(value), degenerate=value.degenerate or p.degenerate or r.degenerate)


#
# Fold plans.
#

@dataclass(frozen=True, eq=False)
class FoldPlan:
    """ k disjoint sets of row indices (each sorted) that together cover every row. """

    folds:      tuple
    stratified: bool = True

    def __len__(self):
        return len(self.folds)

    def __iter__(self):
        return iter(self.folds)

    def test_indices(self, index):
        return self.folds[index]

    def train_indices(self, index):
        return np.sort(np.concatenate([fold for i, fold in enumerate(self.folds) if i != index]))


def make_folds(labels, k=DEFAULT_FOLDS, seed=0, stratified=True):
    """ Splits rows into k folds, shuffled under the seed.

    Stratified plans shuffle each class and deal it round-robin over the folds, continuing from
    where the previous class stopped; every fold then holds within one of its fair share of each
    class. If a class has fewer than k rows the plan falls back to an unstratified shuffle.
    """

    labels = np.asarray(labels).ravel()
    count = len(labels)

    if k < 2:
        raise ValueError("need at least two folds")
    if count < k:
        raise TooFewSamples("can't split {} samples into {} folds".format(count, k))

    classes, class_counts = np.unique(labels, return_counts=True)
    if stratified and class_counts.min() < k:
        log.warning("a class has only %d samples, fewer than %d folds; using unstratified folds", class_counts.min(), k)
        stratified = False

    rng = np.random.default_rng(seed)

    if stratified:
        order = np.concatenate([rng.permutation(np.flatnonzero(labels == value)) for value in classes])
    else:
        order = rng.permutation(count)

    assignment = np.empty(count, dtype=np.int64)
    assignment[order] = np.arange(count) % k

    folds = tuple(np.flatnonzero(assignment == fold) for fold in range(k))
    return FoldPlan(folds, stratified)


#
# ROC analysis.
#

@dataclass(frozen=True)
class RocPoint:
    fpr:       float
    tpr:       float
    threshold: float


def roc_curve(scores, labels):
    """ Returns the ROC points of a scoring, one per distinct score, sorted by false-positive rate.

    The first point is (0, 0) at an infinite threshold; the last is (1, 1) at the lowest score.
    """

    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel().astype(np.int64)

    if len(scores) != len(labels):
        raise DimensionMismatch("got {} scores for {} labels".format(len(scores), len(labels)))

    positives = int(labels.sum())
    negatives = len(labels) - positives
    if positives == 0 or negatives == 0:
        raise SingleClass("a ROC curve needs both classes present")

    order = np.argsort(-scores, kind='stable')
    scores = scores[order]
    labels = labels[order]

    true_positives = np.cumsum(labels)
    false_positives = np.cumsum(1 - labels)

    # Close a group at the last row of each run of equal scores.
    ends = np.concatenate([np.flatnonzero(scores[1:] != scores[:-1]), [len(scores) - 1]])

    points = [RocPoint(0.0, 0.0, math.inf)]
    for end in ends:
        points.append(RocPoint(false_positives[end] / negatives, true_positives[end] / positives, float(scores[end])))

    return points


def auc(points):
    """ Area under a ROC curve by the trapezoidal rule. """

    area = 0.0
    for previous, current in zip(points, points[1:]):
        area += (current.fpr - previous.fpr) * (current.tpr + previous.tpr) / 2.0
    return float(area)


def roc_frame(points):
    """ Returns ROC points as a DataFrame with columns fpr,tpr,threshold. """
    return pd.DataFrame([(point.fpr, point.tpr, point.threshold) for point in points], columns=['fpr', 'tpr', 'threshold'])


#
# Cross-validation.
#

@dataclass(frozen=True, eq=False)
class PreparedFold:
    """ One fold's training and test rows, after normalization and (training-only) oversampling. """

    index:           int
    train_features:  np.ndarray
    train_labels:    np.ndarray
    train_synthetic: np.ndarray
    test_features:   np.ndarray
    test_labels:     np.ndarray
    test_indices:    np.ndarray
    normalizer:      object


def prepare_fold(features, labels, train_indices, test_indices, balance=None, seed=0, index=0):
    """ Normalizes a fold and oversamples its training rows.

    Every statistic is learned from the training rows alone; test rows are only transformed.
    """

    train_features = features[train_indices]
    train_labels = labels[train_indices]

    normalizer = fit_normalizer(train_features)
    train_features = normalizer.apply_matrix(train_features)
    test_features = normalizer.apply_matrix(features[test_indices])

    synthetic = np.zeros(len(train_labels), dtype=bool)
    if balance is not None:
        balanced = oversample(train_features, train_labels, replace(balance, seed=seed))
        train_features, train_labels, synthetic = balanced.features, balanced.labels, balanced.synthetic

    return PreparedFold(
        index=index,
        train_features=train_features,
        train_labels=train_labels,
        train_synthetic=synthetic,
        test_features=test_features,
        test_labels=labels[test_indices],
        test_indices=np.asarray(test_indices),
        normalizer=normalizer,
    )


def _fold_seeds(seed, index):
    """ Returns (oversampling seed, model seed) for a fold. """
    fold_seed = derive_seed(seed, index)
    return derive_seed(fold_seed, 0), derive_seed(fold_seed, 1)


def _evaluate_fold(features, labels, plan, specs, balance, seed, index):
    """ Prepares one fold and returns (test indices, [test scores of each spec], synthetic count). """

    balance_seed, model_seed = _fold_seeds(seed, index)
    prepared = prepare_fold(features, labels, plan.train_indices(index), plan.test_indices(index),
        balance, balance_seed, index)

    scores = []
    for spec in specs:
        params = dict(spec.params)
        if spec.classifier.takes_seed():
            params['seed'] = model_seed

        model = spec.classifier.train(prepared.train_features, prepared.train_labels, params)
        scores.append(model.score_many(prepared.test_features))

    log.debug("fold %d: %d training rows (%d synthetic), %d test rows", index,
        len(prepared.train_labels), int(prepared.train_synthetic.sum()), len(prepared.test_labels))
    return prepared.test_indices, scores, int(prepared.train_synthetic.sum())


@dataclass(frozen=True)
class FoldResult:
    index:       int
    counts:      ConfusionCounts
    precision:   Metric
    recall:      Metric
    f1:          Metric
    n_synthetic: int = 0

    def to_dict(self):
        return {
            'index': self.index,
            'counts': self.counts.to_dict(),
            'precision': float(self.precision),
            'recall': float(self.recall),
            'f1': float(self.f1),
            'degenerate': bool(self.precision.degenerate or self.recall.degenerate or self.f1.degenerate),
            'synthetic_training_rows': self.n_synthetic,
        }


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """ Cross-validated performance of one classifier variant.

    Aggregate precision, recall and F1 are means over folds; pooled counts and pooled F1 come from
    every fold's predictions taken together. The ROC curve and AUC are computed over the pooled scores.
    """

    variant:        str
    interpretable:  bool
    threshold:      float
    folds:          tuple
    precision:      float
    recall:         float
    f1:             float
    pooled_counts:  ConfusionCounts
    pooled_f1:      float
    roc_points:     list
    auc:            float
    scores:         np.ndarray = field(repr=False)
    labels:         np.ndarray = field(repr=False)
    stratified:     bool = True

    def to_dict(self):
        return {
            'variant': self.variant,
            'interpretable': self.interpretable,
            'threshold': self.threshold,
            'stratified': self.stratified,
            'folds': [fold.to_dict() for fold in self.folds],
            'mean': {'precision': self.precision, 'recall': self.recall, 'f1': self.f1},
            'pooled': {
                'counts': self.pooled_counts.to_dict(),
                'f1': self.pooled_f1,
                'scores': self.scores.tolist(),
                'labels': self.labels.tolist(),
            },
            'roc': [[point.fpr, point.tpr, _json_threshold(point.threshold)] for point in self.roc_points],
            'auc': self.auc,
        }


def _json_threshold(value):
    return "inf" if math.isinf(value) else value


def _assemble_report(spec, plan, labels, fold_outcomes, spec_index, threshold):
    pooled_scores = np.empty(len(labels))
    folds = []

    for index, (test_indices, scores, n_synthetic) in enumerate(fold_outcomes):
        fold_scores = scores[spec_index]
        pooled_scores[test_indices] = fold_scores

        counts = ConfusionCounts.from_predictions(labels[test_indices], fold_scores >= threshold)
        folds.append(FoldResult(index, counts, precision(counts), recall(counts), f1(counts), n_synthetic))

    pooled_counts = ConfusionCounts()
    for fold in folds:
        pooled_counts = pooled_counts + fold.counts

    points = roc_curve(pooled_scores, labels)
    return EvaluationReport(
        variant=spec.variant,
        interpretable=spec.classifier.INTERPRETABLE,
        threshold=threshold,
        folds=tuple(folds),
        precision=float(np.mean([fold.precision for fold in folds])),
        recall=float(np.mean([fold.recall for fold in folds])),
        f1=float(np.mean([fold.f1 for fold in folds])),
        pooled_counts=pooled_counts,
        pooled_f1=float(f1(pooled_counts)),
        roc_points=points,
        auc=auc(points),
        scores=pooled_scores,
        labels=np.asarray(labels).copy(),
        stratified=plan.stratified,
    )


def cross_validate_many(features, labels, specs, balance=None, k=DEFAULT_FOLDS, seed=0,
        threshold=DEFAULT_THRESHOLD, stratified=True, pool=None):
    """ Cross-validates several model specs over the same folds; returns one report per spec, in order.

    Each fold is normalized and oversampled once and shared by every spec. Folds are independent
    and may run on different workers; results don't depend on the number of workers.
    """

    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64).ravel()
    specs = [spec if isinstance(spec, ModelSpec) else ModelSpec(spec) for spec in specs]
    pool = pool or WorkerPool(1)

    if len(features) != len(labels):
        raise DimensionMismatch("got {} labels for {} feature rows".format(len(labels), len(features)))

    plan = make_folds(labels, k, seed, stratified)

    task = functools.partial(_evaluate_fold, features, labels, plan, specs, balance, seed)
    fold_outcomes = pool.map(task, range(len(plan)))

    reports = [_assemble_report(spec, plan, labels, fold_outcomes, i, threshold) for i, spec in enumerate(specs)]

    for report in reports:
        log.info("%s: mean F1 %.4f, AUC %.4f", report.variant, report.f1, report.auc)
    return reports


def cross_validate(features, labels, model_spec, balance=None, k=DEFAULT_FOLDS, seed=0,
        threshold=DEFAULT_THRESHOLD, stratified=True, pool=None):
    """ Cross-validates one model spec; returns its EvaluationReport. """

    return cross_validate_many(features, labels, [model_spec], balance, k, seed, threshold, stratified, pool)[0]


def metrics_table(reports):
    """ Returns the per-model results table, best mean F1 first. """

    rows = [
        (report.variant, report.precision, report.recall, report.f1,
            'transparent' if report.interpretable else 'black box', report.auc)
        for report in reports
    ]

    table = pd.DataFrame(rows, columns=METRICS_COLUMNS)
    return table.sort_values('F1-score', ascending=False, kind='stable').reset_index(drop=True)
