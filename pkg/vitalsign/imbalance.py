"""
Adaptive weighted minority oversampling.

A simplified take on adaptive semi-unsupervised weighted oversampling: the minority class is
clustered agglomeratively (refusing merges that would bridge over majority rows), each cluster is
weighted by how close it sits to the majority class, and synthetic rows are interpolated between
same-cluster neighbours in proportion to those weights.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist, squareform

from .errors import DataValidationError, DegenerateMinority, DimensionMismatch, SingleClass


log = logging.getLogger(__name__)

# Mean distances below this are treated as this, so a minority row sitting on a majority row
# gives its cluster a large (but finite) weight.
MINIMUM_MAJORITY_DISTANCE = 1e-12


@dataclass(frozen=True)
class OversampleConfig:
    """ Oversampler settings.

    Fields:
        target_ratio -- Desired minority:majority ratio after oversampling.
        k_majority -- Majority neighbours used to judge how hard each minority row is.
        k_intra -- Same-cluster neighbours a synthetic row may be interpolated toward.
        linkage_threshold_quantile -- Clusters stop merging once their distance exceeds this
                                      quantile of the minority pairwise distances.
        seed -- Seed for the interpolation draws.
    """

    target_ratio: float = 1.0
    k_majority: int = 5
    k_intra: int = 5
    linkage_threshold_quantile: float = 0.9
    seed: int = 0

    def validate(self):
        if not self.target_ratio > 0:
            raise ValueError("target_ratio must be positive")
        if self.k_majority < 1 or self.k_intra < 1:
            raise ValueError("neighbour counts must be at least 1")
        if not 0 < self.linkage_threshold_quantile <= 1:
            raise ValueError("linkage_threshold_quantile must lie in (0, 1]")


@dataclass(frozen=True, eq=False)
class BalancedSet:
    """ A training set after oversampling: the original rows in their original order, then the synthetics.

    Fields:
        features -- All rows; originals first.
        labels -- Labels for all rows; synthetics carry the minority label.
        synthetic -- True for each synthetic row.
        parents -- (n_synthetic, 2) original row indices each synthetic was interpolated between.
        clusters -- Cluster id of each original minority row, in row order.
        weights -- Oversampling weight of each cluster; nonnegative, summing to 1.
        minority_label -- The label that was oversampled.
    """

    features:       np.ndarray
    labels:         np.ndarray
    synthetic:      np.ndarray
    parents:        np.ndarray
    clusters:       np.ndarray
    weights:        np.ndarray
    minority_label: int = field(default=1)

    @property
    def n_synthetic(self):
        return int(self.synthetic.sum())

    @property
    def n_original(self):
        return len(self.labels) - self.n_synthetic

    def class_counts(self):
        """ Returns (minority count, majority count) after oversampling. """
        minority = int(np.count_nonzero(self.labels == self.minority_label))
        return minority, len(self.labels) - minority

    def synthetic_counts_per_cluster(self):
        """ Returns how many synthetics were drawn from each cluster. """

        minority_rows = np.flatnonzero(self.labels[:self.n_original] == self.minority_label)
        cluster_of_row = dict(zip(minority_rows.tolist(), self.clusters.tolist()))

        counts = np.zeros(len(self.weights), dtype=np.int64)
        for first, _ in self.parents:
            counts[cluster_of_row[int(first)]] += 1
        return counts


def _class_roles(labels):
    """ Returns (minority label, majority label); equal classes treat the higher label as minority. """

    classes, counts = np.unique(labels, return_counts=True)

    if len(classes) < 2:
        raise SingleClass("oversampling needs two classes; found only {}".format(classes.tolist()))
    if len(classes) > 2:
        raise DataValidationError("oversampling supports two classes; found {}".format(classes.tolist()))

    if counts[0] < counts[1]:
        return int(classes[0]), int(classes[1])
    return int(classes[1]), int(classes[0])


def cluster_minority(features, labels, minority_label, quantile):
    """ Average-linkage agglomerative clustering of the minority rows.

    Merging stops once the closest pair of clusters is farther apart than the given quantile of
    minority pairwise distances. A merge is refused whenever the nearest row (of either class) to
    the midpoint between the two cluster centroids is a majority row.

    Returns one cluster id per minority row; ids are numbered in order of each cluster's first row.
    """

    minority_rows = np.flatnonzero(labels == minority_label)
    points = features[minority_rows]
    count = len(points)

    condensed = pdist(points)
    threshold = np.quantile(condensed, quantile)

    # Between-cluster distances, and the same with refused merges masked out.
    distances = squareform(condensed)
    candidates = distances.copy()
    np.fill_diagonal(candidates, np.inf)

    members = [[i] for i in range(count)]
    sizes = np.ones(count)
    active = np.ones(count, dtype=bool)
    everything = cKDTree(features)

    while True:
        flat = np.argmin(candidates)
        i, j = divmod(int(flat), count)
        closest = candidates[i, j]

        if not closest <= threshold:
            break

        midpoint = (points[members[i]].mean(axis=0) + points[members[j]].mean(axis=0)) / 2
        _, nearest = everything.query(midpoint)

        if labels[nearest] != minority_label:
            candidates[i, j] = candidates[j, i] = np.inf
            continue

        # Merge j into i; average linkage via the Lance-Williams update.
        merged = (sizes[i] * distances[i] + sizes[j] * distances[j]) / (sizes[i] + sizes[j])
        distances[i, :] = distances[:, i] = merged

        members[i].extend(members[j])
        members[j] = []
        sizes[i] += sizes[j]
        active[j] = False

        # The merged cluster gets a fresh chance at every pairing.
        candidates[i, :] = candidates[:, i] = np.where(active, merged, np.inf)
        candidates[j, :] = candidates[:, j] = np.inf
        candidates[i, i] = np.inf

    clusters = np.empty(count, dtype=np.int64)
    groups = sorted((sorted(group) for group in members if group), key=lambda group: group[0])
    for cluster_id, group in enumerate(groups):
        clusters[group] = cluster_id

    return clusters


def cluster_weights(features, labels, minority_label, clusters, k_majority):
    """ Weights each cluster by the inverse mean distance of its members to their nearest majority rows.

    Singleton clusters get no weight whenever some cluster has more than one member.
    """

    minority = features[labels == minority_label]
    majority = features[labels != minority_label]

    k = min(k_majority, len(majority))
    distances, _ = cKDTree(majority).query(minority, k=k)
    per_row = distances.reshape(len(minority), -1).mean(axis=1)

    cluster_count = int(clusters.max()) + 1
    sizes = np.bincount(clusters, minlength=cluster_count)
    mean_distance = np.bincount(clusters, weights=per_row, minlength=cluster_count) / sizes

    weights = 1.0 / np.maximum(mean_distance, MINIMUM_MAJORITY_DISTANCE)
    if (sizes > 1).any():
        weights[sizes == 1] = 0.0

    return weights / weights.sum()


def allocate(weights, total):
    """ Splits `total` into whole counts proportional to `weights` (largest-remainder rounding). """

    shares = weights * total
    counts = np.floor(shares).astype(np.int64)
    shortfall = int(total - counts.sum())

    # Hand out the remainder by descending fractional part; earlier clusters win ties.
    order = np.lexsort((np.arange(len(weights)), -(shares - counts)))
    counts[order[:shortfall]] += 1
    return counts


def _no_synthetics(features, labels, minority_label, clusters, weights):
    return BalancedSet(
        features=features.copy(),
        labels=labels.copy(),
        synthetic=np.zeros(len(labels), dtype=bool),
        parents=np.empty((0, 2), dtype=np.int64),
        clusters=clusters,
        weights=weights,
        minority_label=minority_label,
    )


def oversample(features, labels, cfg=None):
    """ Oversamples the minority class until minority:majority reaches cfg.target_ratio.

    Args:
        features -- (n, d) training rows, ideally normalized.
        labels -- n labels of exactly two classes.
        cfg -- An OversampleConfig.

    Returns a BalancedSet.
    """

    cfg = cfg or OversampleConfig()
    cfg.validate()

    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64).ravel()

    if features.ndim != 2 or len(features) != len(labels):
        raise DimensionMismatch("oversampling needs one label per feature row")

    minority_label, _ = _class_roles(labels)
    minority_rows = np.flatnonzero(labels == minority_label)
    n_minority = len(minority_rows)
    n_majority = len(labels) - n_minority

    if n_minority < 2:
        raise DegenerateMinority("need at least two minority rows to interpolate, got {}".format(n_minority))

    needed = max(0, int(round(cfg.target_ratio * n_majority)) - n_minority)
    if needed == 0:
        log.warning("oversampling not needed: %d minority vs %d majority rows", n_minority, n_majority)
        return _no_synthetics(features, labels, minority_label, np.zeros(n_minority, dtype=np.int64), np.ones(1))

    clusters = cluster_minority(features, labels, minority_label, cfg.linkage_threshold_quantile)
    weights = cluster_weights(features, labels, minority_label, clusters, cfg.k_majority)
    counts = allocate(weights, needed)

    log.debug("minority rows form %d clusters; drawing %d synthetics", len(weights), needed)

    rng = np.random.default_rng(cfg.seed)
    synthetics = []
    parents = []

    for cluster_id, count in enumerate(counts):
        if count == 0:
            continue

        rows = minority_rows[clusters == cluster_id]
        points = features[rows]

        # Each member's k_intra nearest fellow members (itself excluded).
        if len(rows) > 1:
            _, nearest = cKDTree(points).query(points, k=min(cfg.k_intra + 1, len(rows)))
            nearest = nearest.reshape(len(rows), -1)
            neighbours = [[n for n in nearest[m] if n != m][:cfg.k_intra] for m in range(len(rows))]
        else:
            neighbours = [[0]]

        for _ in range(count):
            base = int(rng.integers(len(rows)))
            partner = neighbours[base][int(rng.integers(len(neighbours[base])))]
            step = rng.random()

            synthetics.append(points[base] + step * (points[partner] - points[base]))
            parents.append((rows[base], rows[partner]))

    synthetics = np.array(synthetics).reshape(-1, features.shape[1])
    return BalancedSet(
        features=np.vstack([features, synthetics]),
        labels=np.concatenate([labels, np.full(len(synthetics), minority_label, dtype=np.int64)]),
        synthetic=np.concatenate([np.zeros(len(labels), dtype=bool), np.ones(len(synthetics), dtype=bool)]),
        parents=np.array(parents, dtype=np.int64).reshape(-1, 2),
        clusters=clusters,
        weights=weights,
        minority_label=minority_label,
    )
