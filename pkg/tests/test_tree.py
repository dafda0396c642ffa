import numpy as np
import pytest

from vitalsign.classifiers.tree import (Branch, DecisionTree, Leaf, describe_tree, find_best_split, gini,
    iter_nodes, node_from_dict, node_risk, node_to_dict, predictor_importance, train_tree)
from vitalsign.errors import InvalidDistribution, NoBranches
from vitalsign.features import FEATURE_NAMES, extract_matrix
from vitalsign.preprocess import Signal

from conftest import separable_data


def test_gini_examples():
    assert gini([0.5, 0.5]) == 0.5
    assert gini([1.0, 0.0]) == 0.0
    assert gini([0.25] * 4) == 0.75


@pytest.mark.parametrize('fractions', [[0.6, 0.6], [1.2, -0.2], [], [np.nan, 1.0]])
def test_gini_rejects_invalid_distributions(fractions):
    with pytest.raises(InvalidDistribution):
        gini(fractions)


def naive_best_split(features, labels):
    """ Tries every feature and midpoint; keeps the first strictly better split. """

    def impurity(rows):
        if len(rows) == 0:
            return 0.0
        positive = np.mean(rows)
        return 1.0 - (positive ** 2 + (1 - positive) ** 2)

    parent = impurity(labels)
    best = None

    for feature in range(features.shape[1]):
        values = np.unique(features[:, feature])
        for below, above in zip(values[:-1], values[1:]):
            threshold = (below + above) / 2
            left = labels[features[:, feature] <= threshold]
            right = labels[features[:, feature] > threshold]

            gain = parent - (len(left) * impurity(left) + len(right) * impurity(right)) / len(labels)
            if best is None or gain > best[0] + 1e-12:
                best = (gain, feature, threshold)

    return best


def test_root_split_matches_brute_force(rng):
    for _ in range(100):
        features = rng.normal(size=(12, 3))
        labels = rng.integers(0, 2, 12)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]

        expected = naive_best_split(features, labels)
        split = find_best_split(features, labels, np.ones(12), range(3))

        assert split.gain == pytest.approx(expected[0], abs=1e-12)
        assert split.feature == expected[1]
        assert split.threshold == expected[2]


def test_split_ties_go_to_lowest_feature():
    features = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    labels = np.array([0, 0, 1, 1])

    split = find_best_split(features, labels, np.ones(4), [0, 1])

    assert split.feature == 0
    assert split.threshold == 1.5
    assert split.gain == 0.5


def test_single_split_importance():
    features = np.array([[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    labels = np.array([0, 0, 1, 1])

    root = train_tree(features, labels, {'min_leaf': 1})

    assert isinstance(root, Branch)
    assert isinstance(root.left, Leaf) and isinstance(root.right, Leaf)
    assert node_risk(root) == 0.5
    assert predictor_importance(root, 2).tolist() == [0.5, 0.0]


def test_importance_accounts_for_all_removed_risk(rng):
    features, labels = separable_data(rng, gap=0.5)
    root = train_tree(features, labels)

    branches = [node for node in iter_nodes(root) if isinstance(node, Branch)]
    leaves = [node for node in iter_nodes(root) if isinstance(node, Leaf)]

    importance = predictor_importance(root, features.shape[1])
    removed = node_risk(root) - sum(node_risk(leaf) for leaf in leaves)

    assert (importance >= -1e-12).all()
    assert importance.sum() * len(branches) == pytest.approx(removed)


def test_pure_node_has_no_importance(rng):
    root = train_tree(rng.normal(size=(6, 2)), [1] * 6)

    assert isinstance(root, Leaf)
    assert node_risk(root) == 0.0
    with pytest.raises(NoBranches):
        predictor_importance(root, 2)


def test_label_swap_mirrors_the_tree(rng):
    features, labels = separable_data(rng, gap=0.3)

    original = train_tree(features, labels)
    swapped = train_tree(features, 1 - labels)

    for a, b in zip(iter_nodes(original), iter_nodes(swapped)):
        assert type(a) is type(b)
        assert a.gdi == b.gdi
        if isinstance(a, Branch):
            assert (a.feature, a.threshold) == (b.feature, b.threshold)
        else:
            assert a.fractions == b.fractions[::-1]


def test_fits_separable_data(rng):
    features, labels = separable_data(rng, gap=5.0)
    model = DecisionTree.train(features, labels)

    assert (model.predict_many(features) == labels).all()
    assert model.diagnostics['branches'] >= 1


def test_depth_zero_is_a_leaf(rng):
    features, labels = separable_data(rng)
    model = DecisionTree.train(features, labels, {'max_depth': 0})

    assert isinstance(model.root, Leaf)
    assert np.allclose(model.score_many(features), 0.5)


def test_min_leaf_is_respected(rng):
    features = rng.normal(size=(60, 3))
    labels = rng.integers(0, 2, 60)

    root = train_tree(features, labels, {'min_leaf': 7})
    assert all(leaf.samples >= 7 for leaf in iter_nodes(root) if isinstance(leaf, Leaf))


def test_bad_params(rng):
    features, labels = separable_data(rng)

    with pytest.raises(ValueError):
        train_tree(features, labels, {'min_leaf': 0})
    with pytest.raises(ValueError):
        train_tree(features, labels, {'max_depth': -1})


def test_zero_weight_rows_are_left_out():
    features = np.array([[0.0], [1.0], [2.0], [3.0]])
    labels = np.array([0, 1, 0, 1])

    root = train_tree(features, labels, {'min_leaf': 1}, sample_weight=[1, 0, 1, 0])

    assert isinstance(root, Leaf)
    assert root.samples == 2
    assert root.fractions == (1.0, 0.0)


def test_node_dict_round_trip(rng):
    features, labels = separable_data(rng, gap=0.5)
    root = train_tree(features, labels)

    assert node_from_dict(node_to_dict(root)) == root


def test_describe_tree():
    features = np.array([[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    root = train_tree(features, [0, 0, 1, 1], {'min_leaf': 1})

    text = describe_tree(root, ['mean', 'std'])
    lines = text.splitlines()

    assert lines[0].startswith("root: samples 4")
    assert lines[1].startswith("|--- mean <= 1.5")
    assert lines[2] == "|   |--- class: survived (passed away fraction 0.0000)"
    assert lines[3].startswith("|--- mean > 1.5")
    assert lines[4] == "|   |--- class: died (passed away fraction 1.0000)"


def test_risk_ledger(rng):
    for _ in range(10):
        features = rng.normal(size=(80, 4))
        features[:, 3] = 1.0
        labels = (features[:, 0] + 0.5 * rng.normal(size=80) > 0).astype(np.int64)

        root = train_tree(features, labels)
        for node in iter_nodes(root):
            if isinstance(node, Branch):
                assert node_risk(node) >= node_risk(node.left) + node_risk(node.right) - 1e-12

        importance = predictor_importance(root, 4)
        used = {node.feature for node in iter_nodes(root) if isinstance(node, Branch)}

        assert (importance >= 0).all()
        assert importance[3] == 0.0
        assert all(importance[feature] == 0.0 for feature in range(4) if feature not in used)


def test_power_twins_never_share_split_credit(rng):
    signals = [Signal(rng.normal(80.0, 5.0, 64) + rng.normal(0.0, 3.0), 0.5) for _ in range(80)]
    columns = [FEATURE_NAMES.index('averaged_power'), FEATURE_NAMES.index('energy_spectral_density')]
    features = extract_matrix(signals)[:, columns]
    labels = rng.permutation(np.arange(80) % 2)

    both = predictor_importance(train_tree(features, labels), feature_count=2)
    density_alone = predictor_importance(train_tree(features[:, 1:], labels), feature_count=1)

    # Both features sort the rows identically; every tie goes to averaged power.
    assert both[0] > 0
    assert both[1] == 0.0
    assert density_alone[0] == both[0]
