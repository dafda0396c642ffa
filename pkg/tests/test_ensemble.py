import numpy as np
import pytest

from vitalsign.classifiers.ensemble import BoostedTrees, RandomForest, features_per_split
from vitalsign.classifiers.tree import DecisionTree

from conftest import separable_data


def noisy_data(rng, count=120):
    features = rng.normal(size=(count, 4))
    labels = (features[:, 0] + features[:, 1] + rng.normal(0, 1.0, count) > 0).astype(np.int64)
    return features, labels


def test_features_per_split():
    assert features_per_split({'mtry': None}, 12) == 4
    assert features_per_split({'mtry': 20}, 12) == 12

    with pytest.raises(ValueError):
        features_per_split({'mtry': 0}, 12)


def test_single_full_tree_forest_is_a_tree(rng):
    features, labels = noisy_data(rng)

    forest = RandomForest.train(features, labels, {'n_trees': 1, 'mtry': 4, 'bootstrap': False})
    tree = DecisionTree.train(features, labels)

    queries = rng.normal(size=(50, 4))
    assert np.array_equal(forest.score_many(queries), tree.predict_many(queries).astype(np.float64))


def test_scores_are_vote_fractions(rng):
    features, labels = noisy_data(rng)
    forest = RandomForest.train(features, labels, {'n_trees': 8})

    votes = forest.score_many(rng.normal(size=(30, 4))) * 8
    assert np.allclose(votes, np.round(votes))


def test_forest_is_seeded(rng):
    features, labels = noisy_data(rng)

    first = RandomForest.train(features, labels, {'n_trees': 5, 'seed': 11})
    second = RandomForest.train(features, labels, {'n_trees': 5, 'seed': 11})

    queries = rng.normal(size=(30, 4))
    assert np.array_equal(first.score_many(queries), second.score_many(queries))


def test_out_of_bag_accuracy(rng):
    features, labels = noisy_data(rng)

    bagged = RandomForest.train(features, labels, {'n_trees': 20})
    assert 0.0 <= bagged.out_of_bag_accuracy <= 1.0

    unbagged = RandomForest.train(features, labels, {'n_trees': 2, 'bootstrap': False})
    assert unbagged.out_of_bag_accuracy is None


def test_boosting_respects_training_error_bound(rng):
    features, labels = noisy_data(rng)
    model = BoostedTrees.train(features, labels, {'n_rounds': 15, 'max_depth': 1})

    diagnostics = model.diagnostics
    assert all(0 < error < 0.5 for error in diagnostics['round_errors'])
    assert diagnostics['training_error'] <= diagnostics['training_error_bound'] + 1e-12


def test_boosting_stops_on_a_perfect_learner(rng):
    features, labels = separable_data(rng, gap=5.0)
    model = BoostedTrees.train(features, labels)

    assert len(model.trees) == 1
    assert 'perfect' in model.diagnostics['stop_reason']
    assert model.predict_many(features).tolist() == labels.tolist()


def test_boosting_scores_lie_in_unit_interval(rng):
    features, labels = noisy_data(rng)
    model = BoostedTrees.train(features, labels, {'n_rounds': 5})

    scores = model.score_many(rng.normal(size=(40, 4)))
    assert ((scores >= 0) & (scores <= 1)).all()


def test_boosting_state_round_trip(rng):
    features, labels = noisy_data(rng)
    model = BoostedTrees.train(features, labels, {'n_rounds': 4, 'max_depth': 2})

    restored = BoostedTrees(4)
    restored.set_state(model.get_state())

    queries = rng.normal(size=(20, 4))
    assert np.array_equal(restored.score_many(queries), model.score_many(queries))


def test_out_of_bag_accuracy_tracks_held_out_accuracy(rng):
    def diagonal(count):
        features = rng.uniform(-1.0, 1.0, size=(count, 2))
        return features, (features[:, 0] + features[:, 1] > 0).astype(np.int64)

    features, labels = diagonal(400)
    held_out, held_out_labels = diagonal(400)

    forest = RandomForest.train(features, labels, {'n_trees': 60, 'seed': 5})
    tree = DecisionTree.train(features, labels)

    tree_accuracy = np.mean(tree.predict_many(held_out) == held_out_labels)
    assert forest.out_of_bag_accuracy >= tree_accuracy - 0.02
