"""
k-nearest-neighbour classifier.
"""

import numpy as np
from scipy.spatial.distance import cdist

from ..classifier import Classifier
from ..errors import KTooLarge


# Queries are compared against the training set in blocks of this many rows.
QUERY_BLOCK = 512


class NearestNeighbors(Classifier):
    """ Scores a row by the fraction of positives among its k Euclidean-nearest training rows.

    Distance ties are broken in favour of the lower training row index.
    """

    UI_NAME = 'knn'
    UI_DESCRIPTION = 'k-nearest neighbours by Euclidean distance'
    INTERPRETABLE = False

    DEFAULT_PARAMS = {
        'k': 100,
    }


    def fit(self, features, labels):
        k = int(self.params['k'])
        if k < 1:
            raise ValueError("k must be at least 1")
        if k > len(labels):
            raise KTooLarge("k = {} exceeds the {} training rows".format(k, len(labels)))

        self.k = k
        self.training_features = features.copy()
        self.training_labels = labels.copy()


    def neighbours(self, features):
        """ Returns the (n, k) indices of each query row's nearest training rows, nearest first. """

        features = self._check_features(features)
        found = np.empty((len(features), self.k), dtype=np.int64)

        for start in range(0, len(features), QUERY_BLOCK):
            distances = cdist(features[start:start + QUERY_BLOCK], self.training_features, 'sqeuclidean')
            found[start:start + QUERY_BLOCK] = np.argsort(distances, axis=1, kind='stable')[:, :self.k]

        return found


    def _score_many(self, features):
        return self.training_labels[self.neighbours(features)].mean(axis=1)


    def get_state(self):
        return {
            'k': self.k,
            'features': self.training_features.tolist(),
            'labels': self.training_labels.tolist(),
        }

    def set_state(self, state):
        self.k = int(state['k'])
        self.training_labels = np.array(state['labels'], dtype=np.int64)
        self.training_features = np.array(state['features'], dtype=np.float64).reshape(len(self.training_labels), -1)
