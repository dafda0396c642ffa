"""
Linear classifiers: linear discriminant analysis, L2-regularized logistic regression, and a
primal linear SVM.
"""

import logging
import math

import numpy as np
from scipy.special import expit

from ..classifier import Classifier, signed_labels, sigmoid
from ..errors import SingularCovariance, TooFewSamples


log = logging.getLogger(__name__)

# Pooled covariances worse conditioned than this get a ridge added to their diagonal.
MAXIMUM_CONDITION = 1e12
RIDGE_FACTOR = 1e-6

# Armijo sufficient-decrease constant and step shrink factor for the backtracking line search.
ARMIJO_FRACTION = 1e-4
BACKTRACK_FACTOR = 0.5
MINIMUM_STEP = 1e-20


class LinearModel(Classifier):
    """ Shared machinery for models that score sigmoid(w·x + b). """

    def decision_function(self, features):
        return features @ self.weights + self.bias

    def _score_many(self, features):
        return sigmoid(self.decision_function(features))

    def get_state(self):
        return {'weights': self.weights.tolist(), 'bias': self.bias}

    def set_state(self, state):
        self.weights = np.array(state['weights'], dtype=np.float64)
        self.bias = float(state['bias'])


class LinearDiscriminant(LinearModel):
    """ Two-class LDA with a shared (pooled) covariance; scores are positive-class posteriors. """

    UI_NAME = 'linear_discriminant'
    UI_DESCRIPTION = 'linear discriminant with a pooled covariance and empirical priors'
    INTERPRETABLE = True


    @staticmethod
    def pooled_covariance(features, labels):
        """ Returns the within-class scatter divided by n - 2. """

        scatter = np.zeros((features.shape[1], features.shape[1]))
        for label in (0, 1):
            centred = features[labels == label] - features[labels == label].mean(axis=0)
            scatter += centred.T @ centred
        return scatter / (len(labels) - 2)


    def fit(self, features, labels):
        counts = np.bincount(labels, minlength=2)
        if counts.min() < 2:
            raise TooFewSamples("linear discriminant needs at least two rows of each class, got {}".format(counts.tolist()))

        means = [features[labels == label].mean(axis=0) for label in (0, 1)]
        covariance = self.pooled_covariance(features, labels)
        dimension = covariance.shape[0]

        self.diagnostics['ridge'] = 0.0
        if not np.linalg.cond(covariance) <= MAXIMUM_CONDITION:
            ridge = RIDGE_FACTOR * np.trace(covariance) / dimension
            covariance = covariance + ridge * np.eye(dimension)
            self.diagnostics['ridge'] = ridge

            log.warning("pooled covariance is near-singular; added a ridge of %g", ridge)
            if not ridge > 0 or not np.linalg.cond(covariance) <= MAXIMUM_CONDITION:
                raise SingularCovariance("pooled covariance stays singular even with a ridge")

        self.weights = np.linalg.solve(covariance, means[1] - means[0])
        self.bias = float(-0.5 * self.weights @ (means[0] + means[1]) + math.log(counts[1] / counts[0]))


class LogisticRegression(LinearModel):
    """ L2-regularized logistic regression fitted by gradient descent with backtracking. """

    UI_NAME = 'logistic_regression'
    UI_DESCRIPTION = 'L2-regularized logistic regression'
    INTERPRETABLE = True

    DEFAULT_PARAMS = {
        'l2': 1e-3,
        'max_iter': 500,
        'tol': 1e-6,
    }


    @staticmethod
    def objective_and_gradient(parameters, features, labels, l2):
        """ Mean log-loss plus (l2 / 2)·|w|², and its gradient, at parameters = (w, b).

        The bias is the last entry of `parameters` and isn't regularized.
        """

        weights, bias = parameters[:-1], parameters[-1]
        margins = features @ weights + bias

        loss = np.mean(np.logaddexp(0.0, margins) - labels * margins) + 0.5 * l2 * (weights @ weights)

        residuals = expit(margins) - labels
        gradient = np.empty_like(parameters)
        gradient[:-1] = features.T @ residuals / len(labels) + l2 * weights
        gradient[-1] = residuals.mean()

        return float(loss), gradient


    def fit(self, features, labels):
        l2 = float(self.params['l2'])
        tol = float(self.params['tol'])
        labels = labels.astype(np.float64)

        parameters = np.zeros(features.shape[1] + 1)
        loss, gradient = self.objective_and_gradient(parameters, features, labels, l2)
        step = 1.0

        iterations = 0
        converged = False

        for iterations in range(1, int(self.params['max_iter']) + 1):
            norm_squared = gradient @ gradient
            if math.sqrt(norm_squared) < tol:
                converged = True
                break

            # Backtrack until the Armijo condition holds.
            while True:
                candidate = parameters - step * gradient
                candidate_loss, candidate_gradient = self.objective_and_gradient(candidate, features, labels, l2)

                if candidate_loss <= loss - ARMIJO_FRACTION * step * norm_squared or step < MINIMUM_STEP:
                    break
                step *= BACKTRACK_FACTOR

            parameters, loss, gradient = candidate, candidate_loss, candidate_gradient

            # Let the next search start a little more boldly.
            step = min(1.0, step / BACKTRACK_FACTOR)

        else:
            converged = math.sqrt(gradient @ gradient) < tol

        if not converged:
            log.warning("logistic regression stopped after %d iterations without converging", iterations)

        self.weights = parameters[:-1].copy()
        self.bias = float(parameters[-1])
        self.diagnostics.update({
            'converged': bool(converged),
            'iterations': iterations,
            'objective': loss,
            'gradient_norm': float(math.sqrt(gradient @ gradient)),
        })


class LinearSVM(LinearModel):
    """ Hinge-loss linear SVM trained in the primal by Pegasos-style subgradient epochs. """

    UI_NAME = 'linear_svm'
    UI_DESCRIPTION = 'linear (dot product kernel) support vector machine'
    INTERPRETABLE = False

    DEFAULT_PARAMS = {
        'C': 1.0,
        'epochs': 20,
        'seed': 0,
    }


    @staticmethod
    def objective(augmented_weights, augmented_features, signs, regularization):
        """ (λ/2)·|w|² plus the mean hinge loss, with the bias folded into w. """

        hinge = np.maximum(0.0, 1.0 - signs * (augmented_features @ augmented_weights))
        return float(0.5 * regularization * (augmented_weights @ augmented_weights) + hinge.mean())


    def fit(self, features, labels):
        count = len(labels)
        signs = signed_labels(labels)
        regularization = 1.0 / (float(self.params['C']) * count)

        # A constant column stands in for the bias.
        augmented = np.hstack([features, np.ones((count, 1))])
        weights = np.zeros(augmented.shape[1])

        best_weights = weights.copy()
        best_objective = self.objective(weights, augmented, signs, regularization)

        rng = np.random.default_rng(self.params['seed'])
        step_number = 0

        for _ in range(int(self.params['epochs'])):
            for row in rng.permutation(count):
                step_number += 1
                rate = 1.0 / (regularization * step_number)

                violated = signs[row] * (augmented[row] @ weights) < 1.0
                weights *= 1.0 - rate * regularization
                if violated:
                    weights += rate * signs[row] * augmented[row]

            # Keep the best end-of-epoch iterate; the zero vector is the first candidate.
            current = self.objective(weights, augmented, signs, regularization)
            if current < best_objective:
                best_objective = current
                best_weights = weights.copy()

        self.weights = best_weights[:-1]
        self.bias = float(best_weights[-1])
        self.diagnostics['objective'] = best_objective
        self.diagnostics['regularization'] = regularization
