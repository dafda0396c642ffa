"""
Gaussian (RBF kernel) support vector machine, trained on the dual by sequential minimal optimization.
"""

import logging

import numpy as np
from scipy.spatial.distance import cdist

from ..classifier import Classifier, signed_labels, sigmoid


log = logging.getLogger(__name__)

# Floor for the curvature along an SMO update direction; guards against a non-positive kernel diagonal.
MINIMUM_CURVATURE = 1e-12

# Rows are scored in blocks of this many, to bound the size of the query kernel matrix.
SCORING_BLOCK = 1024


def rbf_kernel(first, second, gamma):
    """ Returns the matrix k(a, b) = exp(-γ·|a - b|²) between the rows of two matrices. """
    return np.exp(-gamma * cdist(first, second, 'sqeuclidean'))


def smo(kernel, signs, C, tol, max_iterations):
    """ Solves the SVM dual: min ½αᵀQα - Σα with Q = yyᵀ∘K, 0 ≤ α ≤ C, Σαy = 0.

    Works on the maximal violating pair each iteration and stops once the KKT violation drops
    below tol. Returns (alpha, rho, iterations, converged); the decision value is Σαᵢyᵢk(xᵢ, x) - rho.
    """

    count = len(signs)
    alpha = np.zeros(count)
    gradient = -np.ones(count)
    converged = False

    iterations = 0
    for iterations in range(1, max_iterations + 1):
        positive = signs > 0
        below_upper = alpha < C
        above_lower = alpha > 0

        # Indices that may move up / down along y without leaving the box.
        up = (positive & below_upper) | (~positive & above_lower)
        down = (positive & above_lower) | (~positive & below_upper)

        violation = -signs * gradient
        if not up.any() or not down.any():
            converged = True
            break

        i = int(np.flatnonzero(up)[np.argmax(violation[up])])
        j = int(np.flatnonzero(down)[np.argmin(violation[down])])

        gap = violation[i] - violation[j]
        if gap < tol:
            converged = True
            break

        curvature = max(kernel[i, i] + kernel[j, j] - 2.0 * kernel[i, j], MINIMUM_CURVATURE)
        step = gap / curvature

        # Stay inside the box for both coordinates.
        step = min(step, C - alpha[i] if signs[i] > 0 else alpha[i])
        step = min(step, alpha[j] if signs[j] > 0 else C - alpha[j])

        alpha[i] += signs[i] * step
        alpha[j] -= signs[j] * step
        alpha[i] = min(max(alpha[i], 0.0), C)
        alpha[j] = min(max(alpha[j], 0.0), C)

        gradient += step * signs * (kernel[i] - kernel[j])

    rho = _offset(alpha, signs, gradient, C)
    return alpha, rho, iterations, converged


def _offset(alpha, signs, gradient, C):
    """ The decision offset: the mean of yG over free vectors, or the midpoint of its feasible range. """

    signed_gradient = signs * gradient
    free = (alpha > 0) & (alpha < C)

    if free.any():
        return float(signed_gradient[free].mean())

    at_upper = alpha >= C
    positive = signs > 0

    # Bounds on rho from the vectors stuck at either end of the box.
    lower_bounds = signed_gradient[(positive & at_upper) | (~positive & ~at_upper)]
    upper_bounds = signed_gradient[(positive & ~at_upper) | (~positive & at_upper)]

    lower = lower_bounds.max() if len(lower_bounds) else -np.inf
    upper = upper_bounds.min() if len(upper_bounds) else np.inf

    if not np.isfinite(lower):
        return float(upper)
    if not np.isfinite(upper):
        return float(lower)
    return float((lower + upper) / 2.0)


class GaussianSVM(Classifier):
    """ Soft-margin SVM with a radial basis function kernel; the score is the sigmoid of the decision value. """

    UI_NAME = 'gaussian_svm'
    UI_DESCRIPTION = 'support vector machine with a radial basis function kernel'
    INTERPRETABLE = False

    DEFAULT_PARAMS = {
        'C': 1.0,
        'gamma': None,
        'tol': 1e-3,
        'max_passes': 20,
    }


    def fit(self, features, labels):
        signs = signed_labels(labels)
        C = float(self.params['C'])

        self.gamma = self.params['gamma']
        if self.gamma is None:
            self.gamma = 1.0 / features.shape[1]
        self.gamma = float(self.gamma)

        kernel = rbf_kernel(features, features, self.gamma)
        max_iterations = int(self.params['max_passes']) * len(labels)

        alpha, rho, iterations, converged = smo(kernel, signs, C, float(self.params['tol']), max_iterations)
        if not converged:
            log.warning("SMO stopped after %d iterations without reaching tolerance", iterations)

        support = alpha > 0
        self.support_vectors = features[support]
        self.coefficients = alpha[support] * signs[support]
        self.rho = rho

        # Kept for inspection only; not part of the saved state.
        self.alpha = alpha
        self.signs = signs

        self.diagnostics.update({
            'iterations': iterations,
            'converged': bool(converged),
            'support_vectors': int(support.sum()),
        })


    def decision_function(self, features):
        values = np.empty(len(features))
        for start in range(0, len(features), SCORING_BLOCK):
            block = features[start:start + SCORING_BLOCK]
            values[start:start + SCORING_BLOCK] = rbf_kernel(block, self.support_vectors, self.gamma) @ self.coefficients
        return values - self.rho


    def _score_many(self, features):
        return sigmoid(self.decision_function(features))


    def get_state(self):
        return {
            'gamma': self.gamma,
            'rho': self.rho,
            'support_vectors': self.support_vectors.tolist(),
            'coefficients': self.coefficients.tolist(),
        }

    def set_state(self, state):
        self.gamma = float(state['gamma'])
        self.rho = float(state['rho'])
        self.coefficients = np.array(state['coefficients'], dtype=np.float64)
        self.support_vectors = np.array(state['support_vectors'], dtype=np.float64).reshape(len(self.coefficients), -1)
