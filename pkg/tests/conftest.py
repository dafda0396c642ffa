"""
Shared fixtures for the vitalsign test suite.
"""

import numpy as np
import pytest

from vitalsign.synth import default_config, generate_cohort, write_cohort
from vitalsign.pipeline import CohortPipeline
from vitalsign.manifest import load_manifest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end runs over the full synthetic cohort")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope='session')
def small_cohort_dir(tmp_path_factory):
    """ A small synthetic cohort (160 survived, 40 passed away) written to disk. """

    out_dir = tmp_path_factory.mktemp('cohort')
    manifest, records = generate_cohort(default_config(n_survived=160, n_passed=40, seed=3))
    write_cohort(manifest, records, str(out_dir))
    return out_dir


@pytest.fixture(scope='session')
def small_cohort(small_cohort_dir):
    """ Feature cohort of the small synthetic cohort. """
    return CohortPipeline().build_cohort(load_manifest(str(small_cohort_dir / 'manifest.csv')))


def separable_data(rng, count=80, dimension=3, gap=3.0):
    """ Two Gaussian clouds, well apart along the first axis; labels alternate 0, 1, 0, ... """

    labels = np.arange(count) % 2
    features = rng.normal(size=(count, dimension))
    features[:, 0] += np.where(labels == 1, gap, -gap)
    return features, labels
