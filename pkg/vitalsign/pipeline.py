"""
Cohort pipeline -- the "orchestrator" that carries every record of a manifest through preprocessing
and feature extraction, spreading records over worker processes.
"""

import functools
import logging
import os

import numpy as np

from .cohort import Cohort
from .features import FEATURE_COUNT, extract_features
from .manifest import CohortManifest, ManifestEntry, write_manifest
from .preprocess import PreprocessConfig, preprocess_pipeline, preprocess_record, record_to_signal
from .record import load_record, save_record
from .synth import RECORD_DIRECTORY, MANIFEST_NAME
from .workers import WorkerPool


log = logging.getLogger(__name__)


def _preprocess_task(cfg, job):
    path, patient_id = job
    return preprocess_record(load_record(path, patient_id=patient_id), cfg)


def _extract_task(cfg, job):
    path, patient_id = job
    signal = preprocess_pipeline(load_record(path, patient_id=patient_id), cfg)
    return extract_features(signal).values


def _extract_preprocessed_task(job):
    path, patient_id = job
    return extract_features(record_to_signal(load_record(path, patient_id=patient_id))).values


class CohortPipeline:
    """
    Runs each stage of the record-to-features chain over a whole manifest. Records are independent,
    so each is handled by whichever worker picks it up; results always come back in manifest order.
    """

    def __init__(self, preprocess_config=None, pool=None):
        """
        Args:
            preprocess_config -- The PreprocessConfig applied to every record; defaults to PreprocessConfig().
            pool -- The WorkerPool used to spread records over processes; defaults to running inline.
        """
        self.preprocess_config = preprocess_config or PreprocessConfig()
        self.pool = pool or WorkerPool(1)


    @staticmethod
    def _jobs(manifest):
        return [(manifest.resolve(entry), entry.patient_id) for entry in manifest]


    def preprocess_manifest(self, manifest, out_dir):
        """ Preprocesses every record, writing the clean signals and a matching manifest under out_dir.

        Returns the path of the new manifest.
        """

        task = functools.partial(_preprocess_task, self.preprocess_config)
        records = self.pool.map(task, self._jobs(manifest))

        os.makedirs(os.path.join(out_dir, RECORD_DIRECTORY), exist_ok=True)

        entries = []
        for entry, record in zip(manifest, records):
            record_path = "{}/{}.hrw".format(RECORD_DIRECTORY, entry.patient_id)
            save_record(record, os.path.join(out_dir, record_path))

            entries.append(ManifestEntry(entry.patient_id, record_path, entry.care_unit, entry.outcome))

        manifest_path = os.path.join(out_dir, MANIFEST_NAME)
        write_manifest(CohortManifest(entries), manifest_path)

        log.info("preprocessed %d records into %s", len(entries), out_dir)
        return manifest_path


    def extract_preprocessed(self, manifest):
        """ Extracts features from records that have already been preprocessed. """

        rows = self.pool.map(_extract_preprocessed_task, self._jobs(manifest))
        return self._cohort(manifest, rows)


    def build_cohort(self, manifest):
        """ Runs the full chain (preprocess, then extract) over raw records. """

        task = functools.partial(_extract_task, self.preprocess_config)
        rows = self.pool.map(task, self._jobs(manifest))
        return self._cohort(manifest, rows)


    @staticmethod
    def _cohort(manifest, rows):
        features = np.vstack(rows) if rows else np.empty((0, FEATURE_COUNT))
        cohort = Cohort(features, manifest.labels, manifest.patient_ids, [entry.care_unit for entry in manifest])

        log.info("built a cohort of %d patients (%d passed away)", len(cohort), int(cohort.labels.sum()))
        return cohort
