import numpy as np

from vitalsign.clinical_types import CareUnit, Outcome
from vitalsign.features import FEATURE_COUNT
from vitalsign.manifest import CohortManifest, ManifestEntry, load_manifest, write_manifest
from vitalsign.pipeline import CohortPipeline
from vitalsign.record import RawRecord, load_record, save_record
from vitalsign.workers import WorkerPool


def test_cohort_follows_the_manifest(small_cohort_dir, small_cohort):
    manifest = load_manifest(str(small_cohort_dir / 'manifest.csv'))

    assert small_cohort.features.shape == (200, FEATURE_COUNT)
    assert list(small_cohort.patient_ids) == manifest.patient_ids
    assert small_cohort.labels.tolist() == manifest.labels
    assert int(small_cohort.labels.sum()) == 40
    assert np.isfinite(small_cohort.features).all()


def test_cohort_does_not_depend_on_worker_count(small_cohort_dir, small_cohort):
    manifest = load_manifest(str(small_cohort_dir / 'manifest.csv'))
    parallel = CohortPipeline(pool=WorkerPool(2)).build_cohort(manifest)

    assert np.array_equal(parallel.features, small_cohort.features)


def test_preprocessed_records_give_the_same_features(small_cohort_dir, small_cohort, tmp_path):
    manifest = load_manifest(str(small_cohort_dir / 'manifest.csv'))
    pipeline = CohortPipeline()

    manifest_path = pipeline.preprocess_manifest(manifest, str(tmp_path))
    preprocessed = load_manifest(manifest_path)

    assert preprocessed.patient_ids == manifest.patient_ids
    assert [entry.outcome for entry in preprocessed] == [entry.outcome for entry in manifest]

    # One hour at 1 Hz, with nothing missing.
    record = load_record(preprocessed.resolve(preprocessed.entries[0]))
    assert record.sampling_rate_hz == 1.0
    assert len(record.samples) <= 3600
    assert np.isfinite(record.samples).all()

    cohort = pipeline.extract_preprocessed(preprocessed)
    assert np.allclose(cohort.features, small_cohort.features, rtol=1e-12, atol=0)


def test_preprocessing_keeps_admission_offsets(tmp_path):
    raw = RawRecord('p1', [0.0, 0.0] + [80.0 + i % 3 for i in range(20)], 1.0, start_offset_s=30.0)

    (tmp_path / 'raw' / 'records').mkdir(parents=True)
    save_record(raw, str(tmp_path / 'raw' / 'records' / 'p1.hrw'))
    entry = ManifestEntry('p1', 'records/p1.hrw', CareUnit.CCU, Outcome.SURVIVED)
    write_manifest(CohortManifest([entry]), str(tmp_path / 'raw' / 'manifest.csv'))

    manifest_path = CohortPipeline().preprocess_manifest(load_manifest(str(tmp_path / 'raw' / 'manifest.csv')),
        str(tmp_path / 'clean'))

    clean = load_manifest(manifest_path)
    assert load_record(clean.resolve(clean.entries[0])).start_offset_s == 32.0
