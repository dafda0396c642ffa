import pytest

from vitalsign.clinical_types import CareUnit, Outcome
from vitalsign.errors import DuplicatePatient, MalformedHeader, UnknownCareUnit, UnknownOutcome
from vitalsign.manifest import CohortManifest, ManifestEntry, filter_care_unit, load_manifest, write_manifest


HEADER = "patient_id,record_path,care_unit,outcome\n"


def write_text(tmp_path, text):
    path = tmp_path / 'manifest.csv'
    path.write_text(text)
    return str(path)


def mixed_manifest():
    units = list(CareUnit)
    entries = [
        ManifestEntry("p{}".format(i), "records/p{}.hrw".format(i), units[i % len(units)],
            Outcome.PASSED_AWAY if i % 3 == 0 else Outcome.SURVIVED)
        for i in range(30)
    ]
    return CohortManifest(entries)


def test_entry_parsing(tmp_path):
    manifest = load_manifest(write_text(tmp_path, HEADER + "p1,records/p1.hrw,CCU,died\np2,records/p2.hrw,micu,Alive\n"))

    first, second = manifest.entries
    assert (first.care_unit, first.outcome) == (CareUnit.CCU, Outcome.PASSED_AWAY)
    assert (second.care_unit, second.outcome) == (CareUnit.MICU, Outcome.SURVIVED)
    assert manifest.labels == [1, 0]


def test_unknown_care_unit(tmp_path):
    with pytest.raises(UnknownCareUnit):
        load_manifest(write_text(tmp_path, HEADER + "p1,records/p1.hrw,XYZ,died\n"))


def test_unknown_outcome(tmp_path):
    with pytest.raises(UnknownOutcome):
        load_manifest(write_text(tmp_path, HEADER + "p1,records/p1.hrw,CCU,maybe\n"))


def test_duplicate_patient(tmp_path):
    with pytest.raises(DuplicatePatient):
        load_manifest(write_text(tmp_path, HEADER + "p1,a.hrw,CCU,died\np1,b.hrw,CCU,survived\n"))


def test_wrong_header(tmp_path):
    with pytest.raises(MalformedHeader):
        load_manifest(write_text(tmp_path, "patient_id,record_path,care_path,outcome\np1,a.hrw,CCU,died\n"))


def test_empty_file(tmp_path):
    with pytest.raises(MalformedHeader):
        load_manifest(write_text(tmp_path, ""))


def test_write_then_load(tmp_path):
    manifest = mixed_manifest()
    path = str(tmp_path / 'manifest.csv')

    write_manifest(manifest, path)
    assert load_manifest(path) == manifest


def test_relative_paths_resolve_against_the_manifest(tmp_path):
    manifest = load_manifest(write_text(tmp_path, HEADER + "p1,records/p1.hrw,CCU,died\n"))
    assert manifest.resolve(manifest.entries[0]) == str(tmp_path / 'records' / 'p1.hrw')


def test_filter_keeps_order():
    manifest = mixed_manifest()
    filtered = filter_care_unit(manifest, 'CCU')

    assert all(entry.care_unit is CareUnit.CCU for entry in filtered)
    assert filtered.patient_ids == [entry.patient_id for entry in manifest if entry.care_unit is CareUnit.CCU]


def test_filter_on_absent_unit_is_empty():
    manifest = CohortManifest([ManifestEntry('p1', 'a.hrw', CareUnit.CCU, Outcome.SURVIVED)])
    assert len(filter_care_unit(manifest, CareUnit.NICU)) == 0


def test_filtering_partitions_the_manifest():
    manifest = mixed_manifest()
    parts = [filter_care_unit(manifest, unit) for unit in CareUnit]

    assert sum(len(part) for part in parts) == len(manifest)
    assert sorted(pid for part in parts for pid in part.patient_ids) == sorted(manifest.patient_ids)
