"""
Cohort manifests -- the list of patients in a study, where their records live, and how their stay ended.
"""

import logging
import os
from dataclasses import dataclass, field

import pandas as pd

from .clinical_types import CareUnit, Outcome
from .errors import DuplicatePatient, MalformedHeader


log = logging.getLogger(__name__)

MANIFEST_COLUMNS = ['patient_id', 'record_path', 'care_unit', 'outcome']


@dataclass(frozen=True)
class ManifestEntry:
    """ One row of a manifest. """

    patient_id:  str
    record_path: str
    care_unit:   CareUnit
    outcome:     Outcome

    def to_row(self):
        return {
            'patient_id':  self.patient_id,
            'record_path': self.record_path,
            'care_unit':   self.care_unit.name,
            'outcome':     self.outcome.token,
        }


@dataclass(frozen=True)
class CohortManifest:
    """ An ordered list of manifest entries, with unique patient ids.

    Record paths are stored as written; `base_dir` is the directory relative
    paths are resolved against (usually the one holding the manifest file).
    """

    entries:  tuple = ()
    base_dir: str   = field(default='.', compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'entries', tuple(self.entries))

        seen = set()
        for entry in self.entries:
            if entry.patient_id in seen:
                raise DuplicatePatient("patient {!r} appears more than once".format(entry.patient_id))
            seen.add(entry.patient_id)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def patient_ids(self):
        return [entry.patient_id for entry in self.entries]

    @property
    def labels(self):
        return [entry.outcome.label for entry in self.entries]

    def resolve(self, entry):
        """ Returns the filesystem path of the given entry's record. """

        if os.path.isabs(entry.record_path):
            return entry.record_path
        return os.path.join(self.base_dir, entry.record_path)

    def count(self, outcome):
        return sum(1 for entry in self.entries if entry.outcome is outcome)


def load_manifest(path):
    """ Loads a manifest CSV (header `patient_id,record_path,care_unit,outcome`), preserving row order. """

    try:
        table = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise MalformedHeader("manifest {} is empty; expected a header line".format(path)) from None

    if list(table.columns) != MANIFEST_COLUMNS:
        raise MalformedHeader("manifest header must be {}, not {}".format(
            ','.join(MANIFEST_COLUMNS), ','.join(table.columns)))

    entries = [
        ManifestEntry(
            patient_id=row.patient_id,
            record_path=row.record_path,
            care_unit=CareUnit.parse(row.care_unit),
            outcome=Outcome.parse(row.outcome),
        )
        for row in table.itertuples(index=False)
    ]

    manifest = CohortManifest(entries, base_dir=os.path.dirname(os.path.abspath(str(path))))
    log.info("loaded manifest %s: %d entries", path, len(manifest))
    return manifest


def write_manifest(manifest, path):
    """ Writes a manifest CSV that load_manifest() reads back entry-for-entry. """

    table = pd.DataFrame([entry.to_row() for entry in manifest], columns=MANIFEST_COLUMNS)
    table.to_csv(path, index=False)


def filter_care_unit(manifest, unit):
    """ Returns the sub-manifest of entries that stayed in the given care unit, in order. """

    unit = CareUnit.parse(unit)
    return CohortManifest([entry for entry in manifest if entry.care_unit is unit], base_dir=manifest.base_dir)
