"""
Heart-rate record definitions -- the raw record type, and the two on-disk formats it travels in.

Records are kept lossless here: missing samples stay missing (NaN) until preprocessing decides
what to do with them.
"""

import enum
import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from construct import Struct, Const, Float64l, Int64ul, Int16ul, Bytes, Optional, PascalString, this
from construct import ConstructError

from .errors import MalformedHeader, NonPositiveRate, EmptyRecord, NonNumericSample


log = logging.getLogger(__name__)


class RecordFormat(enum.Enum):
    """ Enumeration of the supported record encodings. """

    CSV = 'csv'
    HRW = 'hrw'

    @classmethod
    def parse(cls, value):
        """ Accepts a RecordFormat, or its name in either case. """

        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError("unknown record format {!r}; expected csv or hrw".format(value)) from None

    @classmethod
    def from_path(cls, path):
        """ Picks a format from a file suffix. """
        return cls.parse(os.path.splitext(str(path))[1].lstrip('.'))


# The binary record layout: magic, rate, sample count, the samples themselves,
# then a trailer holding the metadata the header has no room for.
# Missing samples are stored as quiet NaNs.
HRW_FORMAT = Struct(
    "magic"      / Const(b"HRW1"),
    "rate_hz"    / Float64l,
    "count"      / Int64ul,
    "samples"    / Bytes(this.count * 8),
    "trailer"    / Optional(Struct(
        "start_s"    / Float64l,
        "patient_id" / PascalString(Int16ul, "utf8"),
    )),
)

# Token written for (and accepted as) a missing CSV sample.
MISSING_TOKEN = "NaN"


@dataclass(frozen=True, eq=False)
class RawRecord:
    """ A heart-rate series as it was recorded: beats/min, possibly with gaps.

    Fields:
        patient_id -- Opaque identifier of the patient the record belongs to.
        samples -- float64 array of beats/min values; NaN marks a missing sample.
        sampling_rate_hz -- The rate at which samples were taken.
        start_offset_s -- Seconds between ICU admission and the first sample.
    """

    patient_id: str
    samples: np.ndarray
    sampling_rate_hz: float
    start_offset_s: float = field(default=0.0)

    def __post_init__(self):

        # Take our own read-only copy of the samples, so records stay immutable.
        samples = np.array(self.samples, dtype=np.float64).ravel()
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'sampling_rate_hz', float(self.sampling_rate_hz))
        object.__setattr__(self, 'start_offset_s', float(self.start_offset_s))
        object.__setattr__(self, 'patient_id', str(self.patient_id))

        self.validate()


    def validate(self):
        """ Raises if the record breaks any of its invariants. """

        if not self.sampling_rate_hz > 0 or not math.isfinite(self.sampling_rate_hz):
            raise NonPositiveRate("sampling rate must be positive, not {!r}".format(self.sampling_rate_hz))

        if len(self.samples) == 0:
            raise EmptyRecord("record for {!r} contains no samples".format(self.patient_id))

        if np.isinf(self.samples).any():
            raise NonNumericSample("record for {!r} contains infinite samples".format(self.patient_id))

        if not self.start_offset_s >= 0:
            raise MalformedHeader("start offset must be nonnegative, not {!r}".format(self.start_offset_s))


    @property
    def missing(self):
        """ Boolean mask that's true wherever a sample is missing. """
        return np.isnan(self.samples)

    def __len__(self):
        return len(self.samples)

    def with_samples(self, samples, sampling_rate_hz=None):
        """ Returns a copy of this record carrying new samples (and optionally a new rate). """

        if sampling_rate_hz is None:
            sampling_rate_hz = self.sampling_rate_hz
        return replace(self, samples=samples, sampling_rate_hz=sampling_rate_hz)

    def __eq__(self, other):
        if not isinstance(other, RawRecord):
            return NotImplemented

        return (self.patient_id == other.patient_id) and \
            (self.sampling_rate_hz == other.sampling_rate_hz) and \
            (self.start_offset_s == other.start_offset_s) and \
            np.array_equal(self.samples, other.samples, equal_nan=True)

    __hash__ = None

    def __repr__(self):
        return "<RawRecord {}: {} samples @ {} Hz, {} missing>".format(
            self.patient_id, len(self.samples), self.sampling_rate_hz, int(self.missing.sum()))


#
# CSV encoding.
#

def _format_float(value):
    """ Shortest decimal text that reads back to the identical double. """
    return repr(float(value))


def _parse_csv_header(line):
    """ Parses a `rate_hz=<r>,start_s=<s>,patient=<id>` header line into its three values. """

    # The patient id comes last, so it's allowed to contain commas.
    settings = {}
    for item in line.split(',', 2):
        key, separator, value = item.partition('=')
        if not separator:
            raise MalformedHeader("header entry {!r} isn't of the form key=value".format(item))
        settings[key.strip()] = value.strip() if key.strip() != 'patient' else value

    if 'rate_hz' not in settings:
        raise MalformedHeader("record header is missing rate_hz")

    try:
        rate = float(settings['rate_hz'])
        start = float(settings.get('start_s', 0.0))
    except ValueError:
        raise MalformedHeader("record header {!r} has non-numeric values".format(line)) from None

    if not rate > 0:
        raise NonPositiveRate("sampling rate must be positive, not {!r}".format(settings['rate_hz']))

    return rate, start, settings.get('patient', '')


def _parse_csv_sample(token, line_number):
    """ Converts a single CSV sample token to a float, with NaN for missing. """

    token = token.strip()

    if not token:
        raise NonNumericSample("empty sample on line {}".format(line_number))
    if token.lower() == MISSING_TOKEN.lower():
        return math.nan

    try:
        value = float(token)
    except ValueError:
        raise NonNumericSample("non-numeric sample {!r} on line {}".format(token, line_number)) from None

    if math.isinf(value):
        raise NonNumericSample("infinite sample on line {}".format(line_number))

    return value


def _parse_csv(data, patient_id=None):
    text = data.decode('utf-8') if isinstance(data, (bytes, bytearray)) else str(data)
    lines = text.split('\n')

    # A single trailing newline doesn't introduce an extra sample.
    if lines and lines[-1] == '':
        lines.pop()

    if not lines or '=' not in lines[0]:
        raise MalformedHeader("CSV record must start with a rate_hz=...,start_s=...,patient=... header")

    rate, start, header_patient = _parse_csv_header(lines[0].rstrip('\r'))
    samples = [_parse_csv_sample(line, number) for number, line in enumerate(lines[1:], start=2)]

    if not samples:
        raise EmptyRecord("CSV record contains a header but no samples")

    return RawRecord(patient_id=header_patient if patient_id is None else patient_id,
        samples=samples, sampling_rate_hz=rate, start_offset_s=start)


def _write_csv(record):
    lines = ["rate_hz={},start_s={},patient={}".format(
        _format_float(record.sampling_rate_hz), _format_float(record.start_offset_s), record.patient_id)]
    lines.extend(MISSING_TOKEN if math.isnan(value) else _format_float(value) for value in record.samples)
    return ('\n'.join(lines) + '\n').encode('utf-8')


#
# HRW encoding.
#

def _parse_hrw(data, patient_id=None):

    try:
        parsed = HRW_FORMAT.parse(bytes(data))
    except ConstructError as e:
        raise MalformedHeader("not a valid HRW1 record: {}".format(e)) from None

    if not parsed.rate_hz > 0:
        raise NonPositiveRate("sampling rate must be positive, not {!r}".format(parsed.rate_hz))

    if parsed.count == 0:
        raise EmptyRecord("HRW record declares zero samples")

    samples = np.frombuffer(parsed.samples, dtype='<f8').astype(np.float64)
    if np.isinf(samples).any():
        raise NonNumericSample("HRW record contains infinite samples")

    # Files without a trailer carry neither a start offset nor a patient id.
    trailer = parsed.trailer
    start = trailer.start_s if trailer is not None else 0.0
    if patient_id is None:
        patient_id = trailer.patient_id if trailer is not None else ''

    return RawRecord(patient_id=patient_id, samples=samples, sampling_rate_hz=parsed.rate_hz,
        start_offset_s=start)


def _write_hrw(record):

    # Canonicalize every missing value to the same quiet NaN.
    samples = np.where(np.isnan(record.samples), np.nan, record.samples).astype('<f8')

    return HRW_FORMAT.build(dict(
        rate_hz=record.sampling_rate_hz,
        count=len(samples),
        samples=samples.tobytes(),
        trailer=dict(start_s=record.start_offset_s, patient_id=record.patient_id),
    ))


_PARSERS = {RecordFormat.CSV: _parse_csv, RecordFormat.HRW: _parse_hrw}
_WRITERS = {RecordFormat.CSV: _write_csv, RecordFormat.HRW: _write_hrw}


def parse_record(data, format, patient_id=None):
    """ Parses a byte string into a RawRecord.

    Args:
        data -- The encoded record.
        format -- A RecordFormat (or 'csv' / 'hrw').
        patient_id -- If provided, overrides any patient id stored in the record itself.
    """
    return _PARSERS[RecordFormat.parse(format)](data, patient_id)


def write_record(record, format):
    """ Encodes a RawRecord; parse_record() on the result reproduces the record exactly. """
    return _WRITERS[RecordFormat.parse(format)](record)


def load_record(path, patient_id=None, format=None):
    """ Reads a record from disk; the format defaults to the one implied by the suffix. """

    format = RecordFormat.from_path(path) if format is None else format

    with open(path, 'rb') as f:
        data = f.read()

    record = parse_record(data, format, patient_id=patient_id)

    # Records without an embedded id are named after their file.
    if not record.patient_id:
        stem = os.path.splitext(os.path.basename(str(path)))[0]
        record = replace(record, patient_id=stem)

    log.debug("loaded %r from %s", record, path)
    return record


def save_record(record, path, format=None):
    """ Writes a record to disk, in the format implied by the suffix unless one is given. """

    format = RecordFormat.from_path(path) if format is None else format

    with open(path, 'wb') as f:
        f.write(write_record(record, format))
