import math

import numpy as np
import pytest

from vitalsign.errors import EmptyRecord, MalformedHeader, NonNumericSample, NonPositiveRate
from vitalsign.record import RawRecord, RecordFormat, load_record, parse_record, save_record, write_record, HRW_FORMAT


def random_record(rng, index):
    count = int(rng.integers(1, 200))
    samples = rng.normal(85.0, 10.0, count)
    samples[rng.random(count) < 0.1] = np.nan

    return RawRecord(
        patient_id="patient-{}".format(index),
        samples=samples,
        sampling_rate_hz=float(rng.choice([1.0, 0.5, 0.17, 1 / 3])),
        start_offset_s=float(rng.uniform(0, 1000)),
    )


def test_csv_body_with_missing_sample():
    record = parse_record(b"rate_hz=1,start_s=0,patient=p1\n80\n81\nNaN\n82", 'csv')

    assert record.patient_id == 'p1'
    assert record.sampling_rate_hz == 1.0
    assert record.samples[:2].tolist() == [80.0, 81.0]
    assert math.isnan(record.samples[2])
    assert record.samples[3] == 82.0


def test_zero_rate_is_rejected():
    with pytest.raises(NonPositiveRate):
        parse_record(b"rate_hz=0,start_s=0,patient=p1\n80\n", 'csv')


def test_header_without_samples_is_empty():
    with pytest.raises(EmptyRecord):
        parse_record(b"rate_hz=1,start_s=0,patient=p1\n", 'csv')


def test_missing_header_is_malformed():
    with pytest.raises(MalformedHeader):
        parse_record(b"80\n81\n", 'csv')


@pytest.mark.parametrize('token', ['abc', '', 'inf'])
def test_non_numeric_samples_are_rejected(token):
    with pytest.raises(NonNumericSample):
        parse_record("rate_hz=1,start_s=0,patient=p1\n80\n{}\n82\n".format(token).encode(), 'csv')


def test_written_csv_has_one_line_per_sample():
    record = RawRecord('p1', [80.0, np.nan, 82.5], 1.0)
    lines = write_record(record, 'csv').decode().splitlines()

    assert len(lines) == 4
    assert lines[2] == "NaN"


@pytest.mark.parametrize('format', list(RecordFormat))
def test_round_trip(rng, format):
    for index in range(100):
        record = random_record(rng, index)
        assert parse_record(write_record(record, format), format) == record


def test_hrw_layout():
    data = write_record(RawRecord('p', [80.0, 81.0], 0.5), 'hrw')

    assert data[:4] == b"HRW1"
    assert HRW_FORMAT.parse(data).count == 2


def test_hrw_without_trailer_takes_the_file_name(tmp_path):
    data = write_record(RawRecord('p', [80.0, 81.0], 0.5, start_offset_s=3.0), 'hrw')

    # Drop the trailer: magic + rate + count + two samples.
    path = tmp_path / 'bed7.hrw'
    path.write_bytes(data[:4 + 8 + 8 + 16])
    record = load_record(str(path))

    assert record.patient_id == 'bed7'
    assert record.start_offset_s == 0.0
    assert record.samples.tolist() == [80.0, 81.0]


def test_truncated_hrw_is_malformed():
    data = write_record(RawRecord('p', [80.0, 81.0], 0.5), 'hrw')

    with pytest.raises(MalformedHeader):
        parse_record(data[:20], 'hrw')


def test_save_and_load_pick_format_from_suffix(tmp_path, rng):
    record = random_record(rng, 0)

    for name in ('r.csv', 'r.hrw'):
        save_record(record, str(tmp_path / name))
        assert load_record(str(tmp_path / name)) == record


def test_records_are_immutable():
    record = RawRecord('p', [80.0, 81.0], 1.0)

    with pytest.raises(ValueError):
        record.samples[0] = 0.0
