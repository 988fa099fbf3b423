from __future__ import annotations

import json
import math
import random

import pytest

from martial.birthmark import (
    TelemetryRecord,
    birthmark_similarity,
    build_birthmark,
    common_counters,
    log_feature,
    parse_telemetry,
    per_input_similarity,
    run_collector,
)
from martial.errors import TelemetryError

FIVE = ("branch_misses", "cache_misses", "cache_references", "cpu_cycles", "instructions")


def _record(program: str, input_id: str, **counters: int) -> TelemetryRecord:
    base = {name: 100 for name in FIVE}
    base.update(counters)
    return TelemetryRecord(program_id=program, input_id=input_id, counters=base)


def _write(tmp_path, lines) -> str:
    path = tmp_path / "telemetry.jsonl"
    path.write_text("\n".join(json.dumps(line) for line in lines) + "\n")
    return str(path)


def test_parse_telemetry_counts(tmp_path):
    lines = [
        {"program_id": p, "input_id": i, "counters": {"cpu_cycles": 1, "instructions": 2, "cache_misses": 3}}
        for p in ("p1", "p2")
        for i in ("a", "b", "c")
    ]
    records = parse_telemetry(_write(tmp_path, lines))
    assert len(records) == 6


def test_parse_telemetry_empty_warns(tmp_path, caplog):
    path = tmp_path / "telemetry.jsonl"
    path.write_text("\n")
    with caplog.at_level("WARNING"):
        assert parse_telemetry(path) == []
    assert any("no records" in message for message in caplog.messages)


def test_parse_telemetry_duplicate_rejected(tmp_path):
    line = {"program_id": "p", "input_id": "a", "counters": {"cpu_cycles": 1, "x": 2, "y": 3}}
    with pytest.raises(TelemetryError, match=r"duplicate record for \('p', 'a'\)"):
        parse_telemetry(_write(tmp_path, [line, line]))


def test_parse_telemetry_negative_counter(tmp_path):
    line = {"program_id": "p", "input_id": "a", "counters": {"cpu_cycles": -1}}
    with pytest.raises(TelemetryError, match="invalid counter 'cpu_cycles': negative"):
        parse_telemetry(_write(tmp_path, [line]))


def test_parse_telemetry_missing_field_names_line(tmp_path):
    line = {"program_id": "p", "counters": {"cpu_cycles": 1}}
    with pytest.raises(TelemetryError, match=r":1: missing required field 'input_id'"):
        parse_telemetry(_write(tmp_path, [line]))


def test_parse_telemetry_non_integer_counter(tmp_path):
    line = {"program_id": "p", "input_id": "a", "counters": {"cpu_cycles": 1.5}}
    with pytest.raises(TelemetryError, match="not an integer"):
        parse_telemetry(_write(tmp_path, [line]))


def test_log_feature_spot_values():
    assert log_feature(0) == 0.0
    assert log_feature(7) == 3.0
    # independently evaluated with 50-digit arithmetic, frozen here
    assert log_feature(10**6) == pytest.approx(19.931570012018494, abs=1e-9)
    assert log_feature(2**63 - 1) == pytest.approx(63.0, abs=1e-9)


def test_build_birthmark_orders_inputs_and_counters():
    records = [_record("p", "b", cpu_cycles=7), _record("p", "a", cpu_cycles=0)]
    bm = build_birthmark(records, FIVE)
    assert [input_id for input_id, _ in bm.inputs] == ["a", "b"]
    cpu_index = FIVE.index("cpu_cycles")
    assert bm.inputs[0][1][cpu_index] == 0.0
    assert bm.inputs[1][1][cpu_index] == 3.0


def test_build_birthmark_insufficient_metrics():
    with pytest.raises(TelemetryError, match="insufficient metrics"):
        build_birthmark([_record("p", "a")], ("cpu_cycles", "instructions"))


def test_build_birthmark_missing_counter_in_record():
    records = [TelemetryRecord("p", "a", {"cpu_cycles": 1, "instructions": 2, "cache_misses": 3})]
    with pytest.raises(TelemetryError, match="lacks counters"):
        build_birthmark(records, ("cache_misses", "cpu_cycles", "instructions", "branch_misses"))


def test_common_counters_intersection():
    a = [TelemetryRecord("p", "a", {"x": 1, "y": 2, "z": 3})]
    b = [TelemetryRecord("q", "a", {"y": 2, "z": 3, "w": 4})]
    assert common_counters(a, b) == ("y", "z")


def test_similarity_identical_telemetry():
    records_a = [_record("p", "a", cpu_cycles=123), _record("p", "b", cpu_cycles=99)]
    records_b = [
        TelemetryRecord("q", r.input_id, dict(r.counters)) for r in records_a
    ]
    bm_a = build_birthmark(records_a, FIVE)
    bm_b = build_birthmark(records_b, FIVE)
    assert birthmark_similarity(bm_a, bm_b) == pytest.approx(1.0, abs=1e-9)


def test_similarity_no_shared_inputs_not_applicable():
    bm_a = build_birthmark([_record("p", "a")], FIVE)
    bm_b = build_birthmark([_record("q", "b")], FIVE)
    assert birthmark_similarity(bm_a, bm_b) is None


def test_similarity_counter_order_mismatch():
    bm_a = build_birthmark([_record("p", "a")], FIVE)
    bm_b = build_birthmark([_record("q", "a")], tuple(reversed(FIVE)))
    with pytest.raises(TelemetryError, match="counter order mismatch"):
        birthmark_similarity(bm_a, bm_b)


def test_similarity_zero_features_contribute_zero():
    zero = TelemetryRecord("p", "a", {name: 0 for name in FIVE})
    other = TelemetryRecord("q", "a", {name: 50 for name in FIVE})
    plain_a = _record("p", "b", cpu_cycles=11)
    plain_b = TelemetryRecord("q", "b", dict(plain_a.counters))
    bm_a = build_birthmark([zero, plain_a], FIVE)
    bm_b = build_birthmark([other, plain_b], FIVE)
    per_input = dict(per_input_similarity(bm_a, bm_b))
    assert per_input["a"] == 0.0
    assert birthmark_similarity(bm_a, bm_b) == pytest.approx((0.0 + 1.0) / 2)


def test_similarity_matches_hand_recomputation(fixtures):
    """Spreadsheet-style recomputation of the mean per-input cosine on the
    bundled two-program telemetry fixture."""
    records = parse_telemetry(fixtures / "telemetry" / "pair_ab.jsonl")
    recs_a = [r for r in records if r.program_id == "alpha"]
    recs_b = [r for r in records if r.program_id == "beta"]
    counters = common_counters(recs_a, recs_b)
    bm_a = build_birthmark(recs_a, counters)
    bm_b = build_birthmark(recs_b, counters)

    expected_total = 0.0
    by_input_a = {r.input_id: r.counters for r in recs_a}
    by_input_b = {r.input_id: r.counters for r in recs_b}
    for input_id in sorted(by_input_a.keys() & by_input_b.keys()):
        u = [math.log2(1 + by_input_a[input_id][c]) for c in counters]
        v = [math.log2(1 + by_input_b[input_id][c]) for c in counters]
        dot = sum(x * y for x, y in zip(u, v))
        norm = math.sqrt(sum(x * x for x in u)) * math.sqrt(sum(y * y for y in v))
        expected_total += dot / norm
    expected = expected_total / 3
    assert birthmark_similarity(bm_a, bm_b) == pytest.approx(expected, abs=1e-12)
    assert 0.0 < expected < 1.0


def test_similarity_symmetric_and_permutation_invariant():
    rng = random.Random(5)
    records_a = [
        _record("p", f"i{n}", cpu_cycles=rng.randrange(10**6), cache_misses=rng.randrange(10**4))
        for n in range(6)
    ]
    records_b = [
        _record("q", f"i{n}", cpu_cycles=rng.randrange(10**6), cache_misses=rng.randrange(10**4))
        for n in range(6)
    ]
    bm_a = build_birthmark(records_a, FIVE)
    bm_b = build_birthmark(records_b, FIVE)
    shuffled_a = records_a[:]
    rng.shuffle(shuffled_a)
    bm_a_shuffled = build_birthmark(shuffled_a, FIVE)
    assert bm_a == bm_a_shuffled
    assert birthmark_similarity(bm_a, bm_b) == birthmark_similarity(bm_b, bm_a)


def test_similarity_euclidean_variant():
    bm_a = build_birthmark([_record("p", "a", cpu_cycles=100)], FIVE)
    bm_b = build_birthmark([_record("q", "a", cpu_cycles=100)], FIVE)
    assert birthmark_similarity(bm_a, bm_b, method="euclidean") == pytest.approx(1.0)


def test_run_collector_contract(tmp_path):
    record = {"program_id": "prog", "input_id": "one", "counters": {"cpu_cycles": 5, "instructions": 4, "cache_misses": 3}}
    command = f"echo '{json.dumps(record)}' # {{program}} {{input}}"
    records = run_collector(command, "prog", ["one"])
    assert records == [TelemetryRecord("prog", "one", record["counters"])]


def test_run_collector_nonzero_exit(tmp_path):
    with pytest.raises(TelemetryError, match="collector failed"):
        run_collector("false # {program} {input}", "prog", ["one"])
