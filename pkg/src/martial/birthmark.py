"""Dynamic software birthmarks from performance-counter telemetry.

A program's counter profile (cycles, instructions, branch and cache
behaviour) over a set of inputs is a fairly invariable feature set: it
survives renaming and layout edits that defeat static analysis. Raw
counts are log-compressed so machine-speed differences do not swamp the
structural signal; collecting and averaging repetitions is the
telemetry producer's job, not this module's.
"""
from __future__ import annotations

import json
import logging
import math
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, TelemetryError

logger = logging.getLogger(__name__)

# Reserved counter names; telemetry files may carry more.
CANONICAL_COUNTERS = (
    "cpu_cycles",
    "instructions",
    "branch_misses",
    "cache_misses",
    "cache_references",
)
MIN_COMMON_COUNTERS = 3
SIMILARITY_METHODS = ("cosine", "euclidean")


@dataclass(frozen=True)
class TelemetryRecord:
    program_id: str
    input_id: str
    counters: dict[str, int]


@dataclass(frozen=True)
class BirthmarkVector:
    program_id: str
    inputs: tuple[tuple[str, tuple[float, ...]], ...]  # (input_id, features), sorted
    counter_order: tuple[str, ...]


def log_feature(count: int) -> float:
    """log2(1 + count); finite and >= 0 for any valid counter value."""
    return math.log2(1 + count)


def parse_telemetry(path: str | Path) -> list[TelemetryRecord]:
    """Parse line-delimited JSON records {program_id, input_id, counters}.

    Counter values must be nonnegative integers; (program_id, input_id)
    must be unique within the file.
    """
    records: list[TelemetryRecord] = []
    seen: set[tuple[str, str]] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TelemetryError(f"{path}:{lineno}: malformed record: {exc}") from exc
        records.append(_validate_record(raw, f"{path}:{lineno}"))
        key = (records[-1].program_id, records[-1].input_id)
        if key in seen:
            raise TelemetryError(f"{path}:{lineno}: duplicate record for {key}")
        seen.add(key)
    if not records:
        logger.warning("telemetry file %s contains no records", path)
    return records


def _validate_record(raw: object, where: str) -> TelemetryRecord:
    if not isinstance(raw, dict):
        raise TelemetryError(f"{where}: record must be an object")
    for fieldname in ("program_id", "input_id", "counters"):
        if fieldname not in raw:
            raise TelemetryError(f"{where}: missing required field {fieldname!r}")
    counters = raw["counters"]
    if not isinstance(counters, dict) or not counters:
        raise TelemetryError(f"{where}: counters must be a non-empty object")
    clean: dict[str, int] = {}
    for name, value in counters.items():
        if not isinstance(value, int) or isinstance(value, bool):
            raise TelemetryError(f"{where}: invalid counter {name!r}: not an integer")
        if value < 0:
            raise TelemetryError(f"{where}: invalid counter {name!r}: negative value {value}")
        clean[str(name)] = value
    return TelemetryRecord(
        program_id=str(raw["program_id"]), input_id=str(raw["input_id"]), counters=clean
    )


def common_counters(
    a: list[TelemetryRecord], b: list[TelemetryRecord]
) -> tuple[str, ...]:
    """Counter names present in every record of both programs, sorted."""
    sets = [set(r.counters) for r in a] + [set(r.counters) for r in b]
    if not sets:
        return ()
    common = set.intersection(*sets)
    return tuple(sorted(common))


def build_birthmark(
    records: list[TelemetryRecord], counters: tuple[str, ...]
) -> BirthmarkVector:
    """Per-input log-feature lists in a fixed counter order."""
    if len(counters) < MIN_COMMON_COUNTERS:
        raise TelemetryError(
            f"insufficient metrics: {len(counters)} common counters, need >= {MIN_COMMON_COUNTERS}"
        )
    if not records:
        raise TelemetryError("insufficient metrics: no telemetry records")
    program_ids = {r.program_id for r in records}
    if len(program_ids) != 1:
        raise TelemetryError(f"records span multiple programs: {sorted(program_ids)}")
    inputs = []
    for record in sorted(records, key=lambda r: r.input_id):
        missing = [c for c in counters if c not in record.counters]
        if missing:
            raise TelemetryError(
                f"record ({record.program_id}, {record.input_id}) lacks counters {missing}"
            )
        inputs.append((record.input_id, tuple(log_feature(record.counters[c]) for c in counters)))
    return BirthmarkVector(
        program_id=next(iter(program_ids)), inputs=tuple(inputs), counter_order=counters
    )


def _cosine(u: tuple[float, ...], v: tuple[float, ...]) -> float:
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        return 0.0  # undefined: contributes zero
    value = sum(a * b for a, b in zip(u, v)) / (nu * nv)
    return min(max(value, 0.0), 1.0)


def birthmark_similarity(
    a: BirthmarkVector, b: BirthmarkVector, method: str = "cosine"
) -> float | None:
    """Mean per-input similarity over the shared input ids; None when the
    programs share no inputs."""
    if a.counter_order != b.counter_order:
        raise TelemetryError(
            f"counter order mismatch: {a.counter_order} vs {b.counter_order}"
        )
    if method not in SIMILARITY_METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {SIMILARITY_METHODS}")
    features_a = dict(a.inputs)
    features_b = dict(b.inputs)
    shared = sorted(features_a.keys() & features_b.keys())
    if not shared:
        return None
    total = 0.0
    for input_id in shared:
        u, v = features_a[input_id], features_b[input_id]
        if method == "euclidean":
            total += 1.0 / (1.0 + math.sqrt(sum((x - y) ** 2 for x, y in zip(u, v))))
        else:
            total += _cosine(u, v)
    return total / len(shared)


def per_input_similarity(
    a: BirthmarkVector, b: BirthmarkVector, method: str = "cosine"
) -> list[tuple[str, float]]:
    """Evidence detail: the per-input contributions behind the score."""
    features_a = dict(a.inputs)
    features_b = dict(b.inputs)
    out = []
    for input_id in sorted(features_a.keys() & features_b.keys()):
        u, v = features_a[input_id], features_b[input_id]
        if method == "euclidean":
            value = 1.0 / (1.0 + math.sqrt(sum((x - y) ** 2 for x, y in zip(u, v))))
        else:
            value = _cosine(u, v)
        out.append((input_id, value))
    return out


def run_collector(
    command_template: str, program: str, inputs: list[str], timeout: float = 60.0
) -> list[TelemetryRecord]:
    """Optional runner: execute a user-supplied collector per (program, input).

    The command template must contain {program} and {input} placeholders and
    the command must exit 0 with exactly one telemetry record on stdout.
    Hardware counter access is platform-specific, so collection is always
    delegated to an external tool.
    """
    if "{program}" not in command_template or "{input}" not in command_template:
        raise ConfigError("runner template must contain {program} and {input} placeholders")
    records = []
    seen: set[tuple[str, str]] = set()
    for input_id in inputs:
        # literal replacement, not str.format: templates may contain braces
        cmd = command_template.replace("{program}", shlex.quote(program)).replace(
            "{input}", shlex.quote(input_id)
        )
        proc = subprocess.run(
            cmd, shell=True, capture_output=True, text=True, timeout=timeout
        )
        if proc.returncode != 0:
            raise TelemetryError(
                f"collector failed for ({program}, {input_id}): exit {proc.returncode}: {proc.stderr.strip()}"
            )
        try:
            raw = json.loads(proc.stdout)
        except json.JSONDecodeError as exc:
            raise TelemetryError(f"collector emitted malformed record: {exc}") from exc
        record = _validate_record(raw, f"collector({program}, {input_id})")
        key = (record.program_id, record.input_id)
        if key in seen:
            raise TelemetryError(f"collector emitted duplicate record for {key}")
        seen.add(key)
        records.append(record)
    return records
