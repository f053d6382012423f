"""Text formats: shipment dumps, protocol transcripts and result records.

All writers produce byte-stable output for a given input so runs can be
diffed against golden files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .protocol import QuantumShipment

SHIPMENT_HEADER = ("block", "index", "amp0.re", "amp0.im", "amp1.re", "amp1.im")
QUANTUM_A_TO_B = "A→B(quantum)"
CLASSICAL_B_TO_A = "B→A(classical)"
DIRECTIONS = (QUANTUM_A_TO_B, CLASSICAL_B_TO_A)


def _num(x: float) -> str:
    # 17 significant digits round-trip any double
    return format(float(x), ".17g")


def dump_shipment(shipment: QuantumShipment) -> str:
    """One line per qubit; ``block`` and ``index`` are one-based."""
    lines = [",".join(SHIPMENT_HEADER)]
    for (i, j), (a0, a1) in zip(np.ndindex(shipment.T, shipment.R), shipment.amps.reshape(-1, 2)):
        lines.append(
            ",".join([str(i + 1), str(j + 1), _num(a0.real), _num(a0.imag), _num(a1.real), _num(a1.imag)])
        )
    return "\n".join(lines) + "\n"


def load_shipment(text: str) -> QuantumShipment:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != SHIPMENT_HEADER:
        raise ValueError("shipment text does not start with the expected header")
    body = rows[1:]
    if not body:
        raise ValueError("shipment is empty")
    T = max(int(r[0]) for r in body)
    R = max(int(r[1]) for r in body)
    if len(body) != T * R:
        raise ValueError(f"expected {T * R} qubit records, found {len(body)}")
    amps = np.empty((T, R, 2), dtype=np.complex128)
    seen = np.zeros((T, R), dtype=bool)
    for r in body:
        i, j = int(r[0]) - 1, int(r[1]) - 1
        if seen[i, j]:
            raise ValueError(f"duplicate record for block {i + 1}, index {j + 1}")
        seen[i, j] = True
        amps[i, j] = complex(float(r[2]), float(r[3])), complex(float(r[4]), float(r[5]))
    return QuantumShipment(amps)


def shipment_digest(shipment: QuantumShipment) -> str:
    """SHA-256 over the shape and the little-endian complex128 amplitudes."""
    h = hashlib.sha256(f"{shipment.T}x{shipment.R}:".encode("ascii"))
    h.update(np.ascontiguousarray(shipment.amps, dtype="<c16").tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class TranscriptRecord:
    step: int
    direction: str
    kind: str
    payload: dict

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")

    @property
    def classical(self) -> bool:
        return self.direction.endswith("(classical)")

    def to_line(self) -> str:
        return json.dumps(
            {"step": self.step, "direction": self.direction, "kind": self.kind, "payload": self.payload},
            ensure_ascii=False,
            sort_keys=False,
        )


def dump_transcript(records) -> str:
    return "".join(r.to_line() + "\n" for r in records)


def load_transcript(text: str) -> list[TranscriptRecord]:
    out = []
    for line in text.splitlines():
        if line.strip():
            d = json.loads(line)
            out.append(TranscriptRecord(d["step"], d["direction"], d["kind"], d["payload"]))
    return out


RESULT_FIELDS = ("experiment", "params", "metric", "value", "expected", "tolerance", "passed")


@dataclass
class ResultRecord:
    """One metric from one experiment. ``tolerance`` is None for informational values."""

    experiment: str
    metric: str
    value: float | int | str
    expected: float | int | str | None = None
    tolerance: float | None = None
    passed: bool = True
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in RESULT_FIELDS}


def check(experiment, metric, value, expected, tolerance, params=None) -> ResultRecord:
    """Record ``value`` and whether it lies within ``tolerance`` of ``expected``."""
    passed = abs(value - expected) <= tolerance
    return ResultRecord(experiment, metric, value, expected, tolerance, bool(passed), dict(params or {}))


def info(experiment, metric, value, params=None) -> ResultRecord:
    return ResultRecord(experiment, metric, value, params=dict(params or {}))


def records_to_jsonl(records) -> str:
    return "".join(json.dumps(r.as_dict(), ensure_ascii=False) + "\n" for r in records)


def records_from_jsonl(text: str) -> list[ResultRecord]:
    out = []
    for line in text.splitlines():
        if line.strip():
            out.append(ResultRecord(**json.loads(line)))
    return out


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_FIELDS)
    for r in records:
        writer.writerow([json.dumps(getattr(r, name), ensure_ascii=False) for name in RESULT_FIELDS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[ResultRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != RESULT_FIELDS:
        raise ValueError("CSV does not carry the result-record header")
    return [ResultRecord(**{k: json.loads(v) for k, v in zip(RESULT_FIELDS, row)}) for row in rows[1:]]
