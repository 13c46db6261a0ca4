"""Result rows, series tables and their CSV serialization.

``records.csv`` columns (schema version 1)::

    schema_version, experiment_id, mode, quantity, claim, parameters,
    value, lower, upper, passed

``parameters`` is a JSON object with sorted keys; ``lower``/``upper`` are
the acceptance window (empty when unbounded) and ``passed`` is ``true``,
``false`` or empty for diagnostics. Floats are written with ``repr`` so a
rerun with the same config produces the same bytes. Wall times are kept
out of every CSV and reported in the manifest instead.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from ..errors import IncompleteRun
from .registry import QUANTITIES, judge, window

SCHEMA_VERSION = 1
RECORD_COLUMNS = ("schema_version", "experiment_id", "mode", "quantity", "claim", "parameters",
                  "value", "lower", "upper", "passed")


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return repr(float(x))


def _jsonable(v: Any) -> Any:
    if isinstance(v, (list, tuple)):
        return [_jsonable(a) for a in v]
    if hasattr(v, "item"):
        return v.item()
    return v


@dataclass(frozen=True)
class Record:
    experiment_id: str
    mode: str
    quantity: str
    parameters: Mapping[str, Any]
    value: float
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise KeyError(f"quantity {self.quantity!r} is not registered")

    @property
    def claim(self) -> str:
        return QUANTITIES[self.quantity].claim

    @property
    def passed(self) -> bool | None:
        return judge(self.value, self.lower, self.upper)

    def params_json(self) -> str:
        return json.dumps({k: _jsonable(v) for k, v in self.parameters.items()}, sort_keys=True)

    def row(self) -> list[str]:
        return [str(SCHEMA_VERSION), self.experiment_id, self.mode, self.quantity, self.claim,
                self.params_json(), _fmt(self.value), _fmt(self.lower), _fmt(self.upper),
                _fmt(self.passed)]


class RecordSink:
    """Collects rows for one experiment, filling acceptance windows from the registry."""

    def __init__(self, experiment_id: str, mode: str, tolerance):
        self.experiment_id = experiment_id
        self.mode = mode
        self._tol = tolerance
        self.records: list[Record] = []

    def add(self, quantity: str, value: float, params: Mapping[str, Any] | None = None, *,
            target: float | None = None, lower: float | None = None, upper: float | None = None) -> Record:
        lo, hi = window(quantity, self._tol(quantity), target, lower, upper)
        rec = Record(self.experiment_id, self.mode, quantity, dict(params or {}), float(value), lo, hi)
        self.records.append(rec)
        return rec


@dataclass(frozen=True)
class Series:
    """A named table written as ``series_<name>.csv``."""

    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(c) if not isinstance(c, str) else c for c in r])
        return buf.getvalue()


def records_to_csv(records: Iterable[Record]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def _parse_float(s: str) -> float | None:
    return None if s == "" else float(s)


def read_records(path: str | Path) -> list[Record]:
    """Parse ``records.csv``; the ``passed`` column is recomputed, not trusted."""
    text = Path(path).read_text()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != RECORD_COLUMNS:
        raise IncompleteRun(f"{path}: header does not match the records schema {RECORD_COLUMNS}")
    out = []
    for i, row in enumerate(reader, start=2):
        if row["schema_version"] != str(SCHEMA_VERSION):
            raise IncompleteRun(f"{path}:{i}: schema version {row['schema_version']} is not {SCHEMA_VERSION}")
        if row["quantity"] not in QUANTITIES:
            raise IncompleteRun(f"{path}:{i}: unregistered quantity {row['quantity']!r}")
        try:
            value = float(row["value"])
        except ValueError as exc:
            raise IncompleteRun(f"{path}:{i}: value {row['value']!r} is not a number") from exc
        out.append(Record(row["experiment_id"], row["mode"], row["quantity"], json.loads(row["parameters"]),
                          value, _parse_float(row["lower"]), _parse_float(row["upper"])))
    return out


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def finite_or_nan(x: float) -> float:
    return float(x) if math.isfinite(x) else float("nan")


def table(name: str, columns: Sequence[str], rows: Iterable[Sequence]) -> Series:
    return Series(name, tuple(columns), tuple(tuple(r) for r in rows))
