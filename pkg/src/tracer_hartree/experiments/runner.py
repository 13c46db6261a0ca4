"""Run orchestration, output files and the records verifier."""

from __future__ import annotations

import json
import platform
import sys
import time
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from ..errors import IncompleteRun, TracerHartreeError
from .config import ExperimentConfig
from .modes import HANDLERS, TaskOutput
from .records import SCHEMA_VERSION, Record, Series, read_records, records_to_csv, sha256
from .registry import CLAIMS, MODE_REQUIRED, QUANTITIES


class RunError(TracerHartreeError, RuntimeError):
    """A task failed; the message names the experiment and task."""


@dataclass
class RunResult:
    config: ExperimentConfig
    records: list[Record]
    series: list[Series]
    wall_times: list[tuple[str, float]]

    @property
    def failures(self) -> list[Record]:
        return [r for r in self.records if r.passed is False]

    @property
    def checks(self) -> list[Record]:
        return [r for r in self.records if r.passed is not None]

    def values(self, quantity: str) -> list[Record]:
        return [r for r in self.records if r.quantity == quantity]


def _run_task(cfg: ExperimentConfig, label: str, fn, kwargs: dict) -> tuple[TaskOutput, float]:
    t0 = time.perf_counter()
    try:
        out = fn(cfg, **kwargs)
    except TracerHartreeError as exc:
        raise RunError(f"experiment {cfg.id!r}, task {label!r}: {type(exc).__name__}: {exc}") from exc
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise RunError(f"experiment {cfg.id!r}, task {label!r}: {type(exc).__name__}: {exc}") from exc
    return out, time.perf_counter() - t0


def execute(cfg: ExperimentConfig, jobs: int = 1) -> RunResult:
    """Run every task of ``cfg`` and merge the results in task order.

    ``jobs > 1`` fans tasks out to worker processes; the merged output is
    the same as with ``jobs = 1``.
    """
    plan, combine = HANDLERS[cfg.mode]
    tasks = plan(cfg)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            futures = [pool.submit(_run_task, cfg, label, fn, kw) for label, fn, kw in tasks]
            results = [f.result() for f in futures]
    else:
        results = [_run_task(cfg, label, fn, kw) for label, fn, kw in tasks]
    outs = [r[0] for r in results]
    walls = [(label, r[1]) for (label, _, _), r in zip(tasks, results)]
    t0 = time.perf_counter()
    try:
        extra_records, extra_series = combine(cfg, outs)
    except (TracerHartreeError, ValueError, ArithmeticError) as exc:
        raise RunError(f"experiment {cfg.id!r}, combine step: {type(exc).__name__}: {exc}") from exc
    walls.append(("combine", time.perf_counter() - t0))
    records = [r for o in outs for r in o.records] + list(extra_records)
    series = [s for o in outs for s in o.series] + list(extra_series)
    names = [s.name for s in series]
    if len(set(names)) != len(names):
        raise RunError(f"experiment {cfg.id!r}: duplicate series names {names}")
    return RunResult(cfg, records, series, walls)


def versions() -> dict[str, str]:
    from .. import __version__

    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__,
            "tracer_hartree": __version__}


def write_outputs(result: RunResult, out_dir: str | Path, jobs: int = 1, strict: bool = False) -> Path:
    """Write ``records.csv``, ``series_*.csv`` and ``manifest.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: "OrderedDict[str, bytes]" = OrderedDict()
    files["records.csv"] = records_to_csv(result.records).encode()
    for s in result.series:
        files[f"series_{s.name}.csv"] = s.to_csv().encode()
    for name, data in files.items():
        (out / name).write_bytes(data)
    checks = result.checks
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "experiment_id": result.config.id,
        "mode": result.config.mode,
        "config": result.config.raw,
        "versions": versions(),
        "files": {name: {"sha256": sha256(data), "bytes": len(data)} for name, data in files.items()},
        "summary": {"checks": len(checks), "passed": sum(r.passed for r in checks),
                    "failed": len(result.failures),
                    "failed_quantities": sorted({r.quantity for r in result.failures})},
        "jobs": jobs,
        "strict": strict,
        "wall_time_seconds": {label: round(t, 6) for label, t in result.wall_times},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=False) + "\n")
    return out


def default_out_dir(cfg: ExperimentConfig) -> Path:
    return Path(cfg.output_dir) if cfg.output_dir else Path("runs") / cfg.id


# ------------------------------------------------------------------ verify
@dataclass(frozen=True)
class ClaimStatus:
    claim: str
    passed: int
    failed: int
    failing: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.failed == 0


def check_complete(records: list[Record]) -> None:
    """Raise :class:`IncompleteRun` when an experiment lacks a required quantity."""
    if not records:
        raise IncompleteRun("records file contains no rows")
    seen: dict[tuple[str, str], set[str]] = {}
    for r in records:
        seen.setdefault((r.experiment_id, r.mode), set()).add(r.quantity)
    for (exp, mode), qs in seen.items():
        if mode not in MODE_REQUIRED:
            raise IncompleteRun(f"experiment {exp!r}: unknown mode {mode!r}")
        missing = [q for q in MODE_REQUIRED[mode] if q not in qs]
        if missing:
            raise IncompleteRun(f"experiment {exp!r} ({mode}) is missing required quantities: {missing}")


def summarize(records: list[Record]) -> list[ClaimStatus]:
    """Per-claim pass/fail counts, in registry order; pass flags are recomputed."""
    out = []
    for claim in CLAIMS:
        rs = [r for r in records if QUANTITIES[r.quantity].claim == claim and r.passed is not None]
        if not rs:
            continue
        bad = [r for r in rs if not r.passed]
        failing = tuple(f"{r.quantity} {r.params_json()} = {r.value!r} (window {r.lower}, {r.upper})" for r in bad)
        out.append(ClaimStatus(claim, len(rs) - len(bad), len(bad), failing))
    return out


def verify(path: str | Path, stream=None) -> int:
    """Print a claim-by-claim summary of a records file; return the exit status."""
    stream = stream or sys.stdout
    records = read_records(path)
    check_complete(records)
    statuses = summarize(records)
    for st in statuses:
        mark = "PASS" if st.ok else "FAIL"
        print(f"{mark}  {st.claim}: {st.passed} passed, {st.failed} failed  [{CLAIMS[st.claim]}]", file=stream)
        for f in st.failing:
            print(f"      {f}", file=stream)
    n_fail = sum(not s.ok for s in statuses)
    print(f"{len(statuses) - n_fail}/{len(statuses)} claims passed", file=stream)
    return 0 if n_fail == 0 else 1
