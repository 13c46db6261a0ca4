"""Experiment configuration: JSON ingestion and validation.

All quantities are in natural units (hbar = m = 1). A config looks like::

    {
      "id": "boost-1d",
      "mode": "ground_state",
      "grid": {"dim": 1, "n": 256, "length_over_pi": 8},
      "potentials": {"w": {"family": "gaussian_well", "depth": 3, "width": 1.5},
                     "v": {"family": "gaussian", "amplitude": 1, "width": 1},
                     "lambda": 0.5},
      "k": [0.5, 1.0, 2.0]
    }

Mode-specific entries are listed in ``MODE_FIELDS``; optional knobs go in
``options`` and tolerance overrides in ``tolerances``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..errors import ConfigError
from ..grid import Grid
from ..potentials import PotentialSpec
from .registry import QUANTITIES

MODES = ("ground_state", "dynamics", "en_asymptotics", "mf_convergence", "bound_suite", "gauge_check")

MODE_FIELDS: dict[str, tuple[str, ...]] = {
    "ground_state": ("grid", "potentials", "k"),
    "dynamics": ("grid", "potentials", "k", "T", "dt", "initial"),
    "gauge_check": ("grid", "potentials", "k", "T", "dt", "initial"),
    "en_asymptotics": ("grid", "potentials", "k", "N"),
    "mf_convergence": ("grid", "potentials", "k", "N", "times", "dt", "phi0"),
    "bound_suite": ("grid", "potentials", "k", "N", "T", "dt", "phi0"),
}

FOCK_MODES = ("en_asymptotics", "mf_convergence", "bound_suite")
KNOWN_FIELDS = {"id", "mode", "grid", "potentials", "k", "N", "T", "dt", "sample_every", "times",
                "initial", "phi0", "tolerances", "options", "output_dir", "description"}


@dataclass(frozen=True)
class GridConfig:
    dim: int
    n: int
    length: float

    def build(self, lattice: bool = False) -> Grid:
        if lattice:
            return Grid.lattice(self.n, self.length)
        return Grid(self.dim, self.n, self.length)


@dataclass(frozen=True)
class PotentialConfig:
    w: PotentialSpec
    v: PotentialSpec
    lam: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description.

    ``k`` is a tuple of momentum vectors (each of length ``grid.dim``);
    ``options`` holds the mode-specific knobs and ``raw`` is the parsed JSON
    echoed into the manifest.
    """

    id: str
    mode: str
    grid: GridConfig
    potentials: PotentialConfig
    k: tuple[tuple[float, ...], ...]
    N: tuple[int, ...] = ()
    T: float | None = None
    dt: float | None = None
    sample_every: int = 1
    times: tuple[float, ...] = ()
    initial: Mapping[str, Any] = dc_field(default_factory=dict)
    phi0: Mapping[str, Any] = dc_field(default_factory=dict)
    tolerances: Mapping[str, float] = dc_field(default_factory=dict)
    options: Mapping[str, Any] = dc_field(default_factory=dict)
    output_dir: str | None = None
    raw: Mapping[str, Any] = dc_field(default_factory=dict, compare=False, repr=False)

    def tolerance(self, quantity: str) -> float:
        """Configured tolerance for ``quantity`` or the registry default."""
        if quantity in self.tolerances:
            return float(self.tolerances[quantity])
        return QUANTITIES[quantity].tolerance

    def option(self, name: str, default=None):
        return self.options.get(name, default)


# ------------------------------------------------------------------ parsing
def _line_of(text: str | None, field: str) -> int | None:
    """Line number of the first ``"field":`` key in the source text."""
    if not text:
        return None
    leaf = field.split(".")[-1].split("[")[0]
    m = re.search(r'"' + re.escape(leaf) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


class _Reader:
    def __init__(self, text: str | None):
        self.text = text

    def fail(self, msg: str, field: str):
        raise ConfigError(msg, field=field, line=_line_of(self.text, field))

    def number(self, d: Mapping, key: str, path: str, positive: bool = False, minimum: float | None = None):
        if key not in d:
            self.fail("missing required entry", path)
        val = d[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            self.fail(f"expected a finite number, got {val!r}", path)
        if positive and not val > 0:
            self.fail(f"must be positive, got {val!r}", path)
        if minimum is not None and val < minimum:
            self.fail(f"must be at least {minimum}, got {val!r}", path)
        return float(val)

    def integer(self, d: Mapping, key: str, path: str, minimum: int = 0) -> int:
        val = d.get(key)
        if isinstance(val, bool) or not isinstance(val, int):
            self.fail(f"expected an integer, got {val!r}", path)
        if val < minimum:
            self.fail(f"must be at least {minimum}, got {val}", path)
        return int(val)


def _grid(r: _Reader, d: Any, mode: str) -> GridConfig:
    if not isinstance(d, Mapping):
        r.fail("expected an object with dim, n and length", "grid")
    dim = r.integer(d, "dim", "grid.dim", minimum=1)
    if dim > 3:
        r.fail("dimension must be 1, 2 or 3", "grid.dim")
    n = r.integer(d, "n", "grid.n", minimum=2)
    if ("length" in d) == ("length_over_pi" in d):
        r.fail("give exactly one of 'length' or 'length_over_pi'", "grid")
    if "length" in d:
        length = r.number(d, "length", "grid.length", positive=True)
    else:
        length = math.pi * r.number(d, "length_over_pi", "grid.length_over_pi", positive=True)
    if mode in FOCK_MODES:
        if dim != 1:
            r.fail("Fock lattices are one-dimensional", "grid.dim")
    elif n % 2:
        r.fail("spectral grids need an even number of points", "grid.n")
    return GridConfig(dim, n, length)


def _potential(r: _Reader, d: Any, path: str) -> PotentialSpec:
    if not isinstance(d, Mapping):
        r.fail("expected an object with a 'family' entry", path)
    try:
        return PotentialSpec.from_dict(d)
    except (ValueError, TypeError) as exc:
        r.fail(str(exc), path)


def _potentials(r: _Reader, d: Any) -> PotentialConfig:
    if not isinstance(d, Mapping):
        r.fail("expected an object with w, v and lambda", "potentials")
    for key in ("w", "v"):
        if key not in d:
            r.fail("missing required entry", f"potentials.{key}")
    lam = r.number(d, "lambda", "potentials.lambda", minimum=0.0)
    return PotentialConfig(_potential(r, d["w"], "potentials.w"), _potential(r, d["v"], "potentials.v"), lam)


def _momenta(r: _Reader, val: Any, dim: int) -> tuple[tuple[float, ...], ...]:
    items = val if isinstance(val, list) else [val]
    if not items:
        r.fail("at least one momentum is required", "k")
    out = []
    for item in items:
        vec = item if isinstance(item, list) else [item]
        if not all(isinstance(c, (int, float)) and not isinstance(c, bool) and math.isfinite(c) for c in vec):
            r.fail(f"momentum entries must be finite numbers, got {item!r}", "k")
        if len(vec) == 1:
            vec = list(vec) + [0.0] * (dim - 1)
        if len(vec) != dim:
            r.fail(f"momentum {item!r} does not match dimension {dim}", "k")
        out.append(tuple(float(c) for c in vec))
    return tuple(out)


def parse_config(data: Mapping[str, Any], text: str | None = None) -> ExperimentConfig:
    """Validate a parsed JSON object; ``text`` (if given) locates errors by line."""
    r = _Reader(text)
    if not isinstance(data, Mapping):
        raise ConfigError("top level must be a JSON object", line=1)
    unknown = sorted(set(data) - KNOWN_FIELDS)
    if unknown:
        r.fail(f"unknown entry (known: {sorted(KNOWN_FIELDS)})", unknown[0])
    mode = data.get("mode")
    if mode not in MODES:
        r.fail(f"mode must be one of {MODES}, got {mode!r}", "mode")
    exp_id = data.get("id", mode)
    if not isinstance(exp_id, str) or not re.fullmatch(r"[A-Za-z0-9_.\-]+", exp_id):
        r.fail("id must be a non-empty string of letters, digits, '.', '_' or '-'", "id")
    for key in MODE_FIELDS[mode]:
        if key not in data:
            r.fail(f"required for mode {mode!r}", key)
    grid = _grid(r, data["grid"], mode)
    pots = _potentials(r, data["potentials"])
    k = _momenta(r, data["k"], grid.dim)

    N: tuple[int, ...] = ()
    if "N" in data:
        vals = data["N"] if isinstance(data["N"], list) else [data["N"]]
        if not vals:
            r.fail("particle-number list is empty", "N")
        if not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in vals):
            r.fail("particle numbers must be positive integers", "N")
        N = tuple(int(n) for n in vals)

    T = r.number(data, "T", "T", minimum=0.0) if "T" in data else None
    dt = r.number(data, "dt", "dt", positive=True) if "dt" in data else None
    sample_every = r.integer(data, "sample_every", "sample_every", minimum=1) if "sample_every" in data else 1
    times: tuple[float, ...] = ()
    if "times" in data:
        tv = data["times"]
        if not isinstance(tv, list) or not tv:
            r.fail("expected a non-empty list of times", "times")
        if not all(isinstance(t, (int, float)) and not isinstance(t, bool) and t >= 0 for t in tv):
            r.fail("times must be nonnegative numbers", "times")
        times = tuple(sorted(float(t) for t in tv))

    for key in ("initial", "phi0", "options"):
        if key in data and not isinstance(data[key], Mapping):
            r.fail("expected an object", key)
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, Mapping):
        r.fail("expected an object mapping quantity names to tolerances", "tolerances")
    for name, tol in tolerances.items():
        if name not in QUANTITIES:
            r.fail("unknown quantity", f"tolerances.{name}")
        if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0:
            r.fail(f"tolerance must be a positive number, got {tol!r}", f"tolerances.{name}")
    out_dir = data.get("output_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        r.fail("expected a path string", "output_dir")

    cfg = ExperimentConfig(
        id=exp_id, mode=mode, grid=grid, potentials=pots, k=k, N=N, T=T, dt=dt,
        sample_every=sample_every, times=times, initial=dict(data.get("initial", {})),
        phi0=dict(data.get("phi0", {})), tolerances={k_: float(v) for k_, v in tolerances.items()},
        options=dict(data.get("options", {})), output_dir=out_dir, raw=json.loads(json.dumps(data)))
    _check_mode(cfg, r)
    return cfg


def _check_mode(cfg: ExperimentConfig, r: _Reader) -> None:
    if cfg.mode in ("dynamics", "gauge_check"):
        if len(cfg.k) != 1:
            r.fail("time evolution takes a single momentum", "k")
        kind = cfg.initial.get("kind")
        if kind not in ("stationary", "packet"):
            r.fail("initial.kind must be 'stationary' or 'packet'", "initial.kind")
        _steps(cfg.T, cfg.dt, r, "T")
    if cfg.mode in FOCK_MODES:
        g = cfg.grid.build(lattice=True)
        for kv in cfg.k:
            if not g.on_lattice(kv):
                r.fail(f"k = {kv[0]} is not on the lattice momentum set", "k")
            if cfg.mode == "en_asymptotics" and not g.on_lattice(np.asarray(kv) / 2):
                r.fail(f"k/2 = {kv[0] / 2} is not on the lattice momentum set", "k")
        kind = cfg.phi0.get("kind") if cfg.phi0 else None
        if cfg.mode != "en_asymptotics" and kind not in ("amplitudes", "gaussian"):
            r.fail("phi0.kind must be 'amplitudes' or 'gaussian'", "phi0.kind")
        if kind == "amplitudes":
            re_ = cfg.phi0.get("re")
            if not isinstance(re_, list) or len(re_) != cfg.grid.n:
                r.fail(f"phi0.re must list {cfg.grid.n} amplitudes", "phi0.re")
            im = cfg.phi0.get("im", [0.0] * cfg.grid.n)
            if not isinstance(im, list) or len(im) != cfg.grid.n:
                r.fail(f"phi0.im must list {cfg.grid.n} amplitudes", "phi0.im")
    if cfg.mode == "mf_convergence":
        for t in cfg.times:
            _steps(t, cfg.dt, r, "times")
    if cfg.mode == "bound_suite":
        _steps(cfg.T, cfg.dt, r, "T")


def _steps(T: float, dt: float, r: _Reader, field: str) -> None:
    n = round(T / dt)
    if abs(n * dt - T) > 1e-9 * max(1.0, T):
        r.fail(f"{T} is not a whole number of steps of dt = {dt}", field)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a JSON config file.

    Raises
    ------
    ConfigError
        On unreadable files, malformed JSON or invalid entries; the message
        names the offending field and, where it can be located, the line.
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc.msg}", line=exc.lineno) from exc
    return parse_config(data, text)
