"""Mode handlers: each mode expands into independent tasks plus a combine step.

A task is a module-level function ``fn(cfg, **kwargs) -> TaskOutput`` so it
can run in a worker process; ``combine`` receives the outputs in task order
and adds the cross-task records (ratios, orders, trends).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Any, Callable

import numpy as np

from .. import dynamics as dyn
from ..fock import (
    FixedN,
    FockBasis,
    Truncated,
    WeylOperator,
    boost_transform_check,
    build_Hcor,
    build_HN_k,
    build_LN,
    fit_growth,
    fluctuation_basis,
    ground_energy_EN,
    growth_series,
    hartree_product_energy,
    mean_field_witness,
    meanfield_errors,
    number_operator,
)
from ..fock.operators import lattice_mass, poisson_tail
from ..functionals import as_momentum, chemical_potential, current, stationary_residual_k
from ..grid import Field, Grid
from ..ground_state import (
    GroundStateOptions,
    boost,
    h3_bound_check,
    imaginary_part_defect,
    minimize_Q0,
    verify_boost_shift,
)
from ..potentials import make_potentials
from .config import ExperimentConfig
from .records import Record, RecordSink, Series, table


@dataclass
class TaskOutput:
    label: str
    records: list[Record] = dc_field(default_factory=list)
    series: list[Series] = dc_field(default_factory=list)
    payload: dict[str, Any] = dc_field(default_factory=dict)


Task = tuple[str, Callable[..., TaskOutput], dict]


# ------------------------------------------------------------------ helpers
def _sink(cfg: ExperimentConfig) -> RecordSink:
    return RecordSink(cfg.id, cfg.mode, cfg.tolerance)


def _grid(cfg: ExperimentConfig) -> Grid:
    from .config import FOCK_MODES

    return cfg.grid.build(lattice=cfg.mode in FOCK_MODES)


def _pot(cfg: ExperimentConfig, grid: Grid):
    p = cfg.potentials
    return make_potentials(grid, p.w, p.v, p.lam)


def _gs_options(cfg: ExperimentConfig) -> GroundStateOptions:
    o = cfg.option("ground_state", {})
    return GroundStateOptions(**{k: o[k] for k in ("step", "tol", "max_iter", "initial_width", "min_step") if k in o})


_GS_CACHE: dict[str, Any] = {}


def _ground_state(cfg: ExperimentConfig, grid: Grid, pot):
    """Minimizer of ``E_0`` for this grid and potential, cached per process."""
    key = json.dumps([repr(grid), cfg.potentials.w.to_dict(), cfg.potentials.v.to_dict(),
                      cfg.potentials.lam, cfg.options.get("ground_state", {})], sort_keys=True, default=str)
    if key not in _GS_CACHE:
        if len(_GS_CACHE) > 8:
            _GS_CACHE.clear()
        _GS_CACHE[key] = minimize_Q0(pot, opts=_gs_options(cfg))
    return _GS_CACHE[key]


def _kparam(k) -> list[float]:
    return [float(c) for c in np.atleast_1d(k)]


def lattice_phi0(cfg: ExperimentConfig, grid: Grid) -> np.ndarray:
    """Unit-mass lattice condensate from the ``phi0`` entry."""
    spec = cfg.phi0
    x = grid.axes[0]
    L = grid.length[0]
    if spec["kind"] == "amplitudes":
        phi = np.asarray(spec["re"], dtype=float) + 1j * np.asarray(spec.get("im", [0.0] * grid.n), dtype=float)
    else:
        width = float(spec.get("width", L / 8))
        centre = float(spec.get("center", L / 2))
        kick = int(spec.get("kick", 0)) * grid.momentum_step[0]
        d = (x - centre + L / 2) % L - L / 2
        phi = np.exp(-d**2 / (2 * width**2)) * np.exp(1j * kick * x)
    phi = phi.astype(complex)
    if spec.get("drop_nyquist", False) and grid.n % 2 == 0:
        ph = grid.fft(phi)
        ph[grid.n // 2] = 0.0
        phi = grid.ifft(ph)
    m = float(np.sum(np.abs(phi) ** 2) * grid.spacing[0])
    if m < 1e-14:
        raise ValueError("phi0 has zero mass")
    return phi / math.sqrt(m)


def continuum_initial(cfg: ExperimentConfig, grid: Grid, pot) -> tuple[Field, np.ndarray | None]:
    """Initial lab-frame field, and ``Q_k`` when the run starts from it."""
    spec = cfg.initial
    k = as_momentum(cfg.k[0], grid.dim)
    if spec["kind"] == "stationary":
        q = _ground_state(cfg, grid, pot)
        Qk = boost(q.Q, k)
        return Qk, Qk.values
    width = float(spec.get("width", min(grid.length) / 16))
    offset = np.asarray(spec.get("offset", [0.0] * grid.dim), dtype=float)
    kick = np.asarray(spec.get("kick", [0.0] * grid.dim), dtype=float)
    disp = grid.displacement(grid.center + offset)
    r2 = sum(d**2 for d in disp)
    phase = sum(kk * c for kk, c in zip(kick, grid.coords))
    f = Field(grid, np.exp(-r2 / (2 * width**2)) * np.exp(1j * phase))
    return f.normalized(), None


# -------------------------------------------------------------- ground_state
def ground_state_tasks(cfg: ExperimentConfig) -> list[Task]:
    tasks: list[Task] = [("ground", task_ground_base, {})]
    tasks += [(f"boost k={list(k)}", task_ground_boost, {"k": k}) for k in cfg.k]
    return tasks


def task_ground_base(cfg: ExperimentConfig) -> TaskOutput:
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    q = _ground_state(cfg, grid, pot)
    s = _sink(cfg)
    s.add("ground_mu0", q.mu)
    s.add("ground_energy", q.energy)
    s.add("ground_residual", q.residual)
    s.add("ground_imag_defect", imaginary_part_defect(q.Q))
    s.add("ground_current", float(np.linalg.norm(current(q.Q))))
    if cfg.option("h3_check", True) and q.mu < 0:
        h = h3_bound_check(q, pot)
        s.add("h3_lhs", h.lhs)
        s.add("h3_rhs", h.rhs)
        s.add("h3_bound_margin", h.slack)
    series = [table("energy_history", ("iteration", "energy"), enumerate(q.energy_history.tolist()))]
    if grid.dim == 1:
        x = grid.axes[0]
        series.append(table("ground_profile", ("x", "re_Q0", "im_Q0"),
                            zip(x.tolist(), q.Q.values.real.tolist(), q.Q.values.imag.tolist())))
    return TaskOutput("ground", s.records, series)


def task_ground_boost(cfg: ExperimentConfig, k) -> TaskOutput:
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    q = _ground_state(cfg, grid, pot)
    two = bool(cfg.option("two_route", False))
    r = verify_boost_shift(q, k, pot, tol=cfg.tolerance("boost_delta_mu"), two_route=two, opts=None)
    kv = as_momentum(k, grid.dim)
    params = {"k": _kparam(kv)}
    s = _sink(cfg)
    s.add("boost_delta_mu", r.delta_mu, params, target=r.expected_delta_mu)
    s.add("boost_residual_k", r.residual_k, params)
    Qk = boost(q.Q, kv)
    s.add("boost_residual_measured", stationary_residual_k(Qk, q.mu + r.delta_mu, kv, pot), params)
    s.add("boost_energy_gap", abs(r.energy_gap), params)
    if r.delta_mu_minimizer is not None:
        s.add("boost_delta_mu_minimizer", r.delta_mu_minimizer, params, target=r.expected_delta_mu)
    row = (float(kv @ kv), r.delta_mu, r.expected_delta_mu, r.residual_k, r.energy_gap,
           r.delta_mu_minimizer if r.delta_mu_minimizer is not None else float("nan"))
    return TaskOutput(f"boost k={params['k']}", s.records, [], {"row": row})


def ground_state_combine(cfg: ExperimentConfig, outs: list[TaskOutput]):
    rows = [o.payload["row"] for o in outs[1:]]
    cols = ("k_squared", "delta_mu", "k_squared_over_4", "residual_at_mu0_plus_k2_over_4",
            "energy_gap", "delta_mu_minimizer")
    return [], [table("boost_shift", cols, rows)]


# ------------------------------------------------------------------ dynamics
def _levels(cfg: ExperimentConfig) -> list[float]:
    refine = int(cfg.option("refine", 2))
    return [cfg.dt / 2**i for i in range(refine + 1)]


def dynamics_tasks(cfg: ExperimentConfig) -> list[Task]:
    return [(f"evolve dt={dt!r}", task_evolve, {"dt": dt}) for dt in _levels(cfg)]


def task_evolve(cfg: ExperimentConfig, dt: float) -> TaskOutput:
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    psi0, Qk = continuum_initial(cfg, grid, pot)
    k = as_momentum(cfg.k[0], grid.dim)
    # Same sample count per step at every level, so the second difference
    # used by the Ehrenfest residual refines together with dt.
    states, diag = dyn.evolve(psi0, k, pot, cfg.T, dt, sample_every=cfg.sample_every)
    payload: dict[str, Any] = {"dt": dt, "final": states[-1].psi.values, "diag": diag.as_arrays(),
                               "momentum_constant": diag.momentum_constant}
    s = _sink(cfg)
    params = {"dt": dt}
    s.add("mass_drift_rate", diag.mass_drift_rate(), params)
    s.add("energy_drift_rate", diag.energy_drift_rate(), params)
    s.add("boundary_mass_max", float(np.max(diag.boundary_mass)), params)
    if len(diag.t) >= 3:
        e = dyn.ehrenfest_residual(diag)
        payload["ehrenfest"] = e.max_residual
        s.add("ehrenfest_v_term_max", e.max_v_term, params)
        s.add("ehrenfest_residual_max", e.max_residual, params)
    if Qk is not None:
        ref = np.abs(Qk)
        fid = max(float(np.sqrt(np.sum((np.abs(dyn.gauge_map_to_phi(st).values) - ref) ** 2) * grid.cell_volume))
                  for st in states)
        payload["fidelity"] = fid
    return TaskOutput(f"evolve dt={dt!r}", s.records, [], payload)


def dynamics_combine(cfg: ExperimentConfig, outs: list[TaskOutput]):
    s = _sink(cfg)
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    k = as_momentum(cfg.k[0], grid.dim)
    ref = outs[0].payload
    d = ref["diag"]
    series = []
    if cfg.initial["kind"] == "stationary":
        t = d["t"]
        X = d["X"]
        drift = np.max(np.linalg.norm(X - X[0] - np.outer(t, 0.5 * k), axis=1))
        s.add("stationary_drift_deviation", float(drift), {"dt": ref["dt"]})
        if len(t) >= 3:
            h = t[1] - t[0]
            acc = np.linalg.norm((X[2:] - 2 * X[1:-1] + X[:-2]) / h**2, axis=1)
            s.add("stationary_acceleration_max", float(np.max(acc)), {"dt": ref["dt"]})
        s.add("stationary_fidelity", ref["fidelity"], {"dt": ref["dt"]})
    s.add("momentum_constant", ref["momentum_constant"], {"dt": ref["dt"]})
    diag = dyn.Diagnostics(**{name: list(v) for name, v in d.items()}, dt=ref["dt"])
    y = dyn.y_norm_report(diag, k, pot)
    s.add("smallness_parameter", y.eps_w + 3 * y.eps_v)
    s.add("y_norm_mixed", y.l10_3_w1_10_3)
    if y.hypothesis_met:
        s.add("h1_bound_margin", y.bound_rhs - y.linf_h1, {"T": cfg.T})
        s.add("velocity_bound_margin", y.velocity_bound - y.max_speed, {"T": cfg.T})
    if len(outs) >= 2 and all("ehrenfest" in o.payload for o in outs):
        res = [o.payload["ehrenfest"] for o in outs]
        orders = [math.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)]
        s.add("ehrenfest_order", min(orders), {"dt": [o.payload["dt"] for o in outs]})
    diffs = [float(np.sqrt(np.sum(np.abs(outs[i].payload["final"] - outs[i + 1].payload["final"]) ** 2)
                           * grid.cell_volume)) for i in range(len(outs) - 1)]
    if len(diffs) >= 2:
        orders = [math.log2(diffs[i] / diffs[i + 1]) for i in range(len(diffs) - 1)]
        s.add("self_convergence_order", min(orders), {"dt": [o.payload["dt"] for o in outs]})
    series.append(_trajectory_table(d, grid.dim))
    series.append(table("refinement", ("dt", "ehrenfest_residual_max", "terminal_difference_to_next"),
                        [(o.payload["dt"], o.payload.get("ehrenfest", float("nan")),
                          diffs[i] if i < len(diffs) else float("nan")) for i, o in enumerate(outs)]))
    return s.records, series


def _trajectory_table(d: dict, dim: int) -> Series:
    axes = "xyz"[:dim]
    cols = (["t"] + [f"X_{a}" for a in axes] + [f"velocity_{a}" for a in axes] + [f"current_{a}" for a in axes]
            + [f"force_{a}" for a in axes] + ["mass", "energy_k", "S", "v_term", "h1", "boundary_mass"])
    rows = []
    for i, t in enumerate(d["t"]):
        rows.append([t, *d["X"][i], *d["velocity"][i], *d["current"][i], *d["force"][i], d["mass"][i],
                     d["energy_k"][i], d["S"][i], float(np.linalg.norm(d["v_term"][i])), d["h1"][i],
                     d["boundary_mass"][i]])
    return table("trajectory", cols, rows)


# --------------------------------------------------------------- gauge_check
def gauge_tasks(cfg: ExperimentConfig) -> list[Task]:
    return [("gauge", task_gauge, {})]


def task_gauge(cfg: ExperimentConfig) -> TaskOutput:
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    phi0, Qk = continuum_initial(cfg, grid, pot)
    k = as_momentum(cfg.k[0], grid.dim)
    g = dyn.gauge_check(phi0, k, pot, cfg.T, cfg.dt)
    s = _sink(cfg)
    params = {"T": cfg.T, "dt": cfg.dt}
    s.add("gauge_discrepancy", g.discrepancy, params)
    s.add("gauge_current_gap", g.current_gap, params)
    if Qk is not None:
        mu_k = chemical_potential(phi0, pot, k)
        direct = dyn.evolve_phi_direct(phi0, k, pot, cfg.T, cfg.dt)
        err = (direct - phi0 * np.exp(-1j * mu_k * cfg.T)).norm()
        s.add("direct_stationary_error", err, {**params, "mu_k": mu_k})
    return TaskOutput("gauge", s.records)


def gauge_combine(cfg, outs):
    return [], []


# ------------------------------------------------------------ en_asymptotics
def en_tasks(cfg: ExperimentConfig) -> list[Task]:
    return [(f"E_N N={n}", task_en, {"N": n}) for n in cfg.N]


def task_en(cfg: ExperimentConfig, N: int) -> TaskOutput:
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    q = _ground_state(cfg, grid, pot)
    basis = FockBasis(grid, FixedN(N))
    E0N = ground_energy_EN(build_HN_k(basis, 0.0, pot))
    s = _sink(cfg)
    rows = []
    for kv in cfg.k:
        k = kv[0]
        params = {"N": N, "k": k}
        Ek = ground_energy_EN(build_HN_k(basis, k, pot))
        upper = hartree_product_energy(boost(q.Q, [k]).values, N, k, pot)
        gap = abs(Ek / N - (k * k / 4 + q.energy))
        s.add("en_ground_energy", Ek, params)
        s.add("en_lower_margin", Ek - N * k * k / 4 - E0N, params)
        s.add("en_upper_margin", upper - Ek, params)
        s.add("en_hartree_gap", gap, params)
        if cfg.option("boost_identity", False):
            r = boost_transform_check(basis, k, pot)
            s.add("boost_identity_literal", r.literal, params)
            s.add("boost_identity_corrected", r.corrected, params)
            s.add("boost_identity_compatible", r.compatible_corrected, params)
            s.add("boost_potential_commutes", r.potential_commutes, params)
        rows.append((N, k, Ek, E0N, upper, gap))
    return TaskOutput(f"E_N N={N}", s.records, [], {"rows": rows, "hartree": q.energy})


def en_combine(cfg: ExperimentConfig, outs: list[TaskOutput]):
    s = _sink(cfg)
    s.add("en_hartree_energy", outs[0].payload["hartree"])
    rows = [r for o in outs for r in o.payload["rows"]]
    for kv in cfg.k:
        k = kv[0]
        seq = sorted((r[0], r[5]) for r in rows if r[1] == k)
        for (n1, g1), (n2, g2) in zip(seq, seq[1:]):
            s.add("en_gap_change", g2 - g1, {"N": n1, "N_next": n2, "k": k})
    cols = ("N", "k", "E_N_k", "E_N_0", "product_energy", "hartree_gap")
    return s.records, [table("en_table", cols, rows)]


# ------------------------------------------------------------ mf_convergence
def mf_tasks(cfg: ExperimentConfig) -> list[Task]:
    return [(f"mean-field N={n}", task_mf, {"N": n}) for n in cfg.N]


_WITNESS_CACHE: dict[str, Any] = {}


def _witness(cfg: ExperimentConfig, grid, pot, phi0, T: float):
    key = json.dumps([cfg.raw, T], sort_keys=True)
    if key not in _WITNESS_CACHE:
        if len(_WITNESS_CACHE) > 4:
            _WITNESS_CACHE.clear()
        _WITNESS_CACHE[key] = mean_field_witness(phi0, cfg.k[0][0], pot, T, cfg.dt)
    return _WITNESS_CACHE[key]


def task_mf(cfg: ExperimentConfig, N: int) -> TaskOutput:
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    phi0 = lattice_phi0(cfg, grid)
    times = sorted(set((0.0,) + tuple(cfg.times)))
    wit = _witness(cfg, grid, pot, phi0, times[-1])
    phase = cfg.option("phase", "corrected")
    normal = bool(cfg.option("normal_ordered", True))
    errs = meanfield_errors(N, times, wit, phase=phase, normal_ordered=normal)
    probe = None
    if cfg.option("truncation_probe", True):
        extra = int(cfg.option("probe_extra", 8))
        basis = fluctuation_basis(N, grid, lattice_mass(grid, phi0), extra=extra)
        probe = meanfield_errors(N, times, wit, basis=basis, phase=phase, normal_ordered=normal)
    literal = None
    if cfg.option("compare_literal_phase", False):
        literal = meanfield_errors(N, times, wit, phase="literal" if phase == "corrected" else "corrected",
                                   normal_ordered=normal)
    s = _sink(cfg)
    rows = []
    for i, e in enumerate(errs):
        params = {"N": N, "t": e.t}
        frac = abs(e.error - probe[i].error) / e.error if probe is not None and e.error > 0 else float("nan")
        if e.t == 0.0:
            s.add("mf_initial_error", e.error, params)
        else:
            s.add("mf_error", e.error, params)
            if probe is not None:
                s.add("mf_truncation_fraction", frac, params)
            if literal is not None:
                s.add("mf_error_literal", literal[i].error, params)
        s.add("mf_identity_gap", e.identity_gap, params)
        rows.append((N, e.t, e.error, e.overlap, e.identity_gap, e.n_max, e.tail, frac,
                     literal[i].error if literal is not None else float("nan")))
    return TaskOutput(f"mean-field N={N}", s.records, [], {"rows": rows})


def mf_combine(cfg: ExperimentConfig, outs: list[TaskOutput]):
    s = _sink(cfg)
    rows = [r for o in outs for r in o.payload["rows"]]
    lo_d, hi_d = cfg.option("ratio_window", [0.53, 0.88])
    by_t: dict[float, list] = {}
    for r in rows:
        by_t.setdefault(r[1], []).append(r)
    ratio_rows = []
    for t in sorted(by_t):
        if t == 0.0:
            continue
        seq = sorted(by_t[t])
        for a, b in zip(seq, seq[1:]):
            ratio = b[2] / a[2]
            if b[0] == 2 * a[0]:
                lo, hi = lo_d, hi_d
            else:  # same relative window around (N/N')^(1/2)
                c = math.sqrt(a[0] / b[0])
                lo, hi = 0.75 * c, 1.25 * c
            params = {"N": a[0], "N_next": b[0], "t": t}
            s.add("mf_ratio", ratio, params, lower=lo, upper=hi)
            s.add("mf_monotone_excess", ratio - 1.0, params)
            ratio_rows.append((a[0], b[0], t, ratio, lo, hi))
    cols = ("N", "t", "error", "overlap", "identity_gap", "n_max", "poisson_tail", "truncation_fraction",
            "error_opposite_phase")
    return s.records, [table("mf_errors", cols, rows),
                       table("mf_ratios", ("N", "N_next", "t", "ratio", "lower", "upper"), ratio_rows)]


# --------------------------------------------------------------- bound_suite
def bound_tasks(cfg: ExperimentConfig) -> list[Task]:
    return [(f"bounds N={n}", task_bounds, {"N": n}) for n in cfg.N]


def task_bounds(cfg: ExperimentConfig, N: int) -> TaskOutput:
    grid = _grid(cfg)
    pot = _pot(cfg, grid)
    phi0 = lattice_phi0(cfg, grid)
    k = cfg.k[0][0]
    dx = grid.spacing[0]
    s = _sink(cfg)
    base = {"N": N, "k": k}
    # Defect operator on the vacuum (only the two-particle sector is reached).
    small = FockBasis(grid, Truncated(3))
    LN = build_LN(phi0, k, pot, N, small)
    lhs = 2.0 * math.sqrt(N) * float(np.linalg.norm(LN.matrix @ small.vacuum()))
    lap = grid.ifft(-grid.kappa_sq * grid.fft(phi0))
    rhs = float(np.sqrt(np.sum(np.abs(lap) ** 2) * dx))
    s.add("ln_vacuum_oracle", abs(lhs - rhs), {**base, "lhs": lhs, "rhs": rhs})
    # Coherent state on the fluctuation basis.
    mass_sq = lattice_mass(grid, phi0)
    basis = fluctuation_basis(N, grid, mass_sq)
    s.add("truncation_tail", poisson_tail(N * mass_sq, basis.mode.n_max), {**base, "n_max": basis.mode.n_max})
    W = WeylOperator(basis, phi0, N)
    WO = W.apply(basis.vacuum())
    s.add("weyl_vacuum_overlap", abs(np.vdot(basis.vacuum(), WO) - math.exp(-N * mass_sq / 2)), base)
    Nb = number_operator(basis)
    s.add("weyl_number", abs(np.vdot(WO, Nb.matrix @ WO).real - N * mass_sq), base)
    Hc = build_Hcor(basis, phi0, pot)
    s.add("hcor_number_commutator", Hc.commutator(Nb).max_norm(), base)
    # Growth of the fluctuation state.
    wit = mean_field_witness(phi0, k, pot, cfg.T, cfg.dt)
    every = int(cfg.option("series_every", 1))
    gs = growth_series(wit, basis, N, cfg.T, every=every)
    s.add("fluctuation_norm_defect", gs.norm_defect, base)
    named = [("ln_defect", 0, gs.ln_defect, 0.0)]
    named += [("number", a, gs.number[a], 1.0) for a in (1, 2)]
    named += [("japanese", a, gs.japanese[a], 1.0) for a in (1, 2)]
    fits = []
    for name, alpha, y, shift in named:
        f = fit_growth(gs.times, y, shift)
        p = {**base, "series": name, "alpha": alpha, "shift": shift}
        s.add("growth_C1", f.C1, p)
        s.add("growth_fit_residual", f.max_rel_residual, p)
        s.add("growth_envelope_excess", f.envelope_excess, p)
        fits.append((name, alpha, shift, f.C0, f.C1, f.max_rel_residual, f.envelope_excess))
    cols = ("t", "ln_defect", "number_1", "number_2", "japanese_1", "japanese_2")
    rows = zip(gs.times.tolist(), gs.ln_defect.tolist(), gs.number[1].tolist(), gs.number[2].tolist(),
               gs.japanese[1].tolist(), gs.japanese[2].tolist())
    return TaskOutput(f"bounds N={N}", s.records,
                      [table(f"growth_N{N}", cols, rows),
                       table(f"growth_fits_N{N}", ("series", "alpha", "shift", "C0", "C1", "max_rel_residual",
                                                   "envelope_excess"), fits)])


def bound_combine(cfg, outs):
    return [], []


HANDLERS: dict[str, tuple[Callable, Callable]] = {
    "ground_state": (ground_state_tasks, ground_state_combine),
    "dynamics": (dynamics_tasks, dynamics_combine),
    "gauge_check": (gauge_tasks, gauge_combine),
    "en_asymptotics": (en_tasks, en_combine),
    "mf_convergence": (mf_tasks, mf_combine),
    "bound_suite": (bound_tasks, bound_combine),
}
