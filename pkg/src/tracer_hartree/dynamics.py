"""Time evolution of the condensate with a self-consistently moving tracer.

Two equivalent descriptions are integrated:

* the tracer frame, ``i d_t phi = -(k - j) . i grad phi + H[phi] phi`` with a
  fixed external potential ``w`` (``H`` as in :mod:`.functionals`);
* the lab frame, ``i d_t psi = H_psi[psi] psi`` in which ``w`` is translated
  along the tracer trajectory, ``d_t X = k - j``.

With ``j = <., i grad .>`` the two are related by ``psi(t, x) = phi(t, x + X(t))``
and ``w_psi(t, x) = w(x + X(t))``: this is the sign for which the transport
term cancels under the chain rule. The lab frame is integrated by Strang
splitting, the tracer frame by pseudo-spectral RK4.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import BlowupDetected, NotNormalized
from .functionals import (
    PotentialPair,
    as_momentum,
    boosted_action,
    current_array,
    energy_Ek,
    interaction_integral,
    phase_integrand,
)
from .grid import Field, Grid, sobolev_norm, w1p_norm


@dataclass(frozen=True, eq=False)
class DynState:
    """Lab-frame state. ``S`` is the accumulated phase per particle."""

    t: float
    psi: Field
    X: np.ndarray
    S: float
    k: np.ndarray
    pot: PotentialPair

    def __post_init__(self):
        if not np.all(np.isfinite(np.asarray(self.X, dtype=float))):
            raise BlowupDetected("tracer position is not finite")


@dataclass
class Diagnostics:
    """Per-sample monitored quantities (arrays indexed by sample)."""

    t: list = dc_field(default_factory=list)
    mass: list = dc_field(default_factory=list)
    energy_k: list = dc_field(default_factory=list)
    current: list = dc_field(default_factory=list)
    velocity: list = dc_field(default_factory=list)
    X: list = dc_field(default_factory=list)
    S: list = dc_field(default_factory=list)
    force: list = dc_field(default_factory=list)
    v_term: list = dc_field(default_factory=list)
    h1: list = dc_field(default_factory=list)
    w1_10_3: list = dc_field(default_factory=list)
    boundary_mass: list = dc_field(default_factory=list)
    momentum_constant: float = 0.0
    dt: float = 0.0

    def as_arrays(self) -> dict[str, np.ndarray]:
        return {k: np.asarray(v) for k, v in self.__dict__.items() if isinstance(v, list)}

    def mass_drift_rate(self) -> float:
        t, m = np.asarray(self.t), np.asarray(self.mass)
        span = max(t[-1] - t[0], 1.0) if len(t) > 1 else 1.0
        return float(np.max(np.abs(m - m[0])) / span)

    def energy_drift_rate(self) -> float:
        t, e = np.asarray(self.t), np.asarray(self.energy_k)
        span = max(t[-1] - t[0], 1.0) if len(t) > 1 else 1.0
        return float(np.max(np.abs(e - e[0])) / span)


# ------------------------------------------------------------------ helpers
def _mass(arr: np.ndarray, grid: Grid) -> float:
    return float(np.sum(np.abs(arr) ** 2) * grid.cell_volume)


def gauge_map_to_phi(state: DynState) -> Field:
    """Tracer-frame field ``phi(x) = psi(x - X)``."""
    g = state.psi.grid
    return Field(g, g.translate(state.psi.values, -np.asarray(state.X)))


def gauge_map_to_psi(phi: Field, X) -> Field:
    """Lab-frame field ``psi(x) = phi(x + X)``."""
    g = phi.grid
    return Field(g, g.translate(phi.values, np.asarray(X, dtype=float)))


def moving_potential(pot: PotentialPair, X) -> np.ndarray:
    """``w(x + X)`` sampled on the grid (real)."""
    return pot.grid.translate(pot.w.values.real, np.asarray(X, dtype=float), real=True).real


def tracer_force(psi: np.ndarray, X, pot: PotentialPair) -> np.ndarray:
    """Right-hand side of the Ehrenfest law: ``-integral (grad w)(x + X) |psi|^2``."""
    g = pot.grid
    wx = moving_potential(pot, X)
    wh = g.fft(wx)
    rho = np.abs(psi) ** 2
    return np.array([-float(np.sum(g.ifft(m * wh).real * rho) * g.cell_volume)
                     for m in g.deriv_multipliers])


def pair_force(psi: np.ndarray, pot: PotentialPair) -> np.ndarray:
    """``lam * integral |psi|^2 grad(v * |psi|^2)``; vanishes for even ``v``."""
    g = pot.grid
    rho = np.abs(psi) ** 2
    vh = g.fft(pot.hartree_potential(rho).real)
    return np.array([float(np.sum(rho * g.ifft(m * vh).real) * g.cell_volume)
                     for m in g.deriv_multipliers])


def boundary_mass(phi: np.ndarray, grid: Grid, fraction: float = 0.4) -> float:
    """Mass farther than ``fraction * L`` from the box centre along some axis."""
    mask = np.zeros(grid.shape, dtype=bool)
    for d, L in zip(grid.displacement(grid.center), grid.length):
        mask |= np.abs(d) > fraction * L
    return float(np.sum(np.abs(phi[mask]) ** 2) * grid.cell_volume)


# ------------------------------------------------------------------ stepping
class _Stepper:
    """Precomputed kinetic propagators for a fixed ``dt``."""

    def __init__(self, grid: Grid, dt: float):
        self.grid = grid
        self.dt = dt
        self.half_kinetic = np.exp(-0.25j * dt * grid.kappa_sq)

    def kinetic_half(self, psi):
        g = self.grid
        return g.ifft(self.half_kinetic * g.fft(psi))


_STEPPERS: dict[tuple, _Stepper] = {}


def _stepper(grid: Grid, dt: float) -> _Stepper:
    key = (grid, float(dt))
    st = _STEPPERS.get(key)
    if st is None:
        if len(_STEPPERS) > 16:
            _STEPPERS.clear()
        st = _STEPPERS[key] = _Stepper(grid, dt)
    return st


def step(state: DynState, dt: float) -> DynState:
    """One Strang step of the lab-frame system.

    Half kinetic, then the potential phase with ``w`` translated to the midpoint
    trajectory, then half kinetic. ``X`` follows Heun's rule on
    ``d_t X = k - j`` and ``S`` a second-order quadrature of the phase integrand.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    pot, k = state.pot, state.k
    g = pot.grid
    st = _stepper(g, dt)
    psi = state.psi.values
    j0 = current_array(psi, g)
    X_mid = state.X + 0.5 * dt * (k - j0)
    p1 = st.kinetic_half(psi)
    vloc = moving_potential(pot, X_mid) + pot.hartree_potential(np.abs(p1) ** 2).real
    p2 = np.exp(-1j * dt * vloc) * p1
    p3 = st.kinetic_half(p2)
    if not np.all(np.isfinite(p3)):
        raise BlowupDetected(f"non-finite field at t = {state.t + dt:.6g}")
    j1 = current_array(p3, g)
    X_new = state.X + 0.5 * dt * ((k - j0) + (k - j1))
    # Phase: j changes only in the potential phase and |psi| only in the
    # kinetic halves, so p1 / p2 carry the midpoint values of both pieces.
    j_mid_sq = 0.5 * (float(j0 @ j0) + float(j1 @ j1))
    quart = interaction_integral(Field(g, p1), pot) if pot.lam else 0.0
    integrand = -0.5 * float(k @ k) + 0.5 * j_mid_sq + 0.5 * pot.lam * quart
    return DynState(state.t + dt, Field(g, p3), X_new, state.S + dt * integrand, k, pot)


def _sample(diag: Diagnostics, state: DynState) -> None:
    g = state.pot.grid
    psi = state.psi.values
    phi = gauge_map_to_phi(state)
    j = current_array(psi, g)
    diag.t.append(state.t)
    diag.mass.append(_mass(psi, g))
    diag.energy_k.append(energy_Ek(phi, state.k, state.pot))
    diag.current.append(j)
    diag.velocity.append(state.k - j)
    diag.X.append(np.array(state.X, dtype=float))
    diag.S.append(state.S)
    diag.force.append(tracer_force(psi, state.X, state.pot))
    diag.v_term.append(pair_force(psi, state.pot))
    diag.h1.append(sobolev_norm(state.psi, 1))
    diag.w1_10_3.append(w1p_norm(state.psi, 10.0 / 3.0))
    diag.boundary_mass.append(boundary_mass(phi.values, g))


def initial_state(psi0: Field, k, pot: PotentialPair, X0=None) -> DynState:
    kv = as_momentum(k, psi0.grid.dim)
    X = np.zeros(psi0.grid.dim) if X0 is None else as_momentum(X0, psi0.grid.dim)
    return DynState(0.0, psi0, X, 0.0, kv, pot)


def _n_steps(T: float, dt: float) -> int:
    if T < 0 or not dt > 0:
        raise ValueError("need T >= 0 and dt > 0")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T = {T} is not an integer multiple of dt = {dt}")
    return n


def evolve(psi0: Field, k, pot: PotentialPair, T: float, dt: float, sample_every: int = 1,
           X0=None) -> tuple[list[DynState], Diagnostics]:
    """Integrate the lab-frame system to time ``T``.

    Returns the sampled states (including ``t = 0``) and their diagnostics.
    ``Diagnostics.momentum_constant`` is the smallest ``C`` with
    ``|d_t X| <= |k| + C ||psi0||_{H^1}`` over the samples.

    Raises
    ------
    NotNormalized
        If ``psi0`` does not have unit mass.
    BlowupDetected
        If a non-finite value appears.
    """
    if abs(np.sqrt(_mass(psi0.values, psi0.grid)) - 1.0) > 1e-10:
        raise NotNormalized("initial condensate must have unit mass")
    nsteps = _n_steps(T, dt)
    state = initial_state(psi0, k, pot, X0)
    diag = Diagnostics(dt=dt)
    states = [state]
    _sample(diag, state)
    for n in range(1, nsteps + 1):
        state = step(state, dt)
        if n % sample_every == 0 or n == nsteps:
            states.append(state)
            _sample(diag, state)
    h1_0 = diag.h1[0]
    kn = float(np.linalg.norm(state.k))
    excess = max(float(np.linalg.norm(v)) - kn for v in diag.velocity)
    diag.momentum_constant = max(excess, 0.0) / h1_0
    return states, diag


# ------------------------------------------------------------ tracer frame
def tracer_frame_rhs(phi: np.ndarray, k: np.ndarray, pot: PotentialPair) -> np.ndarray:
    return -1j * boosted_action(phi, k, pot)


def rk4_path(phi0: Field, k, pot: PotentialPair, T: float, dt: float,
             record_every: int | None = None) -> tuple[np.ndarray, list[np.ndarray], np.ndarray]:
    """RK4 in the tracer frame, also integrating the per-particle phase.

    Returns ``(times, fields, phases)`` recorded every ``record_every`` steps
    (default: only the endpoints). The phase obeys ``d_t S = phase_integrand``
    and is integrated with the same RK4 stages, so it is fourth-order too.
    """
    kv = as_momentum(k, phi0.grid.dim)
    g = phi0.grid
    nsteps = _n_steps(T, dt)
    every = record_every or max(nsteps, 1)

    def integrand(a):
        return phase_integrand(Field(g, a), kv, pot)

    phi = phi0.values.copy()
    S = 0.0
    times, fields, phases = [0.0], [phi.copy()], [0.0]
    for n in range(1, nsteps + 1):
        k1 = tracer_frame_rhs(phi, kv, pot)
        y2 = phi + 0.5 * dt * k1
        k2 = tracer_frame_rhs(y2, kv, pot)
        y3 = phi + 0.5 * dt * k2
        k3 = tracer_frame_rhs(y3, kv, pot)
        y4 = phi + dt * k3
        k4 = tracer_frame_rhs(y4, kv, pot)
        S += dt / 6.0 * (integrand(phi) + 2 * integrand(y2) + 2 * integrand(y3) + integrand(y4))
        phi = phi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(phi)):
            raise BlowupDetected(f"non-finite field at t = {n * dt:.6g}")
        if n % every == 0 or n == nsteps:
            times.append(n * dt)
            fields.append(phi.copy())
            phases.append(S)
    return np.array(times), fields, np.array(phases)


def evolve_phi_direct(phi0: Field, k, pot: PotentialPair, T: float, dt: float) -> Field:
    """Tracer-frame field at ``T`` from pseudo-spectral RK4."""
    if abs(np.sqrt(_mass(phi0.values, phi0.grid)) - 1.0) > 1e-10:
        raise NotNormalized("initial condensate must have unit mass")
    _, fields, _ = rk4_path(phi0, k, pot, T, dt)
    return Field(phi0.grid, fields[-1])


@dataclass(frozen=True)
class GaugeCheck:
    discrepancy: float
    current_gap: float
    T: float
    dt: float

    def passed(self, tol: float = 1e-6) -> bool:
        return self.discrepancy < tol


def gauge_check(phi0: Field, k, pot: PotentialPair, T: float, dt: float) -> GaugeCheck:
    """Compare the RK4 tracer-frame solution with the gauge-mapped Strang solution."""
    states, _ = evolve(phi0, k, pot, T, dt, sample_every=max(_n_steps(T, dt), 1))
    final = states[-1]
    via_gauge = gauge_map_to_phi(final)
    direct = evolve_phi_direct(phi0, k, pot, T, dt)
    diff = (via_gauge - direct).norm()
    jg = current_array(via_gauge.values, phi0.grid)
    jd = current_array(direct.values, phi0.grid)
    return GaugeCheck(diff, float(np.linalg.norm(jg - jd)), T, dt)


# ---------------------------------------------------------------- analyses
@dataclass(frozen=True)
class EhrenfestReport:
    times: np.ndarray
    residual: np.ndarray
    v_term: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual)) if self.residual.size else 0.0

    @property
    def max_v_term(self) -> float:
        return float(np.max(np.abs(self.v_term))) if self.v_term.size else 0.0


def ehrenfest_residual(diag: Diagnostics) -> EhrenfestReport:
    """``|second difference of X - force|`` on the interior samples.

    The samples must be uniformly spaced.
    """
    t = np.asarray(diag.t)
    if t.size < 3:
        raise ValueError("need at least three samples")
    h = np.diff(t)
    if np.max(np.abs(h - h[0])) > 1e-9 * h[0]:
        raise ValueError("samples must be uniformly spaced")
    X = np.asarray(diag.X)
    acc = (X[2:] - 2 * X[1:-1] + X[:-2]) / h[0] ** 2
    force = np.asarray(diag.force)[1:-1]
    resid = np.linalg.norm(acc - force, axis=1)
    return EhrenfestReport(t[1:-1], resid, np.linalg.norm(np.asarray(diag.v_term), axis=1))


@dataclass(frozen=True)
class YNormReport:
    linf_h1: float
    l10_3_w1_10_3: float
    eps_w: float
    eps_v: float
    h1_initial: float
    bound_rhs: float | None
    velocity_bound: float | None
    max_speed: float
    speed_excess: float
    hypothesis_met: bool

    @property
    def h1_bound_holds(self) -> bool | None:
        return None if not self.hypothesis_met else self.linf_h1 <= self.bound_rhs

    @property
    def velocity_bound_holds(self) -> bool | None:
        return None if not self.hypothesis_met else self.max_speed <= self.velocity_bound

    @property
    def passed(self) -> bool | None:
        if not self.hypothesis_met:
            return None
        return bool(self.h1_bound_holds and self.velocity_bound_holds)


def y_norm_report(diag: Diagnostics, k, pot: PotentialPair) -> YNormReport:
    """Space-time norms of a lab-frame run against the small-potential bound.

    The bound is evaluated only when ``eps_w + 3 eps_v < 1`` with
    ``eps_w = ||w||_{W^{1,3/2}}`` and ``eps_v = ||lam v||_{W^{1,3/2}}``;
    otherwise ``hypothesis_met`` is False and the bound fields are None.
    """
    if not diag.t:
        raise ValueError("empty history")
    t = np.asarray(diag.t)
    h1 = np.asarray(diag.h1)
    w = np.asarray(diag.w1_10_3)
    p = 10.0 / 3.0
    if t.size > 1:
        mixed = float(np.trapezoid(w**p, t) ** (1.0 / p))
    else:
        mixed = 0.0
    eps_w = w1p_norm(pot.w, 1.5)
    eps_v = w1p_norm(pot.v * pot.lam, 1.5)
    ok = eps_w + 3.0 * eps_v < 1.0
    h10 = float(h1[0])
    kn = float(np.linalg.norm(as_momentum(k, pot.grid.dim)))
    speeds = np.linalg.norm(np.asarray(diag.velocity), axis=1)
    if ok:
        inv = 1.0 / (1.0 - eps_w - eps_v)
        rhs = 2.0 * inv * h10
        vb = kn + inv * h10
    else:
        rhs = vb = None
    return YNormReport(float(np.max(h1)), mixed, eps_w, eps_v, h10, rhs, vb,
                       float(np.max(speeds)), float(np.max(speeds) - kn), ok)
