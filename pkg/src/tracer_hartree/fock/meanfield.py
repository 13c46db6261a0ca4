"""Coherent-state mean-field dynamics on the lattice and its comparison with exact evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import expm_multiply

from ..dynamics import rk4_path
from ..errors import TruncationTooTight
from ..functionals import PotentialPair
from ..grid import Field
from .basis import FockBasis, Truncated
from .operators import (
    FockOperator,
    WeylOperator,
    build_Hmf,
    build_LN,
    fiber_hamiltonian,
    japanese_operator,
    lattice_mass,
    number_operator,
    poisson_tail,
    truncation_for,
)

# Sign applied to the accumulated per-particle phase: the mean-field state is
# exp(1j * PHASE_SIGN * N * S) W V Omega. "corrected" (+1) is the sign for which
# the defect operator carries no constant term; "literal" (-1) is the opposite.
PHASE_SIGNS = {"corrected": +1.0, "literal": -1.0}


@dataclass(frozen=True, eq=False)
class MeanFieldWitness:
    """Lattice condensate trajectory and per-particle phase on a half-step grid.

    ``phis[i]`` and ``phases[i]`` are at time ``i * dt / 2``; ``dt`` is the
    step of the fluctuation propagator.
    """

    pot: PotentialPair
    k: float
    dt: float
    times: np.ndarray
    phis: np.ndarray
    phases: np.ndarray

    @property
    def grid(self):
        return self.pot.grid

    @property
    def steps(self) -> int:
        return (len(self.times) - 1) // 2

    def index(self, t: float) -> int:
        i = int(round(2.0 * t / self.dt))
        if abs(i * self.dt / 2 - t) > 1e-9 * max(1.0, t) or not 0 <= i < len(self.times):
            raise ValueError(f"time {t} is not on the witness grid")
        return i

    def phi(self, t: float) -> np.ndarray:
        return self.phis[self.index(t)]

    def phase(self, t: float) -> float:
        return float(self.phases[self.index(t)])


def mean_field_witness(phi0: np.ndarray, k: float, pot: PotentialPair, T: float, dt: float) -> MeanFieldWitness:
    """Integrate the lattice Hartree equation with RK4 at step ``dt / 2``."""
    grid = pot.grid
    f0 = Field(grid, np.asarray(phi0, dtype=complex))
    times, fields, phases = rk4_path(f0, k, pot, T, dt / 2.0, record_every=1)
    return MeanFieldWitness(pot, float(k), float(dt), times, np.array(fields), phases)


def propagate_V(witness: MeanFieldWitness, basis: FockBasis, t: float, state: np.ndarray | None = None,
                record: bool = False):
    """Apply the fluctuation flow from 0 to ``t`` by midpoint exponentials.

    Returns the final state, or the list of states at every step when
    ``record`` is set.
    """
    n = witness.index(t) // 2
    if 2 * n != witness.index(t):
        raise ValueError("t must be a whole number of propagator steps")
    psi = basis.vacuum() if state is None else np.asarray(state, dtype=complex)
    out = [psi]
    for i in range(n):
        phi_mid = witness.phis[2 * i + 1]
        H = build_Hmf(phi_mid, witness.k, witness.pot, basis)
        psi = expm_multiply(-1j * witness.dt * H.matrix, psi)
        if record:
            out.append(psi)
    return out if record else psi


def exact_evolve(H: FockOperator, state: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t H) state``."""
    if t == 0:
        return np.array(state, dtype=complex, copy=True)
    return expm_multiply(-1j * t * H.matrix, np.asarray(state, dtype=complex))


def fluctuation_basis(N: float, grid, mass_sq: float = 1.0, extra: int = 0) -> FockBasis:
    return FockBasis(grid, Truncated(truncation_for(N, mass_sq) + extra))


@dataclass(frozen=True)
class MeanFieldError:
    N: float
    t: float
    error: float
    overlap: float
    identity_gap: float
    n_max: int
    tail: float

    @property
    def error_from_overlap(self) -> float:
        return float(np.sqrt(max(2.0 * (1.0 - self.overlap), 0.0)))


def meanfield_errors(N: float, times, witness: MeanFieldWitness, basis: FockBasis | None = None,
                     phase: str = "corrected", normal_ordered: bool = True) -> list[MeanFieldError]:
    """Distance between exact and mean-field Fock states at several times.

    The exact state is ``exp(-i t H_N(k)) W[sqrt(N) phi_0] Omega`` and the
    mean-field state ``exp(i s N S(t)) W[sqrt(N) phi_t] V(t, 0) Omega`` with
    ``s`` chosen by ``phase``.
    """
    sign = PHASE_SIGNS[phase]
    grid = witness.grid
    phi0 = witness.phis[0]
    mass_sq = lattice_mass(grid, phi0)
    if basis is None:
        basis = fluctuation_basis(N, grid, mass_sq)
    H = fiber_hamiltonian(basis, witness.k, witness.pot, N=N, normal_ordered=normal_ordered)
    start = WeylOperator(basis, phi0, N).apply(basis.vacuum())
    times = sorted(float(t) for t in times)
    out = []
    V_states = propagate_V(witness, basis, times[-1], record=True)
    for t in times:
        exact = exact_evolve(H, start, t)
        n = witness.index(t) // 2
        v = V_states[n]
        mf = WeylOperator(basis, witness.phi(t), N).apply(v)
        mf = np.exp(1j * sign * N * witness.phase(t)) * mf
        err = float(np.linalg.norm(exact - mf))
        ov = float(np.vdot(exact, mf).real)
        gap = abs(err**2 - 2.0 * (1.0 - ov))
        out.append(MeanFieldError(N, t, err, ov, gap, basis.mode.n_max,
                                  poisson_tail(N * mass_sq, basis.mode.n_max)))
    return out


def meanfield_error(N: float, t: float, witness: MeanFieldWitness, **kw) -> MeanFieldError:
    return meanfield_errors(N, [t], witness, **kw)[0]


# ----------------------------------------------------------- growth series
@dataclass(frozen=True)
class GrowthSeries:
    times: np.ndarray
    ln_defect: np.ndarray          # sqrt(N) ||L_N V_t Omega||
    number: dict                   # alpha -> ||N_b^alpha V_t Omega||
    japanese: dict                 # alpha -> ||Q_b^alpha V_t Omega||
    norm_defect: float             # max | ||V_t Omega|| - 1 |


def growth_series(witness: MeanFieldWitness, basis: FockBasis, N: float, T: float,
                  every: int = 1) -> GrowthSeries:
    """Norm series of the fluctuation state used in the Gronwall-type bounds."""
    states = propagate_V(witness, basis, T, record=True)
    Nb = number_operator(basis).matrix
    Qb = japanese_operator(basis).matrix
    ts, ln, nb, qb, nd = [], [], {1: [], 2: []}, {1: [], 2: []}, 0.0
    for i in range(0, len(states), every):
        t = i * witness.dt
        psi = states[i]
        L = build_LN(witness.phis[2 * i], witness.k, witness.pot, N, basis)
        ts.append(t)
        ln.append(np.sqrt(N) * np.linalg.norm(L.matrix @ psi))
        a = Nb @ psi
        nb[1].append(np.linalg.norm(a))
        nb[2].append(np.linalg.norm(Nb @ a))
        q = Qb @ psi
        qb[1].append(np.linalg.norm(q))
        qb[2].append(np.linalg.norm(Qb @ q))
        nd = max(nd, abs(np.linalg.norm(psi) - 1.0))
    arr = lambda d: {a: np.array(v) for a, v in d.items()}
    return GrowthSeries(np.array(ts), np.array(ln), arr(nb), arr(qb), float(nd))


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares fit ``log y = log C0 + C1 t`` on a (possibly shifted) series."""

    C0: float
    C1: float
    max_rel_residual: float
    envelope_excess: float
    shift: float

    def passed(self, residual_tol: float = 0.30, envelope_tol: float = 0.10) -> bool:
        return self.C1 > 0 and self.max_rel_residual < residual_tol and self.envelope_excess <= envelope_tol


def fit_growth(t: np.ndarray, y: np.ndarray, shift: float = 0.0) -> GrowthFit:
    """Fit ``shift + y`` by ``C0 exp(C1 t)``.

    ``shift = 1`` is used for series that start at zero: the Gronwall
    bounds control ``1 + y``.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(y, dtype=float) + shift
    if np.any(z <= 0):
        raise ValueError("series must be positive after the shift for a log-linear fit")
    A = np.vstack([np.ones_like(t), t]).T
    (c, C1), *_ = np.linalg.lstsq(A, np.log(z), rcond=None)
    fit = np.exp(c + C1 * t)
    rel = np.abs(z - fit) / fit
    excess = float(np.max(z / fit) - 1.0)
    return GrowthFit(float(np.exp(c)), float(C1), float(np.max(rel)), max(excess, 0.0), shift)


def truncation_check(N: float, mass_sq: float, n_max: int) -> None:
    tail = poisson_tail(N * mass_sq, n_max)
    if tail >= 1e-8:
        raise TruncationTooTight(f"Poisson tail {tail:.2e} above n_max = {n_max}")
