import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tracer_hartree.dynamics import (
    BlowupDetected,
    DynState,
    boundary_mass,
    ehrenfest_residual,
    evolve,
    gauge_check,
    gauge_map_to_phi,
    gauge_map_to_psi,
    pair_force,
    rk4_path,
    tracer_force,
    y_norm_report,
)
from tracer_hartree.errors import NotNormalized
from tracer_hartree.functionals import current
from tracer_hartree.grid import Field, Grid
from tracer_hartree.ground_state import boost, minimize_Q0
from tracer_hartree.potentials import gaussian, gaussian_well, make_potentials, zero


def packet(grid, width=1.5, offset=0.0, kick=0):
    x = grid.displacement(grid.center)[0] - offset
    return Field(grid, np.exp(-x**2 / (2 * width**2) + 1j * kick * grid.axes[0])).normalized()


@pytest.fixture(scope="module")
def world():
    g = Grid(1, 128, 8 * np.pi)
    pot = make_potentials(g, gaussian_well(1.0, 1.5), gaussian(1.0, 1.0), 0.5)
    return g, pot


def test_free_evolution_matches_exact_propagator():
    g = Grid(1, 64, 4 * np.pi)
    pot = make_potentials(g, zero(), zero(), 0.0)
    psi0 = packet(g, kick=1)
    T = 0.5
    states, diag = evolve(psi0, 0.3, pot, T, 0.01, sample_every=50)
    exact = g.ifft(np.exp(-0.5j * T * g.kappa_sq) * g.fft(psi0.values))
    assert np.max(np.abs(states[-1].psi.values - exact)) < 1e-12
    j = current(psi0)[0]
    assert states[-1].X[0] == pytest.approx((0.3 - j) * T, abs=1e-12)


def test_conservation_and_v_term(world):
    g, pot = world
    _, diag = evolve(packet(g, offset=1.0), 0.5, pot, 0.5, 0.005, sample_every=10)
    assert diag.mass_drift_rate() < 1e-12
    assert diag.energy_drift_rate() < 1e-5
    assert ehrenfest_residual(diag).max_v_term < 1e-12


def test_strang_is_second_order(world):
    g, pot = world
    psi0 = packet(g, offset=1.0)
    finals = [evolve(psi0, 0.5, pot, 0.4, dt, sample_every=10**6)[0][-1] for dt in (0.02, 0.01, 0.005)]
    d1 = (finals[0].psi - finals[1].psi).norm()
    d2 = (finals[1].psi - finals[2].psi).norm()
    assert np.log2(d1 / d2) == pytest.approx(2.0, abs=0.1)


def test_ehrenfest_residual_shrinks_with_dt(world):
    g, pot = world
    psi0 = packet(g, offset=1.0)
    res = []
    for dt in (0.02, 0.01):
        _, diag = evolve(psi0, 0.5, pot, 0.4, dt, sample_every=1)
        res.append(ehrenfest_residual(diag).max_residual)
    assert res[1] < res[0] / 3


def test_stationary_state_moves_rigidly(world):
    g, pot = world
    r = minimize_Q0(pot)
    k = 1.0
    states, diag = evolve(boost(r.Q, k), k, pot, 0.5, 0.005, sample_every=20)
    X = np.array(diag.X)[:, 0]
    np.testing.assert_allclose(X, 0.5 * k * np.array(diag.t), atol=1e-9)
    prof = np.abs(gauge_map_to_phi(states[-1]).values)
    assert np.sqrt(np.sum((prof - np.abs(r.Q.values)) ** 2) * g.cell_volume) < 1e-6


def test_gauge_equivalence(world):
    g, pot = world
    chk = gauge_check(packet(g, offset=1.0, kick=1), 1.0, pot, 0.2, 0.001)
    assert chk.discrepancy < 1e-6
    assert chk.passed()


@settings(max_examples=20)
@given(st.floats(-5, 5), st.integers(0, 2**16))
def test_gauge_maps_are_inverse(shift, seed):
    g = Grid(1, 32, 2 * np.pi)
    rng = np.random.default_rng(seed)
    phi = Field(g, g.ifft(np.where(np.abs(g.kappa[0]) < 8, rng.standard_normal(32), 0)))
    state = DynState(0.0, gauge_map_to_psi(phi, [shift]), np.array([shift]), 0.0, np.zeros(1),
                     make_potentials(g, zero(), zero(), 0.0))
    np.testing.assert_allclose(gauge_map_to_phi(state).values, phi.values, atol=1e-12)


@settings(max_examples=20)
@given(st.integers(0, 2**16))
def test_pair_force_vanishes_for_even_v(seed):
    g = Grid(1, 64, 10.0)
    pot = make_potentials(g, zero(), gaussian(1.0, 0.7), 2.0)
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    assert abs(pair_force(psi, pot)[0]) < 1e-11 * np.sum(np.abs(psi) ** 2) ** 2


def test_tracer_force_direction(world):
    g, pot = world
    # Against the analytic derivative of the well: -integral w'(x + X) |psi|^2.
    right = packet(g, width=0.8, offset=1.0).values
    X = 0.3
    d = g.displacement(g.center)[0] + X
    wprime = 1.0 * d / 1.5**2 * np.exp(-d**2 / (2 * 1.5**2))
    expected = -np.sum(wprime * np.abs(right) ** 2) * g.cell_volume
    assert tracer_force(right, [X], pot)[0] == pytest.approx(expected, rel=1e-10)
    assert expected < 0
    uniform = np.full(g.shape, 1 / np.sqrt(g.volume), dtype=complex)
    assert abs(tracer_force(uniform, [0.3], pot)[0]) < 1e-12


def test_rk4_is_fourth_order(world):
    g, pot = world
    phi0 = packet(g, offset=1.0)
    ends = [rk4_path(phi0, 0.5, pot, 0.2, dt)[1][-1] for dt in (0.004, 0.002, 0.001)]
    d1 = np.linalg.norm(ends[0] - ends[1])
    d2 = np.linalg.norm(ends[1] - ends[2])
    assert np.log2(d1 / d2) > 3.5


def test_y_norm_report_hypothesis_gate():
    g = Grid(1, 128, 8 * np.pi)
    small = make_potentials(g, gaussian_well(0.1, 1.0), gaussian(1.0, 1.0), 0.05)
    _, diag = evolve(packet(g), 0.2, small, 0.2, 0.01, sample_every=5)
    rep = y_norm_report(diag, 0.2, small)
    assert rep.hypothesis_met and rep.passed
    big = make_potentials(g, gaussian_well(3.0, 1.5), gaussian(1.0, 1.0), 0.5)
    rep_big = y_norm_report(diag, 0.2, big)
    assert not rep_big.hypothesis_met and rep_big.passed is None and rep_big.bound_rhs is None


def test_boundary_mass_detects_edges():
    g = Grid(1, 64, 10.0)
    assert boundary_mass(packet(g, width=0.5).values, g) < 1e-12
    edge = np.zeros(64, dtype=complex)
    edge[0] = 1 / np.sqrt(g.cell_volume)
    assert boundary_mass(edge, g) == pytest.approx(1.0)


def test_input_errors(world):
    g, pot = world
    with pytest.raises(NotNormalized):
        evolve(packet(g) * 2.0, 0.0, pot, 0.1, 0.01)
    with pytest.raises(ValueError):
        evolve(packet(g), 0.0, pot, 0.105, 0.01)
    _, diag = evolve(packet(g), 0.0, pot, 0.02, 0.01, sample_every=1)
    diag.t[1] += 1e-3
    with pytest.raises(ValueError):
        ehrenfest_residual(diag)
    with pytest.raises(BlowupDetected):
        DynState(0.0, packet(g), np.array([np.nan]), 0.0, np.zeros(1), pot)
