import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tracer_hartree.errors import DegenerateStart, NoConvergence, NotApplicable
from tracer_hartree.functionals import (
    chemical_potential,
    current,
    energy_E0,
    energy_Ek,
    stationary_residual_k,
)
from tracer_hartree.grid import Field, Grid
from tracer_hartree.ground_state import (
    GroundStateOptions,
    boost,
    c1_norm,
    dense_hamiltonian,
    gaussian_guess,
    h3_bound_check,
    imaginary_part_defect,
    minimize_Q0,
    minimize_Qk,
    verify_boost_shift,
)
from tracer_hartree.potentials import gaussian, gaussian_well, make_potentials, zero


@pytest.fixture(scope="module")
def q0_1d():
    g = Grid(1, 128, 8 * np.pi)
    pot = make_potentials(g, gaussian_well(3.0, 1.5), gaussian(1.0, 1.0), 0.5)
    return pot, minimize_Q0(pot)


def test_linear_case_matches_dense_eigensolver():
    g = Grid(1, 64, 4 * np.pi)
    pot = make_potentials(g, gaussian_well(2.0, 1.0), zero(), 0.0)
    res = minimize_Q0(pot, opts=GroundStateOptions(tol=1e-11))
    evals, evecs = np.linalg.eigh(dense_hamiltonian(pot))
    assert res.mu == pytest.approx(evals[0], abs=1e-10)
    ref = evecs[:, 0] * np.sign(evecs[np.argmax(np.abs(evecs[:, 0])), 0])
    ref = ref / np.sqrt(np.sum(np.abs(ref) ** 2) * g.cell_volume)
    assert np.max(np.abs(res.Q.values - ref)) < 1e-8


def test_minimizer_properties(q0_1d):
    pot, r = q0_1d
    assert r.residual < 1e-10
    assert r.mu < 0
    assert imaginary_part_defect(r.Q) < 1e-10
    assert abs(current(r.Q)[0]) < 1e-12
    assert np.all(np.diff(r.energy_history) <= 1e-12)
    # Independent check of the multiplier against the Rayleigh quotient.
    assert chemical_potential(r.Q, pot) == pytest.approx(r.mu, abs=1e-12)


def test_minimizer_beats_perturbations(q0_1d):
    pot, r = q0_1d
    rng = np.random.default_rng(5)
    for _ in range(5):
        eta = rng.standard_normal(pot.grid.shape) * 1e-3
        trial = Field(pot.grid, r.Q.values + eta).normalized()
        assert energy_E0(trial, pot) >= r.energy - 1e-13


def test_energy_identity_over_boosts(q0_1d):
    pot, r = q0_1d
    for k in (0.5, 1.0, 2.0):
        rep = verify_boost_shift(r, k, pot)
        assert abs(rep.energy_gap) < 1e-10
        assert rep.expected_delta_mu == pytest.approx(k * k / 4)


def test_boosted_state_is_stationary_for_boosted_functional(q0_1d):
    pot, r = q0_1d
    for k in (0.5, 1.0, 2.0):
        Qk = boost(r.Q, k)
        mu_k = chemical_potential(Qk, pot, [k])
        assert stationary_residual_k(Qk, mu_k, [k], pot) < 1e-9


def test_two_minimization_routes_agree(q0_1d):
    pot, r = q0_1d
    k = 1.0
    rk = minimize_Qk(pot, k, GroundStateOptions(tol=1e-10))
    assert rk.energy == pytest.approx(energy_Ek(boost(r.Q, k), k, pot), abs=1e-9)
    assert rk.mu == pytest.approx(chemical_potential(boost(r.Q, k), pot, [k]), abs=1e-8)


def test_three_dimensional_minimizer():
    g = Grid(3, 32, 4 * np.pi)
    pot = make_potentials(g, gaussian_well(3.0, 1.5), gaussian(1.0, 1.0), 0.5)
    r = minimize_Q0(pot, opts=GroundStateOptions(tol=1e-9))
    assert r.residual < 1e-9
    # k/2 must be a lattice momentum so the boosted state stays periodic.
    k = [1.0, 0.0, 1.0]
    gap = energy_Ek(boost(r.Q, k), k, pot) - 0.25 * 2.0 - energy_E0(r.Q, pot)
    assert abs(gap) < 1e-9


def test_h3_bound_holds_and_rejects_positive_mu(q0_1d):
    pot, r = q0_1d
    rep = h3_bound_check(r, pot)
    assert rep.passed and rep.slack > 0
    g = pot.grid
    free = make_potentials(g, zero(), gaussian(1.0, 1.0), 0.5)
    rf = minimize_Q0(free)
    assert rf.mu > 0
    with pytest.raises(NotApplicable):
        h3_bound_check(rf, free)


def test_c1_norm_of_cosine():
    g = Grid(1, 64, 2 * np.pi)
    f = Field(g, np.cos(g.axes[0]))
    assert c1_norm(f) == pytest.approx(2.0, abs=1e-3)


def test_failure_modes():
    g = Grid(1, 32, 2 * np.pi)
    pot = make_potentials(g, gaussian_well(1.0, 1.0), zero(), 0.0)
    with pytest.raises(DegenerateStart):
        minimize_Q0(pot, start=Field.constant(g, 0.0))
    with pytest.raises(NoConvergence) as info:
        minimize_Q0(pot, opts=GroundStateOptions(max_iter=2, tol=1e-14))
    assert info.value.last_residual is not None
    with pytest.raises(ValueError):
        minimize_Q0(pot, grid=Grid(1, 16, 1.0))


@settings(max_examples=15)
@given(st.floats(0.0, 2 * np.pi), st.integers(0, 2**16))
def test_imaginary_defect_removes_global_phase(theta, seed):
    g = Grid(1, 32, 5.0)
    real = np.random.default_rng(seed).standard_normal(32)
    assert imaginary_part_defect(Field(g, np.exp(1j * theta) * real)) < 1e-12


def test_gaussian_guess_normalized():
    g = Grid(2, 16, 6.0)
    f = gaussian_guess(g)
    assert np.sum(np.abs(f.values) ** 2) * g.cell_volume == pytest.approx(1.0)
