import numpy as np
import pytest
from hypothesis import given, strategies as st

from tracer_hartree.errors import GridMismatch, NotNormalized
from tracer_hartree.functionals import (
    PotentialPair,
    as_momentum,
    boosted_action,
    chemical_potential,
    current,
    energy_E0,
    energy_Ek,
    energy_Ek_expanded,
    hartree_action,
    interaction_integral,
    kinetic_energy,
    mass,
    phase_integrand,
    stationary_residual_0,
)
from tracer_hartree.grid import Field, Grid
from tracer_hartree.ground_state import boost
from tracer_hartree.potentials import PotentialSpec, cosine, gaussian, gaussian_well, make_potentials, zero

seeds = st.integers(0, 2**32 - 1)


def smooth_random(grid, rng, modes=4):
    """Unit-mass field with a few low Fourier modes."""
    coeff = np.zeros(grid.shape, dtype=complex)
    idx = rng.integers(-modes, modes + 1, size=(6, grid.dim))
    for i in idx:
        coeff[tuple(i)] += rng.standard_normal() + 1j * rng.standard_normal()
    coeff[(0,) * grid.dim] += 1.0
    return Field(grid, grid.ifft(coeff)).normalized()


@pytest.fixture(scope="module")
def setup():
    g = Grid(1, 64, 4 * np.pi)
    pot = make_potentials(g, gaussian_well(2.0, 1.0), gaussian(1.0, 0.8), 0.7)
    return g, pot


def test_as_momentum():
    np.testing.assert_array_equal(as_momentum(1.5, 3), [1.5, 0, 0])
    np.testing.assert_array_equal(as_momentum([1, 2], 2), [1, 2])
    with pytest.raises(ValueError):
        as_momentum([1, 2], 3)
    with pytest.raises(ValueError):
        as_momentum(np.nan, 1)


def test_potential_pair_validation():
    g = Grid(1, 16, 4.0)
    w = Field.constant(g, 0.0)
    x = g.displacement()[0]
    with pytest.raises(ValueError):
        PotentialPair(w, Field(g, np.exp(-(x - 0.5) ** 2)), 1.0)
    with pytest.raises(ValueError):
        PotentialPair(w, Field(g, np.exp(-x**2)), -1.0)
    with pytest.raises(GridMismatch):
        PotentialPair(Field.constant(Grid(1, 16, 5.0), 0.0), Field(g, np.exp(-x**2)), 1.0)
    with pytest.raises(ValueError):
        PotentialSpec("morse", {})
    with pytest.raises(ValueError):
        gaussian(1.0, 0.0)


def test_potential_families():
    g = Grid(1, 32, 2 * np.pi)
    c = cosine(0.5, [1, 2]).sample(g, [0.0]).values.real
    x = g.axes[0]
    np.testing.assert_allclose(c, 0.5 * np.cos(x) + 0.5 * np.cos(2 * x), atol=1e-13)
    assert np.all(zero().sample(g).values == 0)
    w = gaussian_well(3.0, 1.0).sample(g)
    assert w.values.real.min() == pytest.approx(-3.0)
    spec = gaussian(2.0, 0.3)
    assert PotentialSpec.from_dict(spec.to_dict()) == spec


def test_plane_wave_observables():
    g = Grid(1, 64, 2 * np.pi)
    for kappa in (-3, 1, 5):
        f = Field(g, np.exp(1j * kappa * g.axes[0])).normalized()
        assert current(f)[0] == pytest.approx(-kappa, abs=1e-12)
        assert kinetic_energy(f) == pytest.approx(0.5 * kappa**2, abs=1e-11)


def test_interaction_matches_brute_force_double_sum():
    g = Grid(1, 32, 6.0)
    rng = np.random.default_rng(11)
    phi = Field(g, rng.standard_normal(32) + 1j * rng.standard_normal(32)).normalized()
    width = 0.9
    pot = make_potentials(g, zero(), gaussian(1.3, width), 1.0)
    x = g.axes[0]
    L, dx = g.length[0], g.cell_volume
    d = (x[:, None] - x[None, :] + L / 2) % L - L / 2
    vmat = 1.3 * np.exp(-d**2 / (2 * width**2))
    rho = np.abs(phi.values) ** 2
    brute = float(rho @ vmat @ rho) * dx * dx
    assert interaction_integral(phi, pot) == pytest.approx(brute, rel=1e-12)


def test_energy_of_constant_state_closed_form():
    g = Grid(2, 16, [3.0, 5.0])
    pot = make_potentials(g, cosine(0.4, [1]), gaussian(1.0, 0.5), 0.6)
    f = Field.constant(g, 1.0).normalized()
    vint = np.sum(pot.v.values.real) * g.cell_volume
    expected = 0.0 + 0.0 + 0.5 * 0.6 * vint / g.volume
    assert energy_E0(f, pot) == pytest.approx(expected, rel=1e-12)


@given(seeds, st.floats(-2.0, 2.0))
def test_energy_expansions_agree(seed, k):
    g = Grid(1, 32, 2 * np.pi)
    pot = make_potentials(g, gaussian_well(1.0, 1.0), gaussian(1.0, 1.0), 0.5)
    phi = smooth_random(g, np.random.default_rng(seed))
    assert energy_Ek(phi, k, pot) == pytest.approx(energy_Ek_expanded(phi, k, pot), abs=1e-11)
    direct = phase_integrand(phi, k, pot)
    j = current(phi)[0]
    assert direct == pytest.approx(-0.5 * k * k + 0.5 * j * j + 0.5 * pot.lam * interaction_integral(phi, pot))


@given(seed=seeds, theta=st.floats(0.0, 2 * np.pi))
def test_global_phase_invariance(setup, seed, theta):
    g, pot = setup
    phi = smooth_random(g, np.random.default_rng(seed))
    rot = phi * np.exp(1j * theta)
    assert energy_Ek(rot, 0.7, pot) == pytest.approx(energy_Ek(phi, 0.7, pot), abs=1e-11)
    np.testing.assert_allclose(current(rot), current(phi), atol=1e-12)


@given(seeds, st.integers(-3, 3))
def test_boost_shifts_current(seed, m):
    g = Grid(1, 64, 4 * np.pi)
    k = m * 2 * (2 * np.pi / g.length[0])
    phi = smooth_random(g, np.random.default_rng(seed))
    shifted = current(boost(phi, k))
    assert shifted[0] == pytest.approx(current(phi)[0] + k / 2, abs=1e-10)
    assert mass(boost(phi, k)) == pytest.approx(mass(phi), abs=1e-13)


@given(seeds)
def test_translation_invariance_without_external_potential(seed):
    g = Grid(1, 32, 5.0)
    pot = make_potentials(g, zero(), gaussian(1.0, 0.7), 1.1)
    phi = smooth_random(g, np.random.default_rng(seed))
    moved = Field(g, np.roll(phi.values, 7))
    assert energy_E0(moved, pot) == pytest.approx(energy_E0(phi, pot), abs=1e-12)


@given(seeds, seeds)
def test_actions_are_energy_gradients(seed1, seed2):
    g = Grid(1, 32, 2 * np.pi)
    pot = make_potentials(g, gaussian_well(1.0, 1.0), gaussian(1.0, 1.0), 0.9)
    phi = smooth_random(g, np.random.default_rng(seed1))
    eta = smooth_random(g, np.random.default_rng(seed2))
    k, h = 0.8, 1e-5
    for energy, action in ((lambda f: energy_E0(f, pot), hartree_action(phi.values, pot)),
                           (lambda f: energy_Ek(f, k, pot), boosted_action(phi.values, np.array([k]), pot))):
        fd = (energy(phi + eta * h) - energy(phi - eta * h)) / (2 * h)
        analytic = 2 * np.real(np.vdot(eta.values, action)) * g.cell_volume
        assert fd == pytest.approx(analytic, rel=1e-6, abs=1e-8)


def test_chemical_potential_and_residual_for_free_plane_wave():
    g = Grid(1, 32, 2 * np.pi)
    pot = make_potentials(g, zero(), zero(), 0.0)
    f = Field(g, np.exp(2j * g.axes[0])).normalized()
    assert chemical_potential(f, pot) == pytest.approx(2.0)
    assert stationary_residual_0(f, 2.0, pot) < 1e-12
    with pytest.raises(NotNormalized):
        stationary_residual_0(f * 2.0, 2.0, pot)
