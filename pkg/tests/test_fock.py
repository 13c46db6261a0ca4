import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from tracer_hartree.errors import BudgetExceeded, OffLatticeMomentum, TruncationTooTight
from tracer_hartree.fock import (
    FixedN,
    FockBasis,
    Truncated,
    WeylOperator,
    basis_dimension,
    boost_transform_check,
    build_HHar,
    build_Hcor,
    build_Hmf,
    build_HN_k,
    build_LN,
    ccr_defect,
    fiber_hamiltonian,
    fit_growth,
    ground_energy_EN,
    hartree_product_energy,
    lattice_operators,
    lowest_eigenvalues,
    mean_field_witness,
    meanfield_errors,
    momentum_operator,
    number_operator,
    product_energy_direct,
    product_state,
    truncation_for,
)
from tracer_hartree.fock import spectra
from tracer_hartree.fock.operators import poisson_tail
from tracer_hartree.grid import Grid
from tracer_hartree.potentials import gaussian, gaussian_well, make_potentials, zero

LAT = Grid.lattice(4, 2 * np.pi)


def pot_for(grid, lam=0.8, depth=1.0):
    return make_potentials(grid, gaussian_well(depth, 1.0), gaussian(1.0, 1.0), lam)


def unit(grid, vals):
    vals = np.asarray(vals, dtype=complex)
    return vals / np.sqrt(np.sum(np.abs(vals) ** 2) * grid.spacing[0])


def nyquist_free(grid, seed):
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    coeff[grid.n // 2] = 0.0
    return unit(grid, grid.ifft(coeff))


# ----------------------------------------------------------------- basis
@pytest.mark.parametrize("sites,mode", [(3, FixedN(4)), (4, Truncated(3)), (5, FixedN(0))])
def test_basis_dimension_and_indexing(sites, mode):
    b = FockBasis(Grid.lattice(sites, 1.0), mode)
    assert b.dim == basis_dimension(sites, mode)
    if isinstance(mode, FixedN):
        assert b.dim == math.comb(mode.n + sites - 1, sites - 1)
    for i in range(b.dim):
        assert b.index(b.states[i]) == i
    assert b.lookup(np.full((1, sites), 99))[0] == -1


def test_truncated_vacuum_first_and_budget():
    b = FockBasis(LAT, Truncated(2))
    assert b.vacuum()[0] == 1
    with pytest.raises(BudgetExceeded):
        FockBasis(Grid.lattice(8, 1.0), Truncated(30), budget=1000)
    with pytest.raises(TypeError):
        FockBasis(LAT, FixedN(2)).annihilate(0)


@pytest.mark.parametrize("mode", [Truncated(3), FixedN(2), FixedN(0)])
def test_canonical_commutation(mode):
    assert ccr_defect(FockBasis(Grid.lattice(3, 2.0), mode)) < 1e-12


# ------------------------------------------------------------- operators
def test_lattice_operator_symbols():
    ops = lattice_operators(LAT)
    for m in (-1, 0, 1):
        e = np.exp(1j * m * LAT.axes[0])
        np.testing.assert_allclose(ops.momentum @ e, -m * e, atol=1e-12)
        np.testing.assert_allclose(ops.kinetic @ e, 0.5 * m * m * e, atol=1e-12)
    nyq = np.exp(2j * LAT.axes[0])
    np.testing.assert_allclose(ops.momentum @ nyq, 0, atol=1e-12)
    np.testing.assert_allclose(ops.kinetic @ nyq, 2 * nyq, atol=1e-12)


def test_single_particle_sector_matches_first_quantized():
    b = FockBasis(LAT, FixedN(1))
    pot = pot_for(LAT)
    ops = lattice_operators(LAT)
    k = 2.0
    h1 = 0.5 * (k * np.eye(4) - ops.momentum) @ (k * np.eye(4) - ops.momentum) + ops.kinetic \
        + np.diag(pot.w.values.real)
    perm = [b.index(np.eye(4, dtype=int)[x]) for x in range(4)]
    H = build_HN_k(b, k, pot).toarray()
    np.testing.assert_allclose(H[np.ix_(perm, perm)], h1, atol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_free_ground_energy(N):
    b = FockBasis(LAT, FixedN(N))
    free = make_potentials(LAT, zero(), zero(), 0.0)
    for k in (0.0, 2.0):
        assert ground_energy_EN(build_HN_k(b, k, free)) == pytest.approx(N * k * k / 4, abs=1e-10)


def test_fiber_hamiltonian_conserves_number():
    b = FockBasis(LAT, Truncated(4))
    pot = pot_for(LAT)
    H = fiber_hamiltonian(b, 1.0, pot, N=3)
    Nb = number_operator(b)
    assert H.commutator(Nb).max_norm() < 1e-12
    assert H.hermitian


def test_fiber_hamiltonian_rejects_off_lattice():
    b = FockBasis(LAT, FixedN(2))
    with pytest.raises(OffLatticeMomentum):
        build_HN_k(b, 1.0, pot_for(LAT))
    with pytest.raises(OffLatticeMomentum):
        fiber_hamiltonian(FockBasis(LAT, Truncated(2)), 0.5, pot_for(LAT), N=2)


def test_correlation_generator_changes_number():
    b = FockBasis(LAT, Truncated(4))
    pot = pot_for(LAT)
    phi = nyquist_free(LAT, 0)
    Hc = build_Hcor(b, phi, pot)
    Hh = build_HHar(b, phi, 1.0, pot)
    Nb = number_operator(b)
    assert Hc.commutator(Nb).max_norm() > 1e-3
    assert Hh.commutator(Nb).max_norm() < 1e-12
    assert build_Hmf(phi, 1.0, pot, b).hermitian


@settings(max_examples=10)
@given(st.integers(0, 2**16), st.integers(1, 3), st.sampled_from([0.0, 2.0]))
def test_product_state_energy_closed_form(seed, N, k):
    b = FockBasis(LAT, FixedN(N))
    pot = pot_for(LAT)
    phi = unit(LAT, np.random.default_rng(seed).standard_normal(4) + 1j * np.random.default_rng(seed + 1).standard_normal(4))
    psi = product_state(b, phi)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    assert product_energy_direct(b, phi, k, pot) == pytest.approx(hartree_product_energy(phi, N, k, pot), abs=1e-10)


def test_lanczos_agrees_with_dense(monkeypatch):
    b = FockBasis(LAT, FixedN(3))
    H = build_HN_k(b, 2.0, pot_for(LAT))
    dense = lowest_eigenvalues(H, 3)
    monkeypatch.setattr(spectra, "DENSE_LIMIT", 5)
    np.testing.assert_allclose(lowest_eigenvalues(H, 3), dense, atol=1e-9)


def test_boost_identity_on_unwrapped_modes():
    b = FockBasis(LAT, FixedN(2))
    rep = boost_transform_check(b, 2.0, pot_for(LAT))
    assert rep.compatible_corrected < 1e-12
    assert rep.potential_commutes < 1e-12
    assert rep.momentum_basis_consistency < 1e-10
    rep0 = boost_transform_check(b, 0.0, pot_for(LAT))
    assert rep0.corrected < 1e-12


# ------------------------------------------------------------------ Weyl
def test_truncation_rule_and_tail():
    assert truncation_for(4.0) == math.ceil(4 + 12 + 10)
    assert poisson_tail(4.0, truncation_for(4.0)) < 1e-8
    assert poisson_tail(0.0, 3) == 0.0


@pytest.mark.parametrize("N", [1.0, 2.0])
def test_weyl_coherent_identities(N):
    grid = Grid.lattice(3, 2 * np.pi)
    b = FockBasis(grid, Truncated(truncation_for(N)))
    phi = nyquist_free(grid, 3) if grid.n % 2 == 0 else unit(grid, [1.0, 0.5j, -0.3])
    W = WeylOperator(b, phi, N)
    coh = W.apply(b.vacuum())
    assert abs(np.vdot(b.vacuum(), coh) - np.exp(-N / 2)) < 1e-8
    assert abs(number_operator(b).expectation(coh).real - N) < 1e-8
    back = W.apply_adjoint(coh)
    assert np.linalg.norm(back - b.vacuum()) < 1e-10
    assert abs(np.linalg.norm(coh) - 1.0) < 1e-12
    assert W.top_sector_weight() < 1e-8


def test_weyl_is_unitary_on_retained_space():
    b = FockBasis(Grid.lattice(2, 2 * np.pi), Truncated(6))
    assert WeylOperator(b, unit(b.grid, [0.3, 0.2j]), 0.1).unitarity_defect() < 1e-12


def test_weyl_rejects_tight_truncation():
    b = FockBasis(Grid.lattice(3, 2 * np.pi), Truncated(3))
    with pytest.raises(TruncationTooTight):
        WeylOperator(b, unit(b.grid, [1.0, 1.0, 1.0]), 4.0)


def test_coherent_state_annihilation_eigenvector():
    # a(f) W Omega = sqrt(N) <f, phi> W Omega away from the truncation edge.
    grid = Grid.lattice(3, 2 * np.pi)
    N = 1.5
    b = FockBasis(grid, Truncated(truncation_for(N) + 4))
    phi = unit(grid, [0.7, -0.2 + 0.4j, 0.5])
    coh = WeylOperator(b, phi, N).apply(b.vacuum())
    from tracer_hartree.fock.operators import annihilation_field

    f = unit(grid, [0.1, 1.0, -0.5j])
    lhs = annihilation_field(b, f) @ coh
    dx = grid.spacing[0]
    rhs = np.sqrt(N) * np.vdot(f, phi) * dx * coh
    assert np.linalg.norm(lhs - rhs) < 1e-7


# ---------------------------------------------------------- mean field
def test_defect_operator_on_vacuum():
    pot = pot_for(LAT, lam=0.5)
    b = FockBasis(LAT, Truncated(3))
    for seed in range(3):
        phi = nyquist_free(LAT, seed)
        for N in (1.0, 4.0):
            L = build_LN(phi, 1.0, pot, N, b)
            lhs = 2 * np.sqrt(N) * np.linalg.norm(L.matrix @ b.vacuum())
            lap = LAT.ifft(-LAT.kappa_sq * LAT.fft(phi))
            rhs = np.sqrt(np.sum(np.abs(lap) ** 2) * LAT.spacing[0])
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_meanfield_errors_small_start_and_identity():
    grid = Grid.lattice(2, 2 * np.pi)
    pot = make_potentials(grid, gaussian_well(1.0, 1.0), gaussian(1.0, 1.0), 1.0)
    phi0 = unit(grid, [1.0, 0.6])
    wit = mean_field_witness(phi0, 0.0, pot, 0.2, 1e-3)
    errs = meanfield_errors(2.0, [0.0, 0.1, 0.2], wit)
    assert errs[0].error < 1e-8
    assert all(e.identity_gap < 1e-10 for e in errs)
    assert errs[-1].error > errs[0].error
    literal = meanfield_errors(2.0, [0.2], wit, phase="literal")
    assert literal[0].error > errs[-1].error


def test_fit_growth_exact_exponential():
    t = np.linspace(0, 1, 11)
    fit = fit_growth(t, 2.0 * np.exp(0.7 * t))
    assert fit.C1 == pytest.approx(0.7) and fit.C0 == pytest.approx(2.0)
    assert fit.max_rel_residual < 1e-12 and fit.passed()
    shifted = fit_growth(t, np.exp(0.3 * t) - 1, shift=1.0)
    assert shifted.C1 == pytest.approx(0.3)
    with pytest.raises(ValueError):
        fit_growth(t, -np.ones_like(t))


def test_momentum_operator_total_momentum():
    b = FockBasis(LAT, FixedN(2))
    P = momentum_operator(b)
    phi = unit(LAT, np.exp(1j * LAT.axes[0]))
    psi = product_state(b, phi)
    assert P.expectation(psi).real == pytest.approx(-2.0, abs=1e-12)
    assert isinstance(P.matrix, sp.csr_matrix)
