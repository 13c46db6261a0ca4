"""Ground-state energies of the fiber Hamiltonian, product-state bounds and the boost check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from ..errors import NoConvergence
from ..functionals import PotentialPair
from .basis import FixedN, FockBasis
from .operators import (
    FockOperator,
    build_HN_k,
    external_operator,
    interaction_operator,
    lattice_operators,
    momentum_operator,
)

DENSE_LIMIT = 2000


def lowest_eigenvalues(H: FockOperator, count: int = 1, tol: float = 1e-9) -> np.ndarray:
    """Lowest ``count`` eigenvalues; dense below dimension 2000, Lanczos above.

    The Lanczos start vector is the normalized all-ones vector, and every
    returned pair is checked to have residual ``||H v - e v|| < tol``.
    """
    dim = H.basis.dim
    if dim <= DENSE_LIMIT:
        return la.eigvalsh(H.toarray(), subset_by_index=[0, min(count, dim) - 1])
    v0 = np.ones(dim, dtype=complex) / np.sqrt(dim)
    try:
        vals, vecs = eigsh(H.matrix, k=count, which="SA", v0=v0, tol=1e-13, maxiter=20000)
    except ArpackNoConvergence as exc:
        raise NoConvergence(f"Lanczos did not converge: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    for e, v in zip(vals, vecs.T):
        r = np.linalg.norm(H.matrix @ v - e * v)
        if r > tol:
            raise NoConvergence(f"Lanczos residual {r:.2e} above {tol:.0e}")
    return vals


def ground_energy_EN(H: FockOperator) -> float:
    """Lowest eigenvalue of a hermitian Fock operator."""
    if not H.hermitian:
        raise ValueError("ground_energy_EN expects a hermitian operator")
    return float(lowest_eigenvalues(H, 1)[0])


def product_state(basis: FockBasis, phi: np.ndarray) -> np.ndarray:
    """``(a^+(phi))^N Omega / sqrt(N!)`` on an ``N``-particle sector."""
    if not isinstance(basis.mode, FixedN):
        raise TypeError("product states live on a FixedN basis")
    c = np.sqrt(basis.dx) * np.asarray(phi, dtype=complex)
    occ = basis.states
    N = basis.mode.n
    from scipy.special import gammaln

    logmult = gammaln(N + 1) - np.sum(gammaln(occ + 1), axis=1)
    amp = np.exp(0.5 * logmult) * np.prod(np.where(occ > 0, c[None, :] ** occ, 1.0), axis=1)
    return amp


def hartree_product_energy(phi: np.ndarray, N: int, k: float, pot: PotentialPair) -> float:
    """Energy of the symmetric product state built from unit-mass ``phi``.

    Closed form on the lattice with ``j = <phi, p phi>``::

        N [ (k - j)^2/2 + <phi, t phi> + sum w |phi|^2 + ((N-1)/N) (lam/2) sum sum |phi|^2 v |phi|^2 ]
          + (<phi, p^2 phi> - j^2) / 2

    The last term is the ``<P_b^2>/2N`` correction beyond the Hartree energy.
    """
    grid = pot.grid
    dx = grid.spacing[0]
    ops = lattice_operators(grid)
    phi = np.asarray(phi, dtype=complex)
    j = float(np.vdot(phi, ops.momentum @ phi).real * dx)
    p2 = float(np.vdot(phi, ops.momentum_sq @ phi).real * dx)
    kin = float(np.vdot(phi, ops.kinetic @ phi).real * dx)
    rho = np.abs(phi) ** 2
    ext = float(np.sum(pot.w.values.real * rho) * dx)
    quart = float(np.sum(rho * pot.hartree_potential(rho).real) * dx)  # includes lam
    return N * (0.5 * (k - j) ** 2 + kin + ext + 0.5 * (N - 1) / N * quart) + 0.5 * (p2 - j * j)


def product_energy_direct(basis: FockBasis, phi: np.ndarray, k: float, pot: PotentialPair) -> float:
    """``<Psi, H_N(k) Psi>`` for the product state, by sparse matrix-vector product."""
    psi = product_state(basis, phi)
    H = build_HN_k(basis, k, pot)
    return float(np.vdot(psi, H.matrix @ psi).real / np.vdot(psi, psi).real)


# ------------------------------------------------------------ boost identity
@dataclass(frozen=True)
class BoostTransformReport:
    """Discrepancies of ``tau^+ H_N(k) tau`` against two candidate right-hand sides.

    ``literal``: ``N k^2/4 + P_b^2/2N + H_N(0)``; ``corrected``: ``N k^2/4 + H_N(0)``.
    ``compatible_corrected`` restricts the corrected comparison to momentum
    configurations whose boosted modes do not wrap around the Brillouin
    window; ``potential_commutes`` checks ``tau^+ (W_1 + W_2) tau = W_1 + W_2``;
    ``momentum_basis_consistency`` compares the eigenvalues of the site-basis
    corrected discrepancy with its momentum-basis diagonal.
    """

    N: int
    k: float
    literal: float
    corrected: float
    compatible_corrected: float
    compatible_fraction: float
    potential_commutes: float
    momentum_basis_consistency: float
    spectrum_gap_literal: float
    spectrum_gap_corrected: float

    def passed(self, tol: float = 1e-10) -> bool:
        return self.literal < tol


def boost_unitary_diagonal(basis: FockBasis, k: float) -> np.ndarray:
    """Diagonal of ``tau = exp(-i (k/2) sum_j x_j)`` on occupation states."""
    x = basis.grid.axes[0]
    return np.exp(-0.5j * k * (basis.states @ x))


def _mode_labels(grid) -> np.ndarray:
    """Integer momentum labels ``kappa / step`` in ``fftfreq`` order."""
    return np.round(grid.kappa[0] / grid.momentum_step[0]).astype(int)


def _kinetic_diagonal(basis: FockBasis, k: float, N: int, shift: int) -> np.ndarray:
    """Diagonal of ``tau^+ [(N k - P_b)^2/2N + T] tau`` in the momentum-occupation basis.

    The basis "sites" are read as momentum modes in ``fftfreq`` order.
    Conjugation by ``tau`` moves the occupation of label ``m`` to label
    ``m - shift`` cyclically; ``shift = 0`` gives the unboosted operator.
    """
    g = basis.grid
    M = g.n
    labels = _mode_labels(g)
    target = np.array([np.flatnonzero((labels - (m - shift)) % M == 0)[0] for m in labels])
    p_sym = (1j * g.deriv_multipliers[0]).real      # -kappa, zero at Nyquist
    t_sym = 0.5 * g.kappa[0] ** 2
    occ = basis.states.astype(float)
    P = occ @ p_sym[target]
    return (N * k - P) ** 2 / (2.0 * N) + occ @ t_sym[target]


def compatible_modes(grid, shift: int) -> np.ndarray:
    """Modes whose boosted label stays inside the window, with neither end at Nyquist."""
    M = grid.n
    labels = _mode_labels(grid)
    moved = labels - shift
    lo, hi = -(M // 2), (M - 1) // 2
    ok = (moved >= lo) & (moved <= hi)
    if M % 2 == 0:
        ok &= (labels != lo) & (moved != lo)
    return ok


def boost_transform_check(basis: FockBasis, k: float, pot: PotentialPair) -> BoostTransformReport:
    """Compare both sides of the boost identity as matrices on an ``N``-particle sector."""
    if not isinstance(basis.mode, FixedN):
        raise TypeError("boost check runs on a FixedN basis")
    N = basis.mode.n
    Hk = build_HN_k(basis, k, pot)
    H0 = build_HN_k(basis, 0.0, pot)
    tau = sp.diags(boost_unitary_diagonal(basis, k), format="csr")
    lhs = (tau.conj().T @ Hk.matrix @ tau).toarray()
    P = momentum_operator(basis).matrix
    rhs_corr = N * k * k / 4.0 * np.eye(basis.dim) + H0.toarray()
    rhs_lit = rhs_corr + ((P @ P) / (2.0 * N)).toarray()
    d_lit = float(np.max(np.abs(lhs - rhs_lit)))
    d_cor = float(np.max(np.abs(lhs - rhs_corr)))
    Wm = external_operator(basis, pot.w.values.real).matrix
    if pot.lam:
        Wm = Wm + interaction_operator(basis, pot, N).matrix
    d_pot = float(np.max(np.abs((tau.conj().T @ Wm @ tau - Wm).toarray()), initial=0.0))
    # Momentum-basis view of the corrected discrepancy (the potentials cancel).
    shift = int(round(k / 2.0 / basis.grid.momentum_step[0]))
    gap = _kinetic_diagonal(basis, k, N, shift) - (N * k * k / 4.0 + _kinetic_diagonal(basis, 0.0, N, 0))
    modes = compatible_modes(basis.grid, shift)
    compat = np.all((basis.states == 0) | modes[None, :], axis=1)
    d_compat = float(np.max(np.abs(gap[compat]), initial=0.0))
    herm = lambda a: 0.5 * (a + a.conj().T)
    consistency = float(np.max(np.abs(np.sort(la.eigvalsh(herm(lhs - rhs_corr))) - np.sort(gap))))
    ev_l = la.eigvalsh(herm(lhs))[:5]
    ev_lit = la.eigvalsh(herm(rhs_lit))[:5]
    ev_cor = la.eigvalsh(herm(rhs_corr))[:5]
    return BoostTransformReport(N, float(k), d_lit, d_cor, d_compat, float(np.mean(compat)), d_pot,
                                consistency, float(np.max(np.abs(ev_l - ev_lit))),
                                float(np.max(np.abs(ev_l - ev_cor))))
