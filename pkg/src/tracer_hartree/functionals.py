"""Scalar functionals of the mean-field theory and their stationary residuals.

Momentum convention: the current is ``j = <phi, i grad phi>``, so a plane
wave ``exp(i kappa x)`` carries ``j = -kappa``. Every formula below uses
``k - j`` with this sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import GridMismatch, ImaginaryResidue, NotNormalized
from .grid import Field, Grid, convolution_symbol, convolve_array

IMAG_TOL = 1e-10
NORM_TOL = 1e-10


def as_momentum(k, dim: int) -> np.ndarray:
    """Coerce a scalar or sequence into a length-``dim`` float vector."""
    arr = np.atleast_1d(np.asarray(k, dtype=float)).ravel()
    if arr.size == 1 and dim > 1:
        arr = np.concatenate([arr, np.zeros(dim - 1)])
    if arr.shape != (dim,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"momentum must be a finite {dim}-vector, got {k!r}")
    return arr


@dataclass(frozen=True, eq=False)
class PotentialPair:
    """Tracer-boson potential ``w``, even pair potential ``v`` and coupling ``lam``.

    ``v`` is sampled with its origin at grid index 0. Evenness on the grid,
    ``v[-i] == v[i]``, is checked to ``1e-12``.
    """

    w: Field
    v: Field
    lam: float
    _v_symbol: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        if self.w.grid != self.v.grid:
            raise GridMismatch("w and v must share a grid")
        if not (self.lam >= 0 and np.isfinite(self.lam)):
            raise ValueError("coupling must be a nonnegative real number")
        for name, f in (("w", self.w), ("v", self.v)):
            if not f.is_real():
                raise ValueError(f"{name} must be real-valued")
        v = self.v.values.real
        axes = tuple(range(v.ndim))
        mirrored = np.roll(np.flip(v, axis=axes), shift=1, axis=axes)
        asym = float(np.max(np.abs(v - mirrored)))
        if asym >= 1e-12 * max(1.0, float(np.max(np.abs(v)))):
            raise ValueError(f"v is not even on the grid (asymmetry {asym:.3e})")
        object.__setattr__(self, "_v_symbol", convolution_symbol(self.v))

    @property
    def grid(self) -> Grid:
        return self.w.grid

    def hartree_potential(self, density: np.ndarray) -> np.ndarray:
        """``lam * (v * density)`` as a real array (complex dtype)."""
        if self.lam == 0.0:
            return np.zeros(self.grid.shape, dtype=complex)
        return self.lam * convolve_array(self._v_symbol, density, self.grid, real=True)

    def scaled(self, w_factor: float = 1.0, lam: float | None = None) -> "PotentialPair":
        return PotentialPair(self.w * w_factor, self.v, self.lam if lam is None else lam)


# ---------------------------------------------------------------------------
def _real_scalar(z: complex, what: str, scale: float = 1.0) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, scale):
        raise ImaginaryResidue(f"{what} has imaginary residue {z.imag:.3e}")
    return float(z.real)


def current_array(phi: np.ndarray, grid: Grid) -> np.ndarray:
    """Current of raw samples; see :func:`current`."""
    ph = grid.fft(phi)
    comps = []
    dv = grid.cell_volume
    for m in grid.deriv_multipliers:
        dphi = grid.ifft(m * ph)
        z = complex(np.vdot(phi, 1j * dphi) * dv)
        comps.append(_real_scalar(z, "current", scale=abs(z.real)))
    return np.array(comps)


def current(phi: Field) -> np.ndarray:
    """``j = integral conj(phi) (i grad phi)`` by grid quadrature."""
    return current_array(phi.values, phi.grid)


def mass(phi: Field) -> float:
    return float(np.sum(np.abs(phi.values) ** 2) * phi.grid.cell_volume)


def kinetic_energy(phi: Field) -> float:
    """``(1/2) <phi, -Laplacian phi>`` with the Laplacian symbol ``|kappa|^2``."""
    g = phi.grid
    ph = g.fft(phi.values)
    return float(0.5 * np.sum(g.kappa_sq * np.abs(ph) ** 2) * g.cell_volume)


def potential_energy(phi: Field, pot: PotentialPair) -> float:
    return float(np.sum(pot.w.values.real * np.abs(phi.values) ** 2) * phi.grid.cell_volume)


def interaction_integral(phi: Field, pot: PotentialPair) -> float:
    """``integral integral |phi(x)|^2 v(x - y) |phi(y)|^2`` (without ``lam``)."""
    g = phi.grid
    rho = np.abs(phi.values) ** 2
    conv = convolve_array(pot._v_symbol, rho, g, real=True).real
    return float(np.sum(rho * conv) * g.cell_volume)


def energy_E0(phi: Field, pot: PotentialPair) -> float:
    """Hartree energy: kinetic + external + ``(lam/2)`` times the pair integral."""
    _same_grid(phi, pot)
    return (kinetic_energy(phi) + potential_energy(phi, pot)
            + 0.5 * pot.lam * interaction_integral(phi, pot))


def energy_Ek(phi: Field, k, pot: PotentialPair) -> float:
    """``(1/2)|k - j|^2 + E0``."""
    kv = as_momentum(k, phi.grid.dim)
    d = kv - current(phi)
    return 0.5 * float(d @ d) + energy_E0(phi, pot)


def energy_Ek_expanded(phi: Field, k, pot: PotentialPair) -> float:
    """Same value as :func:`energy_Ek`, summed term by term.

    Kept as an independent code path: ``k^2/2 - k.j + j^2/2 + E0``.
    """
    kv = as_momentum(k, phi.grid.dim)
    j = current(phi)
    return 0.5 * float(kv @ kv) - float(kv @ j) + 0.5 * float(j @ j) + energy_E0(phi, pot)


def phase_integrand(phi: Field, k, pot: PotentialPair) -> float:
    """``-k^2/2 + j^2/2 + (lam/2) * pair integral``, per unit particle number."""
    kv = as_momentum(k, phi.grid.dim)
    j = current(phi)
    return (-0.5 * float(kv @ kv) + 0.5 * float(j @ j)
            + 0.5 * pot.lam * interaction_integral(phi, pot))


# ------------------------------------------------------------ operator actions
def hartree_action(phi: np.ndarray, pot: PotentialPair) -> np.ndarray:
    """``(-Laplacian/2 + w + lam v * |phi|^2) phi`` on raw samples."""
    g = pot.grid
    kin = g.ifft(0.5 * g.kappa_sq * g.fft(phi))
    vloc = pot.w.values.real + pot.hartree_potential(np.abs(phi) ** 2).real
    return kin + vloc * phi


def momentum_action(phi: np.ndarray, grid: Grid) -> list[np.ndarray]:
    """Components of ``i grad phi``."""
    ph = grid.fft(phi)
    return [1j * grid.ifft(m * ph) for m in grid.deriv_multipliers]


def boosted_action(phi: np.ndarray, k: np.ndarray, pot: PotentialPair) -> np.ndarray:
    """``-(k - j) . i grad phi + hartree_action(phi)``."""
    g = pot.grid
    j = current_array(phi, g)
    out = hartree_action(phi, pot)
    for kj, pphi in zip(k - j, momentum_action(phi, g)):
        if kj != 0.0:
            out = out - kj * pphi
    return out


def _same_grid(phi: Field, pot: PotentialPair) -> None:
    if phi.grid != pot.grid:
        raise GridMismatch("field and potentials live on different grids")


def _require_unit(Q: Field) -> None:
    m = np.sqrt(mass(Q))
    if abs(m - 1.0) > NORM_TOL:
        raise NotNormalized(f"expected unit L2 norm, got {m:.15f}")


def _l2(arr: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(np.sum(np.abs(arr) ** 2) * grid.cell_volume))


def stationary_residual_0(Q: Field, mu: float, pot: PotentialPair) -> float:
    """``|| (-Laplacian/2 + w + lam v*|Q|^2) Q - mu Q ||_2`` for unit-mass ``Q``."""
    _same_grid(Q, pot)
    _require_unit(Q)
    return _l2(hartree_action(Q.values, pot) - mu * Q.values, Q.grid)


def stationary_residual_k(Q: Field, mu: float, k, pot: PotentialPair) -> float:
    """As :func:`stationary_residual_0` with the extra ``-(k - j_Q) . i grad Q`` term."""
    _same_grid(Q, pot)
    _require_unit(Q)
    kv = as_momentum(k, Q.grid.dim)
    return _l2(boosted_action(Q.values, kv, pot) - mu * Q.values, Q.grid)


def chemical_potential(Q: Field, pot: PotentialPair, k: Sequence[float] | None = None) -> float:
    """``<Q, H Q>`` with ``H`` the (boosted, when ``k`` is given) Hartree operator."""
    if k is None:
        hq = hartree_action(Q.values, pot)
    else:
        hq = boosted_action(Q.values, as_momentum(k, Q.grid.dim), pot)
    z = complex(np.vdot(Q.values, hq) * Q.grid.cell_volume)
    return _real_scalar(z, "chemical potential", scale=abs(z.real))
