"""Second-quantized operators of the tracer model on a Fock lattice.

Single-particle operators are ``M x M`` matrices acting on lattice samples and
are built from the same Fourier multipliers as :class:`~tracer_hartree.grid.Grid`:
``t = -Laplacian/2`` (symbol ``kappa^2/2``, Nyquist kept), ``p = i grad``
(symbol ``-kappa``, Nyquist zeroed) and ``<kappa>``. Second quantization of a
matrix ``h`` is ``dGamma(h) = sum_xy h_xy b_x^+ b_y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.stats import poisson

from ..errors import GridMismatch, OffLatticeMomentum, TruncationTooTight
from ..functionals import PotentialPair
from ..grid import Grid
from .basis import FixedN, FockBasis, Truncated

HERMITIAN_TOL = 1e-12
TAIL_TOL = 1e-8


class FockOperator:
    """Sparse operator on a :class:`FockBasis`.

    ``hermitian=True`` asserts ``max|A - A^+| < 1e-12`` at construction.
    """

    __slots__ = ("basis", "matrix", "hermitian")

    def __init__(self, basis: FockBasis, matrix, hermitian: bool = False):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape != (basis.dim, basis.dim):
            raise ValueError(f"matrix shape {m.shape} does not match basis dimension {basis.dim}")
        self.basis = basis
        self.matrix = m
        self.hermitian = bool(hermitian)
        if hermitian:
            d = hermiticity_defect(m)
            if d >= HERMITIAN_TOL:
                raise ValueError(f"operator flagged hermitian has defect {d:.3e}")

    def _other(self, other) -> sp.csr_matrix:
        if isinstance(other, FockOperator):
            if other.basis != self.basis:
                raise GridMismatch("operators live on different Fock bases")
            return other.matrix
        raise TypeError("expected a FockOperator")

    def __add__(self, other):
        herm = self.hermitian and getattr(other, "hermitian", False)
        return FockOperator(self.basis, self.matrix + self._other(other), hermitian=False)._flag(herm)

    def __sub__(self, other):
        herm = self.hermitian and getattr(other, "hermitian", False)
        return FockOperator(self.basis, self.matrix - self._other(other), hermitian=False)._flag(herm)

    def __mul__(self, c):
        herm = self.hermitian and np.isreal(c)
        return FockOperator(self.basis, self.matrix * c)._flag(herm)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.basis, self.matrix @ self._other(other))
        return self.matrix @ np.asarray(other)

    def _flag(self, herm: bool) -> "FockOperator":
        self.hermitian = bool(herm)
        return self

    def dagger(self) -> "FockOperator":
        return FockOperator(self.basis, self.matrix.conj().T)._flag(self.hermitian)

    def commutator(self, other: "FockOperator") -> "FockOperator":
        b = self._other(other)
        return FockOperator(self.basis, self.matrix @ b - b @ self.matrix)

    def expectation(self, vec: np.ndarray) -> complex:
        return complex(np.vdot(vec, self.matrix @ vec))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.matrix.data), initial=0.0))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def hermiticity_defect(m: sp.spmatrix) -> float:
    d = (m - m.conj().T).tocsr()
    return float(np.max(np.abs(d.data), initial=0.0))


# ------------------------------------------------------ single-particle pieces
def multiplier_matrix(grid: Grid, symbol: np.ndarray) -> np.ndarray:
    """Matrix of ``f -> ifft(symbol * fft(f))`` in the site basis."""
    eye = np.eye(grid.n, dtype=complex)
    return np.array([grid.ifft(symbol * grid.fft(e)) for e in eye]).T


@dataclass(frozen=True, eq=False)
class LatticeOperators:
    """Single-particle matrices on the lattice sites."""

    kinetic: np.ndarray
    momentum: np.ndarray
    japanese: np.ndarray

    @property
    def momentum_sq(self) -> np.ndarray:
        return self.momentum @ self.momentum


@lru_cache(maxsize=32)
def lattice_operators(grid: Grid) -> LatticeOperators:
    t = multiplier_matrix(grid, 0.5 * grid.kappa_sq)
    p = multiplier_matrix(grid, 1j * grid.deriv_multipliers[0])
    q = multiplier_matrix(grid, grid.japanese)
    herm = lambda a: 0.5 * (a + a.conj().T)
    return LatticeOperators(herm(t), herm(p), herm(q))


def second_quantize(basis: FockBasis, h: np.ndarray, tol: float = 1e-15) -> sp.csr_matrix:
    """``dGamma(h) = sum_xy h[x, y] b_x^+ b_y``."""
    M = basis.sites
    out = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(h))))
    for x in range(M):
        for y in range(M):
            c = h[x, y]
            if abs(c) > tol * scale:
                out = out + c * basis.hop(x, y)
    return out


def _diag(values: np.ndarray) -> sp.csr_matrix:
    return sp.diags(values.astype(complex), format="csr")


def number_operator(basis: FockBasis) -> FockOperator:
    return FockOperator(basis, _diag(basis.numbers.astype(float)), hermitian=True)


def momentum_operator(basis: FockBasis) -> FockOperator:
    """Boson momentum ``P_b = dGamma(i grad)``."""
    return FockOperator(basis, second_quantize(basis, lattice_operators(basis.grid).momentum), True)


def kinetic_operator(basis: FockBasis) -> FockOperator:
    return FockOperator(basis, second_quantize(basis, lattice_operators(basis.grid).kinetic), True)


def japanese_operator(basis: FockBasis) -> FockOperator:
    """``Q_b = dGamma(<kappa>)`` with the folded lattice momenta."""
    return FockOperator(basis, second_quantize(basis, lattice_operators(basis.grid).japanese), True)


def external_operator(basis: FockBasis, w: np.ndarray) -> FockOperator:
    """``W_1 = sum_x w(x) b_x^+ b_x``."""
    return FockOperator(basis, _diag(basis.states @ np.asarray(w, dtype=float)), True)


def pair_matrix(grid: Grid, v: np.ndarray) -> np.ndarray:
    """``v(x_i - x_j)`` for lattice samples ``v`` stored with origin at index 0."""
    M = grid.n
    idx = (np.arange(M)[:, None] - np.arange(M)[None, :]) % M
    return np.asarray(v, dtype=float)[idx]


def quartic_diagonal(basis: FockBasis, v: np.ndarray, normal_ordered: bool = True) -> np.ndarray:
    """Diagonal of ``sum_xy v(x - y) b_x^+ b_y^+ b_y b_x`` (or of ``n_x v n_y``)."""
    V = pair_matrix(basis.grid, v)
    n = basis.states.astype(float)
    d = np.einsum("sx,xy,sy->s", n, V, n)
    if normal_ordered:
        d = d - V[0, 0] * n.sum(axis=1)
    return d


def interaction_operator(basis: FockBasis, pot: PotentialPair, N: float,
                         normal_ordered: bool = True) -> FockOperator:
    """``W_2 = (lam / 2N) sum_xy v(x - y) b_x^+ b_y^+ b_y b_x`` (diagonal in sites)."""
    vals = pot.v.values.real
    return FockOperator(basis, _diag(pot.lam / (2.0 * N) * quartic_diagonal(basis, vals, normal_ordered)), True)


def _check_lattice_potentials(basis: FockBasis, pot: PotentialPair) -> None:
    if pot.grid != basis.grid:
        raise GridMismatch("potentials must be sampled on the Fock lattice")


def fiber_hamiltonian(basis: FockBasis, k: float, pot: PotentialPair, N: float | None = None,
                      normal_ordered: bool = True) -> FockOperator:
    """``(N k - P_b)^2 / 2N + T + W_1 + W_2`` on any basis of the lattice.

    ``N`` defaults to the particle number of a FixedN basis and is required
    for truncated bases.

    Raises
    ------
    OffLatticeMomentum
        If ``k`` is not a lattice momentum, or (FixedN bases) ``k/2`` is not.
    """
    _check_lattice_potentials(basis, pot)
    k = float(np.asarray(k, dtype=float).ravel()[0])
    grid = basis.grid
    if not grid.on_lattice(k):
        raise OffLatticeMomentum(f"k = {k} is not a multiple of {grid.momentum_step[0]}")
    if isinstance(basis.mode, FixedN):
        if not grid.on_lattice(k / 2):
            raise OffLatticeMomentum(f"k/2 = {k / 2} is not a lattice momentum")
        N = basis.mode.n if N is None else N
    if N is None or N <= 0:
        raise ValueError("a positive N is needed")
    P = momentum_operator(basis).matrix
    shifted = N * k * sp.identity(basis.dim, dtype=complex, format="csr") - P
    H = (shifted @ shifted) / (2.0 * N)
    H = H + kinetic_operator(basis).matrix + external_operator(basis, pot.w.values.real).matrix
    if pot.lam:
        H = H + interaction_operator(basis, pot, N, normal_ordered).matrix
    H = 0.5 * (H + H.conj().T)
    return FockOperator(basis, H, hermitian=True)


def build_HN_k(basis: FockBasis, k: float, pot: PotentialPair, normal_ordered: bool = True) -> FockOperator:
    """Fiber Hamiltonian on an ``N``-particle sector."""
    if not isinstance(basis.mode, FixedN):
        raise TypeError("build_HN_k expects a FixedN basis; use fiber_hamiltonian for truncated spaces")
    return fiber_hamiltonian(basis, k, pot, normal_ordered=normal_ordered)


# ------------------------------------------------------------ smeared fields
def creation_field(basis: FockBasis, f: np.ndarray) -> sp.csr_matrix:
    """``a^+(f) = sum_x f(x) a_x^+ dx = sum_x sqrt(dx) f(x) b_x^+``."""
    c = np.sqrt(basis.dx) * np.asarray(f, dtype=complex)
    out = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for x in range(basis.sites):
        if c[x] != 0:
            out = out + c[x] * basis.create(x)
    return out


def annihilation_field(basis: FockBasis, f: np.ndarray) -> sp.csr_matrix:
    """``a(f) = sum_x conj(f(x)) a_x dx``."""
    return creation_field(basis, f).conj().T.tocsr()


def ladder(basis: FockBasis, x: int) -> tuple[FockOperator, FockOperator]:
    """Continuum-normalized ``(a_x, a_x^+)`` on a truncated basis."""
    s = 1.0 / np.sqrt(basis.dx)
    return (FockOperator(basis, s * basis.annihilate(x)), FockOperator(basis, s * basis.create(x)))


def ccr_defect(basis: FockBasis) -> float:
    """Largest deviation of ``[a_x, a_y^+]`` from ``delta_xy / dx`` on the retained space.

    On truncated bases the top sector is excluded (the commutator is cut
    there by construction). On an ``N``-particle sector the commutator is
    assembled from the sector maps ``N+1 -> N`` and ``N -> N-1``.
    """
    from .basis import sector_ladder

    M, dx = basis.sites, basis.dx
    worst = 0.0
    if basis.is_truncated:
        keep = ~basis.top_sector
        for x in range(M):
            for y in range(M):
                c = (basis.annihilate(x) @ basis.create(y) - basis.create(y) @ basis.annihilate(x)) / dx
                target = sp.identity(basis.dim, format="csr") * ((x == y) / dx)
                d = (c - target)[keep][:, keep]
                worst = max(worst, float(np.max(np.abs(d.toarray()), initial=0.0)) if d.nnz else 0.0)
        return worst
    n = basis.mode.n
    grid = basis.grid
    up = [sector_ladder(grid, n + 1, x) for x in range(M)]          # F_{n+1} -> F_n
    down = [sector_ladder(grid, n, x) for x in range(M)] if n > 0 else None
    for x in range(M):
        for y in range(M):
            c = up[x] @ up[y].conj().T
            if down is not None:
                c = c - down[y].conj().T @ down[x]
            c = c / dx - sp.identity(basis.dim) * ((x == y) / dx)
            worst = max(worst, float(np.max(np.abs(c.toarray()))))
    return worst


# ------------------------------------------------------------------- Weyl
def truncation_for(N: float, mass_sq: float = 1.0) -> int:
    """``ceil(N |phi|^2 + 6 sqrt(N |phi|^2) + 10)``."""
    mean = N * mass_sq
    return int(np.ceil(mean + 6.0 * np.sqrt(mean) + 10.0))


def poisson_tail(mean: float, n_max: int) -> float:
    """Probability that a Poisson(mean) variable exceeds ``n_max``."""
    return float(poisson.sf(n_max, mean)) if mean > 0 else 0.0


def lattice_mass(basis_or_grid, phi: np.ndarray) -> float:
    g = basis_or_grid.grid if isinstance(basis_or_grid, FockBasis) else basis_or_grid
    return float(np.sum(np.abs(phi) ** 2) * g.spacing[0])


class WeylOperator:
    """``W[sqrt(N) phi] = exp(sqrt(N) (a^+(phi) - a(phi)))`` on a truncated basis.

    The generator is antihermitian on the retained space, so the truncated
    exponential is exactly unitary there; its action is computed with
    :func:`scipy.sparse.linalg.expm_multiply`.
    """

    def __init__(self, basis: FockBasis, phi: np.ndarray, N: float):
        if not isinstance(basis.mode, Truncated):
            raise TypeError("Weyl operators need a Truncated basis")
        phi = np.asarray(phi, dtype=complex)
        self.basis = basis
        self.phi = phi
        self.N = float(N)
        self.mean = self.N * lattice_mass(basis, phi)
        self.tail = poisson_tail(self.mean, basis.mode.n_max)
        if self.tail >= TAIL_TOL:
            raise TruncationTooTight(f"coherent tail above n_max = {basis.mode.n_max} is "
                                     f"{self.tail:.2e} (mean {self.mean:.3g})")
        ad = creation_field(basis, phi)
        self.generator = np.sqrt(self.N) * (ad - ad.conj().T)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        if not np.any(self.phi):
            return np.array(vec, dtype=complex, copy=True)
        return expm_multiply(self.generator, np.asarray(vec, dtype=complex))

    def apply_adjoint(self, vec: np.ndarray) -> np.ndarray:
        if not np.any(self.phi):
            return np.array(vec, dtype=complex, copy=True)
        return expm_multiply(-self.generator, np.asarray(vec, dtype=complex))

    def dense(self) -> np.ndarray:
        from scipy.linalg import expm

        if self.basis.dim > 4000:
            raise MemoryError("dense Weyl matrix requested for a large basis")
        return expm(self.generator.toarray())

    def unitarity_defect(self) -> float:
        if self.basis.dim <= 4000:
            W = self.dense()
            return float(np.max(np.abs(W.conj().T @ W - np.eye(self.basis.dim))))
        v = self.apply(self.basis.vacuum())
        return abs(float(np.linalg.norm(v)) - 1.0)

    def top_sector_weight(self, vec: np.ndarray | None = None) -> float:
        v = self.apply(self.basis.vacuum()) if vec is None else vec
        return float(np.sum(np.abs(v[self.basis.top_sector]) ** 2))


def weyl(phi: np.ndarray, N: float, basis: FockBasis) -> WeylOperator:
    return WeylOperator(basis, phi, N)


# ------------------------------------------------- mean-field generators
def _field_ops(basis: FockBasis):
    """Cached per-site ``b_x^+`` and pair-creation matrices."""
    key = ("pairs",)
    cache = basis._cache
    if key not in cache:
        M = basis.sites
        bd = [basis.create(x) for x in range(M)]
        pairs = {(x, y): (bd[x] @ bd[y]).tocsr() for x in range(M) for y in range(x, M)}
        cache[key] = pairs
    return cache[key]


def fluctuation_field(basis: FockBasis, phi: np.ndarray) -> sp.csr_matrix:
    """``V = a^+(i grad phi) + a(i grad phi)`` (hermitian)."""
    g = lattice_operators(basis.grid).momentum @ np.asarray(phi, dtype=complex)
    ad = creation_field(basis, g)
    return (ad + ad.conj().T).tocsr()


def hartree_single_particle(grid: Grid, phi: np.ndarray, k: float, pot: PotentialPair) -> np.ndarray:
    """``-(k - j) p + t + w + lam v * |phi|^2`` as a site-basis matrix."""
    ops = lattice_operators(grid)
    phi = np.asarray(phi, dtype=complex)
    j = float(np.vdot(phi, ops.momentum @ phi).real * grid.spacing[0])
    local = pot.w.values.real + pot.hartree_potential(np.abs(phi) ** 2).real
    return -(k - j) * ops.momentum + ops.kinetic + np.diag(local)


def build_HHar(basis: FockBasis, phi: np.ndarray, k: float, pot: PotentialPair) -> FockOperator:
    h = hartree_single_particle(basis.grid, phi, k, pot)
    return FockOperator(basis, second_quantize(basis, 0.5 * (h + h.conj().T)), hermitian=True)


def build_Hcor(basis: FockBasis, phi: np.ndarray, pot: PotentialPair) -> FockOperator:
    """``V^2/2 + lam sum v phi(x) conj(phi(y)) a_x^+ a_y + (lam/2) sum v (phi phi a^+ a^+ + h.c.)``."""
    phi = np.asarray(phi, dtype=complex)
    dx = basis.dx
    V = fluctuation_field(basis, phi)
    H = 0.5 * (V @ V)
    if pot.lam:
        Vm = pair_matrix(basis.grid, pot.v.values.real)
        exch = pot.lam * dx * Vm * np.outer(phi, np.conj(phi))
        H = H + second_quantize(basis, exch)
        pairs = _field_ops(basis)
        A = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        M = basis.sites
        for x in range(M):
            for y in range(x, M):
                c = Vm[x, y] * phi[x] * phi[y] * dx * (1.0 if x == y else 2.0)
                if c != 0:
                    A = A + c * pairs[(x, y)]
        A = 0.5 * pot.lam * A
        H = H + A + A.conj().T
    H = 0.5 * (H + H.conj().T)
    return FockOperator(basis, H, hermitian=True)


def build_Hmf(phi: np.ndarray, k: float, pot: PotentialPair, basis: FockBasis) -> FockOperator:
    """Fluctuation generator ``H_Har + H_cor`` at one instant."""
    _check_lattice_potentials(basis, pot)
    return build_HHar(basis, phi, k, pot) + build_Hcor(basis, phi, pot)


def build_LN(phi: np.ndarray, k: float, pot: PotentialPair, N: float, basis: FockBasis,
             normal_ordered: bool = True) -> FockOperator:
    """Defect operator between exact and coherent-state dynamics.

    ``(P V + V P)/(2 sqrt N) + P^2/2N
    + (lam/sqrt N) sum v a_x^+ (conj(phi(y)) a_y + phi(y) a_y^+) a_x + W_2``.
    """
    _check_lattice_potentials(basis, pot)
    phi = np.asarray(phi, dtype=complex)
    P = momentum_operator(basis).matrix
    V = fluctuation_field(basis, phi)
    L = (P @ V + V @ P) / (2.0 * np.sqrt(N)) + (P @ P) / (2.0 * N)
    if pot.lam:
        Vm = pair_matrix(basis.grid, pot.v.values.real)
        M = basis.sites
        b = [basis.annihilate(x) for x in range(M)]
        bd = [basis.create(x) for x in range(M)]
        cubic = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for x in range(M):
            # sum_y v(x - y) conj(phi(y)) b_y, wrapped by b_x^+ ... b_x
            inner = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
            for y in range(M):
                c = Vm[x, y] * np.conj(phi[y])
                if c != 0:
                    inner = inner + c * b[y]
            cubic = cubic + bd[x] @ inner @ b[x]
        cubic = np.sqrt(basis.dx) * cubic
        L = L + pot.lam / np.sqrt(N) * (cubic + cubic.conj().T)
        L = L + interaction_operator(basis, pot, N, normal_ordered).matrix
    L = 0.5 * (L + L.conj().T)
    return FockOperator(basis, L, hermitian=True)
