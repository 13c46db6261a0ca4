"""Occupation-number bases and primitive ladder matrices on a periodic lattice.

Internally everything is built from the *standard* bosons ``b_x`` with
``[b_x, b_y^+] = delta_xy``. The continuum-normalized operators are
``a_x = b_x / sqrt(dx)``, so that ``[a_x, a_y^+] = delta_xy / dx`` and
``sum_x dx`` plays the role of the integral.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ..errors import BudgetExceeded
from ..grid import Grid

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class FixedN:
    """The ``n``-particle sector."""
    n: int


@dataclass(frozen=True)
class Truncated:
    """All sectors with at most ``n_max`` particles."""
    n_max: int


def sector_dimension(sites: int, n: int) -> int:
    return math.comb(n + sites - 1, sites - 1)


def basis_dimension(sites: int, mode) -> int:
    if isinstance(mode, FixedN):
        return sector_dimension(sites, mode.n)
    return sum(sector_dimension(sites, n) for n in range(mode.n_max + 1))


def _sector_states(sites: int, n: int) -> np.ndarray:
    """All occupation vectors with total ``n``, lexicographically ascending."""
    if sites == 1:
        return np.array([[n]], dtype=np.int64)
    rows = []
    for bars in itertools.combinations(range(n + sites - 1), sites - 1):
        edges = (-1,) + bars + (n + sites - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(sites)])
    arr = np.array(rows, dtype=np.int64).reshape(-1, sites)
    order = np.lexsort(arr.T[::-1])
    return arr[order]


class FockBasis:
    """Occupation basis over the sites of a 1D lattice grid.

    States are ordered by particle number, then lexicographically. The
    vacuum (of a truncated basis) has index 0.

    Parameters
    ----------
    grid : Grid
        One-dimensional lattice; its points are the sites.
    mode : FixedN or Truncated
    budget : int
        Hard cap on the number of basis states.
    """

    def __init__(self, grid: Grid, mode, budget: int = DEFAULT_BUDGET):
        if grid.dim != 1:
            raise ValueError("Fock lattices are one-dimensional")
        if not isinstance(mode, (FixedN, Truncated)):
            raise TypeError("mode must be FixedN or Truncated")
        count = mode.n if isinstance(mode, FixedN) else mode.n_max
        if count < 0:
            raise ValueError("particle numbers must be nonnegative")
        self.grid = grid
        self.mode = mode
        self.sites = grid.n
        dim = basis_dimension(self.sites, mode)
        if dim > budget:
            raise BudgetExceeded(f"basis of dimension {dim} exceeds the budget of {budget} states")
        sectors = [mode.n] if isinstance(mode, FixedN) else range(mode.n_max + 1)
        self.states = np.concatenate([_sector_states(self.sites, n) for n in sectors], axis=0)
        self.numbers = self.states.sum(axis=1)
        self._base = count + 2
        if self._base ** self.sites >= 2**62:
            raise BudgetExceeded("occupation encoding would overflow 64-bit keys")
        self._weights = self._base ** np.arange(self.sites, dtype=np.int64)
        keys = self.states @ self._weights
        self._order = np.argsort(keys)
        self._sorted_keys = keys[self._order]
        self._cache: dict = {}

    # ------------------------------------------------------------ indexing
    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @property
    def dx(self) -> float:
        return self.grid.spacing[0]

    @property
    def is_truncated(self) -> bool:
        return isinstance(self.mode, Truncated)

    @property
    def top(self) -> int:
        return self.mode.n if isinstance(self.mode, FixedN) else self.mode.n_max

    def __eq__(self, other):
        return isinstance(other, FockBasis) and other.grid == self.grid and other.mode == self.mode

    def __hash__(self):
        return hash((self.grid, self.mode))

    def __repr__(self):
        return f"FockBasis(sites={self.sites}, mode={self.mode}, dim={self.dim})"

    def lookup(self, occ: np.ndarray) -> np.ndarray:
        """Indices of occupation rows; ``-1`` where a row is not in the basis."""
        occ = np.atleast_2d(np.asarray(occ, dtype=np.int64))
        out = np.full(occ.shape[0], -1, dtype=np.int64)
        valid = np.all((occ >= 0) & (occ < self._base), axis=1)
        keys = occ[valid] @ self._weights
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.clip(pos, 0, self.dim - 1)
        hit = self._sorted_keys[pos] == keys
        idx = np.where(hit, self._order[pos], -1)
        out[np.flatnonzero(valid)] = idx
        return out

    def index(self, occ) -> int:
        i = int(self.lookup(np.asarray(occ))[0])
        if i < 0:
            raise KeyError(f"occupation {tuple(occ)} not in basis")
        return i

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(np.zeros(self.sites, dtype=np.int64))] = 1.0
        return v

    def sector_mask(self, n: int) -> np.ndarray:
        return self.numbers == n

    # -------------------------------------------------- primitive matrices
    def _build(self, src: np.ndarray, tgt_occ: np.ndarray, amp: np.ndarray) -> sp.csr_matrix:
        tgt = self.lookup(tgt_occ)
        keep = tgt >= 0
        return sp.csr_matrix((amp[keep].astype(complex), (tgt[keep], src[keep])),
                             shape=(self.dim, self.dim))

    def hop(self, x: int, y: int) -> sp.csr_matrix:
        """``b_x^+ b_y`` (number conserving, exact on every basis)."""
        key = ("hop", x, y)
        if key not in self._cache:
            ny = self.states[:, y]
            src = np.flatnonzero(ny > 0)
            occ = self.states[src].copy()
            occ[:, y] -= 1
            occ[:, x] += 1
            if x == y:
                amp = ny[src].astype(float)
            else:
                amp = np.sqrt(ny[src] * occ[:, x].astype(float))
            self._cache[key] = self._build(src, occ, amp)
        return self._cache[key]

    def annihilate(self, x: int) -> sp.csr_matrix:
        """``b_x`` on a truncated basis."""
        self._require_truncated()
        key = ("b", x)
        if key not in self._cache:
            nx = self.states[:, x]
            src = np.flatnonzero(nx > 0)
            occ = self.states[src].copy()
            occ[:, x] -= 1
            self._cache[key] = self._build(src, occ, np.sqrt(nx[src].astype(float)))
        return self._cache[key]

    def create(self, x: int) -> sp.csr_matrix:
        """``b_x^+`` on a truncated basis (states leaving the basis are dropped)."""
        key = ("bd", x)
        if key not in self._cache:
            self._cache[key] = self.annihilate(x).conj().T.tocsr()
        return self._cache[key]

    def number_diagonal(self, x: int) -> np.ndarray:
        return self.states[:, x].astype(float)

    def _require_truncated(self):
        if not self.is_truncated:
            raise TypeError("ladder operators change the particle number; use a Truncated basis "
                            "or sector_ladder for FixedN")

    @cached_property
    def top_sector(self) -> np.ndarray:
        return self.numbers == self.top


def sector_ladder(grid: Grid, n: int, x: int) -> sp.csr_matrix:
    """``b_x`` as a map from the ``n``-particle sector to the ``n - 1`` sector."""
    if n < 1:
        raise ValueError("need n >= 1")
    src_b = FockBasis(grid, FixedN(n))
    tgt_b = FockBasis(grid, FixedN(n - 1))
    nx = src_b.states[:, x]
    src = np.flatnonzero(nx > 0)
    occ = src_b.states[src].copy()
    occ[:, x] -= 1
    tgt = tgt_b.lookup(occ)
    return sp.csr_matrix((np.sqrt(nx[src].astype(float)).astype(complex), (tgt, src)),
                         shape=(tgt_b.dim, src_b.dim))


def build_basis(sites: int, length: float, mode, budget: int = DEFAULT_BUDGET) -> FockBasis:
    """Convenience constructor from the lattice size and box length."""
    return FockBasis(Grid.lattice(sites, length), mode, budget)
