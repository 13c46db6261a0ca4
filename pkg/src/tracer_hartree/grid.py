"""Periodic spectral grids, fields, derivatives, norms and convolution.

Conventions
-----------
* Positions ``x_i = i * L / n`` on every axis, ``i = 0..n-1``.
* The discrete Fourier transform is unitary (``norm="ortho"``), so the
  Euclidean sum of squared moduli is identical in both representations.
  All physical integrals carry the cell volume ``prod(L / n)``; with it the
  L2 norm is the same number whichever representation is used.
* Momenta ``kappa`` live on ``(2 pi / L) Z`` folded into the symmetric window
  (``numpy.fft.fftfreq`` ordering). For even ``n`` the Nyquist mode is
  kept for the Laplacian (``-kappa**2``) but the first-derivative multiplier
  is set to zero there, so derivatives of real fields stay real.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import GridMismatch, ImaginaryResidue

POSITION = "position"
MOMENTUM = "momentum"


def fourier_axis(n: int, length: float) -> tuple[np.ndarray, np.ndarray]:
    """Folded momenta and first-derivative multipliers for one periodic axis.

    Returns ``(kappa, deriv)`` where ``deriv = 1j * kappa`` except at the
    Nyquist index of an even axis, where it is zero.
    """
    kappa = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
    deriv = 1j * kappa
    if n % 2 == 0:
        deriv[n // 2] = 0.0
    return kappa, deriv


@dataclass(frozen=True)
class Grid:
    """Immutable periodic grid in 1, 2 or 3 dimensions.

    Parameters
    ----------
    dim : int
        Spatial dimension.
    n : int
        Points per axis. Must be even (powers of two are fastest) unless the
        grid is built through :meth:`lattice`, which is used for small Fock
        lattices and accepts any size.
    length : float or sequence of float
        Box length per axis.
    """

    dim: int
    n: int
    length: tuple[float, ...]
    require_even: bool = dc_field(default=True, compare=False, repr=False)

    def __init__(self, dim: int, n: int, length: float | Sequence[float], require_even: bool = True):
        if dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
        n = int(n)
        if require_even and n % 2:
            raise ValueError(f"points per axis must be even, got {n}")
        if n < 2:
            raise ValueError("need at least two points per axis")
        if np.isscalar(length):
            lengths = (float(length),) * dim
        else:
            lengths = tuple(float(v) for v in length)
        if len(lengths) != dim or any(not np.isfinite(v) or v <= 0 for v in lengths):
            raise ValueError(f"box lengths must be {dim} positive numbers, got {length!r}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "length", lengths)
        object.__setattr__(self, "require_even", require_even)

    @classmethod
    def lattice(cls, sites: int, length: float) -> "Grid":
        """One-dimensional grid with an arbitrary number of sites (>= 2)."""
        return cls(1, sites, length, require_even=False)

    # ------------------------------------------------------------------ geometry
    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def npoints(self) -> int:
        return self.n**self.dim

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / self.n for L in self.length)

    @cached_property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @cached_property
    def volume(self) -> float:
        return float(np.prod(self.length))

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(np.arange(self.n) * h for h in self.spacing)

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        """Position arrays, one per axis, broadcast to the full grid shape."""
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    @property
    def center(self) -> np.ndarray:
        return np.array(self.length) / 2.0

    def displacement(self, origin: Sequence[float] | None = None) -> tuple[np.ndarray, ...]:
        """Minimum-image displacement ``x - origin`` per axis, in ``[-L/2, L/2)``."""
        origin = np.zeros(self.dim) if origin is None else np.asarray(origin, dtype=float)
        out = []
        for x, o, L in zip(self.coords, origin, self.length):
            out.append((x - o + L / 2.0) % L - L / 2.0)
        return tuple(out)

    # ------------------------------------------------------------------ spectral
    @cached_property
    def _axis_spectra(self):
        return [fourier_axis(self.n, L) for L in self.length]

    @cached_property
    def kappa(self) -> tuple[np.ndarray, ...]:
        """Folded momentum arrays per axis, broadcast to the grid shape."""
        return tuple(np.meshgrid(*[s[0] for s in self._axis_spectra], indexing="ij"))

    @cached_property
    def deriv_multipliers(self) -> tuple[np.ndarray, ...]:
        """``i kappa_a`` with the Nyquist entry zeroed, per axis."""
        out = []
        for a, (_, d) in enumerate(self._axis_spectra):
            shape = [1] * self.dim
            shape[a] = self.n
            out.append(np.broadcast_to(d.reshape(shape), self.shape).copy())
        return tuple(out)

    @cached_property
    def kappa_sq(self) -> np.ndarray:
        """``|kappa|^2`` (Nyquist kept); ``-kappa_sq`` is the Laplacian symbol."""
        return sum(k**2 for k in self.kappa)

    @cached_property
    def japanese(self) -> np.ndarray:
        """``<kappa> = sqrt(1 + |kappa|^2)``."""
        return np.sqrt(1.0 + self.kappa_sq)

    @cached_property
    def momentum_step(self) -> tuple[float, ...]:
        return tuple(2.0 * np.pi / L for L in self.length)

    def on_lattice(self, k: Sequence[float] | float, atol: float = 1e-12) -> bool:
        """True when every component of ``k`` is an integer multiple of ``2 pi / L``."""
        k = np.atleast_1d(np.asarray(k, dtype=float))
        if k.shape != (self.dim,):
            return False
        ratios = k / np.array(self.momentum_step)
        return bool(np.all(np.abs(ratios - np.round(ratios)) < atol * max(1.0, np.max(np.abs(ratios)))))

    def fft(self, arr: np.ndarray) -> np.ndarray:
        return np.fft.fftn(arr, norm="ortho")

    def ifft(self, arr: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(arr, norm="ortho")

    def translate(self, arr: np.ndarray, shift: Sequence[float], real: bool = False) -> np.ndarray:
        """Return samples of ``f(x + shift)`` by Fourier modulation.

        Exact for band-limited data and any real shift. For ``real=True`` the
        Nyquist coefficient is scaled by ``cos(kappa_N * shift)`` instead of
        the complex phase, which keeps the result real.
        """
        shift = np.asarray(shift, dtype=float).reshape(self.dim)
        if not np.any(shift):
            return np.array(arr, dtype=complex, copy=True)
        phase = np.exp(1j * sum(k * s for k, s in zip(self.kappa, shift)))
        if real and self.n % 2 == 0:
            # Nyquist planes: replace exp(i kN s) by cos(kN s) on that axis.
            for a, s in enumerate(shift):
                idx = [slice(None)] * self.dim
                idx[a] = self.n // 2
                kn = self.kappa[a][tuple(idx)]
                phase[tuple(idx)] *= np.cos(kn * s) / np.exp(1j * kn * s)
        out = self.ifft(phase * self.fft(arr))
        return out.real.astype(complex) if real else out


# ---------------------------------------------------------------------- Field
@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples of a function on a :class:`Grid`.

    ``space`` records whether ``values`` are position samples or unitary
    Fourier coefficients. Arithmetic is allowed only between fields on equal
    grids in the same representation.
    """

    grid: Grid
    values: np.ndarray
    space: str = POSITION

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        if self.space not in (POSITION, MOMENTUM):
            raise ValueError(f"unknown representation {self.space!r}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # construction helpers
    @classmethod
    def from_function(cls, grid: Grid, func) -> "Field":
        return cls(grid, func(*grid.coords))

    @classmethod
    def constant(cls, grid: Grid, c: complex) -> "Field":
        return cls(grid, np.full(grid.shape, c, dtype=complex))

    def _check(self, other: "Field") -> None:
        if not isinstance(other, Field):
            return
        if other.grid != self.grid or other.space != self.space:
            raise GridMismatch("fields live on different grids or representations")

    def _wrap(self, vals) -> "Field":
        return Field(self.grid, vals, self.space)

    def __add__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return self._wrap(self.values + other.values)
        return self._wrap(self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return self._wrap(self.values - other.values)
        return self._wrap(self.values - other)

    def __rsub__(self, other):
        return self._wrap(other - self.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return self._wrap(self.values * other.values)
        return self._wrap(self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return self._wrap(self.values / other.values)
        return self._wrap(self.values / other)

    def __neg__(self):
        return self._wrap(-self.values)

    def conj(self) -> "Field":
        return self._wrap(np.conj(self.values))

    def abs2(self) -> "Field":
        return self._wrap(np.abs(self.values) ** 2)

    def is_real(self, atol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.values.imag), initial=0.0) <= atol)

    def norm(self) -> float:
        return lebesgue_norm(self, 2)

    def normalized(self) -> "Field":
        return self / self.norm()


def _require_position(f: Field) -> None:
    if f.space != POSITION:
        raise GridMismatch("operation needs a position-space field")


def to_momentum(f: Field) -> Field:
    """Unitary Fourier coefficients of a position-space field."""
    _require_position(f)
    return Field(f.grid, f.grid.fft(f.values), MOMENTUM)


def to_position(f: Field) -> Field:
    """Inverse of :func:`to_momentum`."""
    if f.space != MOMENTUM:
        raise GridMismatch("to_position expects a momentum-space field")
    return Field(f.grid, f.grid.ifft(f.values), POSITION)


def gradient(f: Field) -> list[Field]:
    """Spectral partial derivatives, one field per axis."""
    _require_position(f)
    g = f.grid
    fh = g.fft(f.values)
    return [Field(g, g.ifft(m * fh)) for m in g.deriv_multipliers]


def laplacian(f: Field) -> Field:
    """Spectral Laplacian with symbol ``-|kappa|^2``."""
    _require_position(f)
    g = f.grid
    return Field(g, g.ifft(-g.kappa_sq * g.fft(f.values)))


def integrate(f: Field) -> complex:
    """Grid quadrature ``sum(f) * cell_volume``."""
    _require_position(f)
    return complex(np.sum(f.values) * f.grid.cell_volume)


def inner(f: Field, g: Field) -> complex:
    """``<f, g> = integral of conj(f) g`` (antilinear in the first slot)."""
    f._check(g)
    _require_position(f)
    return complex(np.vdot(f.values, g.values) * f.grid.cell_volume)


def sobolev_norm(f: Field, s: float) -> float:
    """H^s norm with multiplier ``<kappa>^s``."""
    if s < 0:
        raise ValueError("Sobolev index must be nonnegative")
    g = f.grid
    fh = g.fft(f.values) if f.space == POSITION else f.values
    weight = g.japanese ** (2.0 * s) if s else 1.0
    return float(np.sqrt(np.sum(weight * np.abs(fh) ** 2) * g.cell_volume))


def lebesgue_norm(f: Field, p: float) -> float:
    """L^p norm by grid quadrature; ``p = inf`` gives the sampled maximum."""
    _require_position(f)
    if not (p >= 1):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(np.max(a))
    if p == 2:
        return float(np.sqrt(np.sum(a * a) * f.grid.cell_volume))
    return float((np.sum(a**p) * f.grid.cell_volume) ** (1.0 / p))


def w1p_norm(f: Field, p: float) -> float:
    """``||f||_p + sum_j ||d_j f||_p``."""
    return lebesgue_norm(f, p) + sum(lebesgue_norm(d, p) for d in gradient(f))


def convolution_symbol(v: Field) -> np.ndarray:
    """Fourier multiplier realizing ``rho -> v * rho`` on unitary coefficients."""
    _require_position(v)
    g = v.grid
    return g.fft(v.values) * np.sqrt(g.npoints) * g.cell_volume


def convolve_array(symbol: np.ndarray, rho: np.ndarray, grid: Grid, real: bool) -> np.ndarray:
    """Array-level periodic convolution using a precomputed symbol."""
    out = grid.ifft(symbol * grid.fft(rho))
    if real:
        scale = max(1.0, float(np.max(np.abs(out.real), initial=0.0)))
        resid = float(np.max(np.abs(out.imag), initial=0.0))
        if resid > 1e-10 * scale:
            raise ImaginaryResidue(f"real-real convolution left imaginary residue {resid:.3e}")
        return out.real.astype(complex)
    return out


def convolve(v: Field, rho: Field) -> Field:
    """Periodic convolution ``(v * rho)(x) = integral v(x - y) rho(y) dy``.

    ``v`` must be sampled on the grid with its origin at index 0 (use
    :meth:`Grid.displacement` with no origin). When both inputs are real the
    imaginary roundoff is checked against ``1e-10`` and dropped.
    """
    v._check(rho)
    _require_position(rho)
    real = v.is_real() and rho.is_real()
    return Field(v.grid, convolve_array(convolution_symbol(v), rho.values, v.grid, real))
