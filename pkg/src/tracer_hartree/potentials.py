"""Analytic potential families sampled on a grid.

The tracer-boson potential ``w`` is centred in the box by default, where the
initial condensate sits. The pair potential ``v`` is a function of the
separation and is always sampled at minimum-image displacements from the
origin, which makes it exactly even on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any, Mapping, Sequence

import numpy as np

from .functionals import PotentialPair
from .grid import Field, Grid

FAMILIES = ("gaussian_well", "gaussian", "cosine", "zero")


@dataclass(frozen=True)
class PotentialSpec:
    """A named analytic family with its parameters.

    ``gaussian_well(depth, width)`` is ``-depth * exp(-r^2 / (2 width^2))``;
    ``gaussian(amplitude, width)`` is the same shape with a positive sign;
    ``cosine(amplitude, harmonics)`` sums ``amplitude * cos(2 pi h x_a / L_a)``
    over axes and the listed integer harmonics; ``zero`` is identically zero.
    """

    family: str
    params: Mapping[str, Any] = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown potential family {self.family!r}; choose from {FAMILIES}")
        required = {
            "gaussian_well": ("depth", "width"),
            "gaussian": ("amplitude", "width"),
            "cosine": ("amplitude", "harmonics"),
            "zero": (),
        }[self.family]
        missing = [r for r in required if r not in self.params]
        if missing:
            raise ValueError(f"{self.family} needs parameters {missing}")
        if "width" in self.params and not float(self.params["width"]) > 0:
            raise ValueError("width must be positive")

    def sample(self, grid: Grid, origin: Sequence[float] | None = None) -> Field:
        disp = grid.displacement(origin)
        if self.family == "zero":
            return Field.constant(grid, 0.0)
        if self.family in ("gaussian_well", "gaussian"):
            width = float(self.params["width"])
            amp = -float(self.params["depth"]) if self.family == "gaussian_well" else float(self.params["amplitude"])
            r2 = sum(d**2 for d in disp)
            return Field(grid, amp * np.exp(-r2 / (2.0 * width**2)))
        amp = float(self.params["amplitude"])
        harmonics = self.params["harmonics"]
        harmonics = [harmonics] if np.isscalar(harmonics) else list(harmonics)
        vals = np.zeros(grid.shape)
        for d, L in zip(disp, grid.length):
            for h in harmonics:
                vals = vals + amp * np.cos(2.0 * np.pi * int(h) * d / L)
        return Field(grid, vals)

    def to_dict(self) -> dict:
        return {"family": self.family, **{k: self.params[k] for k in sorted(self.params)}}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PotentialSpec":
        d = dict(d)
        fam = d.pop("family", None)
        if fam is None:
            raise ValueError("potential spec needs a 'family' entry")
        return cls(fam, d)


def make_potentials(grid: Grid, w: PotentialSpec, v: PotentialSpec, lam: float,
                    w_center: Sequence[float] | None = None) -> PotentialPair:
    """Sample ``w`` (centred at ``w_center``, default box centre) and ``v`` (at the origin)."""
    centre = grid.center if w_center is None else np.asarray(w_center, dtype=float)
    return PotentialPair(w.sample(grid, centre), v.sample(grid, None), float(lam))


def gaussian_well(depth: float, width: float) -> PotentialSpec:
    return PotentialSpec("gaussian_well", {"depth": depth, "width": width})


def gaussian(amplitude: float, width: float) -> PotentialSpec:
    return PotentialSpec("gaussian", {"amplitude": amplitude, "width": width})


def cosine(amplitude: float, harmonics) -> PotentialSpec:
    return PotentialSpec("cosine", {"amplitude": amplitude, "harmonics": harmonics})


def zero() -> PotentialSpec:
    return PotentialSpec("zero", {})
