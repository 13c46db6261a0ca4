"""Mean-field dynamics of a heavy tracer particle in a Bose gas.

Subpackages and modules:

* :mod:`.grid` periodic spectral grids, fields and norms
* :mod:`.functionals` Hartree energies, current, residuals
* :mod:`.ground_state` constrained minimizers and the boosted ground state
* :mod:`.dynamics` lab-frame and tracer-frame time evolution
* :mod:`.fock` exact second-quantized validator on small lattices
* :mod:`.experiments` declarative experiment runner and CLI
"""

from importlib.metadata import PackageNotFoundError, version as _version

from .errors import *  # noqa: F401,F403
from .functionals import PotentialPair, current, energy_E0, energy_Ek
from .grid import Field, Grid
from .potentials import PotentialSpec, make_potentials

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = ["Field", "Grid", "PotentialPair", "PotentialSpec", "make_potentials",
           "current", "energy_E0", "energy_Ek", "__version__"]
