"""Exception types shared across the package."""

from __future__ import annotations


class TracerHartreeError(Exception):
    """Base class for all package errors."""


class GridMismatch(TracerHartreeError, ValueError):
    """Two fields on different grids (or representations) were combined."""


class ImaginaryResidue(TracerHartreeError, ValueError):
    """A quantity that must be real carried a non-negligible imaginary part."""


class NotNormalized(TracerHartreeError, ValueError):
    """A field that must carry unit mass does not."""


class NoConvergence(TracerHartreeError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, last_residual: float | None = None):
        super().__init__(message)
        self.last_residual = last_residual


class DegenerateStart(TracerHartreeError, ValueError):
    """Initial guess has (numerically) zero mass."""


class NotApplicable(TracerHartreeError, ValueError):
    """A bound check was requested outside its hypotheses."""


class BlowupDetected(TracerHartreeError, FloatingPointError):
    """A time integrator produced non-finite values."""


class BudgetExceeded(TracerHartreeError, MemoryError):
    """A Fock basis would exceed the configured state budget."""


class OffLatticeMomentum(TracerHartreeError, ValueError):
    """A momentum that must lie on the lattice momentum set does not."""


class TruncationTooTight(TracerHartreeError, ValueError):
    """The truncated Fock space cannot hold the requested coherent state."""


class ConfigError(TracerHartreeError, ValueError):
    """Invalid experiment configuration; carries the offending field and line."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class IncompleteRun(TracerHartreeError, RuntimeError):
    """A records file lacks quantities required by a registered check."""
