"""Exception types raised by the solvers.

Everything derives from :class:`WaveTransError` so callers can catch the
library's failures without masking programming errors.
"""


class WaveTransError(Exception):
    """Base class for all wavetrans errors."""


class DomainError(WaveTransError, ValueError):
    """Evaluation outside a profile's domain, or invalid construction data."""


class SideAmbiguityError(DomainError):
    """One-sided derivative requested exactly at a breakpoint without a side."""


class CriticalLayerError(WaveTransError):
    """Wave speed inside the background-current range where the mode
    equation has a singular coefficient."""


class DegenerateModeError(WaveTransError):
    """The unit-slope shot lands on a zero of the mode at the surface, so the
    boundary scaling is ill-defined."""


class VacuumLayerError(WaveTransError):
    """Density profile vanishes (or goes negative) inside the layer."""


class ConvergenceError(WaveTransError):
    """An iterative scheme (integrator, root finder) exhausted its budget."""


class NoRootError(WaveTransError):
    """No admissible root in the scanned bracket.

    Carries the scan table (list of ``(c, residual)`` pairs, NaN where the
    residual could not be evaluated) to aid diagnosis.
    """

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = tuple(scan) if scan is not None else ()


class IntegrabilityError(WaveTransError):
    """A semi-infinite integral fails its tail-decay requirement."""


class IllConditionedError(WaveTransError):
    """A requested quantity involves division by a vanishing transfer value."""


class ConsistencyError(WaveTransError):
    """Mismatched inputs (e.g. a mode paired with a different profile)."""


class FormatError(WaveTransError, ValueError):
    """Malformed gauge record or environment file."""
