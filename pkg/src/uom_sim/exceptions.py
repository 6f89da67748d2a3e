"""Exception types raised by the toolkit."""

from __future__ import annotations


class UomSimError(Exception):
    """Base class for all toolkit errors."""


class InvalidDimensionError(UomSimError):
    """Operator or state size does not match the declared space."""


class InvalidArgumentError(UomSimError):
    """Argument outside the documented domain of an operation."""


class ConfigValidationError(UomSimError):
    """Scenario configuration failed validation.

    Carries a list of field-level messages so the CLI can report every
    problem at once instead of failing on the first.
    """

    def __init__(self, messages: list[str]):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class DispersiveDivergenceError(UomSimError):
    """Dispersive denominators vanish (qubit resonant with the mechanics)."""


class InstabilityError(UomSimError):
    """Requested operating point is mechanically unstable (frequency collapse)."""


class ThresholdError(UomSimError):
    """Parametric pump at or above the oscillation threshold 4|alpha| = kappa."""


class KerrConvergenceError(UomSimError):
    """Self-consistent Kerr iteration failed to converge (Kerr-dominated regime)."""


class DegenerateSteadyStateError(UomSimError):
    """Liouvillian null space has dimension > 1 (multiple steady states)."""


class UndefinedCorrelationError(UomSimError):
    """Normalized correlation requested on a state with vanishing occupation."""


class InternalConsistencyError(UomSimError):
    """Cross-check between two internally computed quantities failed."""


class SubspaceIdentificationError(UomSimError):
    """Dressed-level sorting failed: no eigenvector group passes the overlap cut.

    The ``overlaps`` attribute holds (eigenvalue, ground-overlap) rows for
    diagnosis.
    """

    def __init__(self, message: str, overlaps=None):
        super().__init__(message)
        self.overlaps = overlaps


class SolverError(UomSimError):
    """Integrator failed (step-size underflow or solver-reported error)."""
