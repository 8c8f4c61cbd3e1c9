"""Exception hierarchy shared by the solver, the report layer and the CLI.

Every error subclasses the builtin it most resembles, so ``except ValueError``
keeps working for callers that do not know about confinium.
"""
from typing import Any, Dict, List, Optional, Tuple


class ConfiniumError(Exception):
    """Base class for all confinium failures."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ParameterError(ConfiniumError, ValueError):
    """Invalid system, series or grid parameters."""


class EvaluationError(ParameterError):
    """A potential or wavefunction was evaluated outside its domain."""


class ConfigError(ParameterError):
    """Malformed or unknown configuration keys."""


class UnsupportedError(ConfiniumError, NotImplementedError):
    """The requested route has no implementation for this system kind."""


class NumericError(ConfiniumError, ArithmeticError):
    """A numerical procedure failed to converge."""


class BracketError(NumericError):
    """The shooting bracket does not contain a sign change."""

    def __init__(self, message: str, bracket: Tuple[float, float], values: Tuple[float, float]) -> None:
        super().__init__(message, {"bracket": list(bracket), "values": list(values)})
        self.bracket = bracket
        self.values = values


class ConvergenceError(NumericError):
    """Domain growth did not settle the eigenvalue."""

    def __init__(self, message: str, trace: List[Tuple[float, float]]) -> None:
        super().__init__(message, {"trace": [list(item) for item in trace]})
        self.trace = trace


class PartialResultError(ConfiniumError, LookupError):
    """Fewer bound states exist than were requested."""

    def __init__(self, message: str, found: list) -> None:
        super().__init__(message, {"found": [getattr(state, "energy", state) for state in found]})
        self.found = found


class AssemblyError(ConfiniumError, RuntimeError):
    """The Hamiltonian could not be assembled from finite values."""


class ContractError(ConfiniumError, RuntimeError):
    """An input state violates the caller contract (e.g. not normalized)."""
