__version__ = "0.1.0"

from typing import Dict, Optional

from .eigensolve import Eigenstate, energy_ladder, shoot_energy, solve_bound_states
from .errors import (AssemblyError, BracketError, ConfigError, ConfiniumError, ContractError,
                     ConvergenceError, EvaluationError, NumericError, ParameterError,
                     PartialResultError, UnsupportedError)
from .logger import TraceLog
from .model import DEFAULT_POLICY, Kind, StateSpec, SystemSpec, TruncationPolicy
from .observables import ExpectationSet, VirialReport, expectation_set, virial_report
from .report import load_references, reproduce_table, summarize, sweep


def solve(kind, state: str = "1s", policy: Optional[TruncationPolicy] = None, **params) -> Eigenstate:
    """
    Solve a single state, e.g. ``solve("cha", "2p", r_c=1)``.

    Args:
        kind: System kind name or ``Kind``.
        state: Label such as ``n=0``, ``1s``, ``2p`` or ``nr=1,l=2``.
        policy: Truncation policy (default: ``DEFAULT_POLICY``).
        **params: System parameters (``omega``, ``x_c``, ``r_c``, ``r_a``, ``r_b``,
            ``k``, ``V0``, ``U0``, ``w``); omitted ones take the kind's defaults.
    """
    st = StateSpec.parse(kind, state)
    system = SystemSpec.make(kind, ell=st.ell, **params)
    return solve_bound_states(system, st.n_index + 1, policy or DEFAULT_POLICY)[st.n_index]


def check(kind, state: str = "1s", policy: Optional[TruncationPolicy] = None, **params) -> Dict[str, bool]:
    """Identity checks (four-way equality, <T^2> shortcut, zero energy variance) for one state."""
    es = solve(kind, state, policy, **params)
    return virial_report(es.system, es).checks(expectation_set(es.system, es).t2)


__all__ = [
    "__version__", "solve", "check",
    "Kind", "SystemSpec", "StateSpec", "TruncationPolicy", "DEFAULT_POLICY",
    "Eigenstate", "solve_bound_states", "energy_ladder", "shoot_energy",
    "ExpectationSet", "VirialReport", "expectation_set", "virial_report",
    "load_references", "reproduce_table", "summarize", "sweep", "TraceLog",
    "ConfiniumError", "ParameterError", "EvaluationError", "ConfigError", "UnsupportedError",
    "NumericError", "BracketError", "ConvergenceError", "PartialResultError", "AssemblyError",
    "ContractError",
]
