"""Analytic anchors: closed-form facts every build must reproduce."""
import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .eigensolve import bracket_around, shoot_energy, solve_bound_states
from .errors import ConfiniumError
from .grid import build_grid
from .model import DEFAULT_POLICY, Domain, Kind, StateSpec, SystemSpec, TruncationPolicy, total_potential
from .observables import apply_kinetic, expectation_set, superpose, t_squared_via_energy, virial_report
from .specfun import KummerParams, kummer_m

logger = logging.getLogger(__name__)

ANCHOR_RTOL = 1e-8
BACKEND_RTOL = 1e-7
MIXTURE_RTOL = 0.05
MIXTURE_COEFFICIENT = 0.01

Check = Tuple[str, float, Callable[[TruncationPolicy], float], float]


def _state(sys: SystemSpec, label: str, policy: TruncationPolicy):
    st = StateSpec.parse(sys.kind, label)
    sys = sys.for_state(st)
    return sys, solve_bound_states(sys, st.n_index + 1, policy)[st.n_index]


def _variance(kind: Kind, label: str, **params) -> Callable[[TruncationPolicy], float]:
    def check(policy: TruncationPolicy) -> float:
        sys, es = _state(SystemSpec.make(kind, **params), label, policy)
        return virial_report(sys, es).dV2
    return check


def _box_kinetic(policy: TruncationPolicy) -> float:
    grid = build_grid(Domain(0.0, 1.0), policy.grid_n)
    psi = np.sin(math.pi * grid.nodes)
    t_psi = apply_kinetic(grid, psi, 0)
    ratio = grid.inner(psi, t_psi) / grid.inner(psi, psi)
    return ratio


def _hydrogen_t2(route: str) -> Callable[[TruncationPolicy], float]:
    def check(policy: TruncationPolicy) -> float:
        sys, es = _state(SystemSpec.make(Kind.CHA), "1s", policy)
        moments = expectation_set(sys, es)
        if route == "direct":
            return moments.t2
        return t_squared_via_energy(es.energy, moments.v, moments.v2)
    return check


def _backend_gap(kind: Kind, label: str, **params) -> Callable[[TruncationPolicy], float]:
    def check(policy: TruncationPolicy) -> float:
        sys, es = _state(SystemSpec.make(kind, **params), label, policy)
        shot = shoot_energy(sys, es.state, bracket_around(es.energy))
        return abs(shot - es.energy) / max(1.0, abs(shot))
    return check


def _mixture_ratio(policy: TruncationPolicy) -> float:
    sys = SystemSpec.make(Kind.CHO1D, x_c=1.0)
    ground, excited = solve_bound_states(sys, 2, policy)
    c = MIXTURE_COEFFICIENT
    mixed = superpose(ground, excited, c)
    predicted = c * c * (excited.energy - ground.energy) ** 2 / (1.0 + c * c) ** 2
    return virial_report(sys, mixed).dH2 / predicted


CHECKS: List[Check] = [
    ("kummer M(a,a,z) = exp(z)", math.exp(2.3), lambda p: kummer_m(KummerParams(1.5, 1.5, 2.3)), ANCHOR_RTOL),
    ("kummer M(0,b,z) = 1", 1.0, lambda p: kummer_m(KummerParams(0.0, 2.5, -7.0)), ANCHOR_RTOL),
    ("kummer M(1,2,1) = e - 1", math.e - 1.0, lambda p: kummer_m(KummerParams(1.0, 2.0, 1.0)), ANCHOR_RTOL),
    ("cho1d v(2) = 2", 2.0, lambda p: total_potential(SystemSpec.make(Kind.CHO1D), 2.0), ANCHOR_RTOL),
    ("cha v(0.5) = -2", -2.0, lambda p: total_potential(SystemSpec.make(Kind.CHA), 0.5), ANCHOR_RTOL),
    ("hicha V(r_c) = 1 - 1/r_c", 0.5,
     lambda p: total_potential(SystemSpec.make(Kind.HICHA, r_c=2.0, k=3.0), 2.0), ANCHOR_RTOL),
    ("hpcha V(r_c) = U0/2 - 1/r_c", 4.0,
     lambda p: total_potential(SystemSpec.make(Kind.HPCHA, r_c=1.0), 1.0), ANCHOR_RTOL),
    ("box <T> of sin(pi r) = pi^2/2", math.pi ** 2 / 2, _box_kinetic, ANCHOR_RTOL),
    ("free 1D oscillator n=0 (dV)^2", 0.125, _variance(Kind.CHO1D, "n=0"), ANCHOR_RTOL),
    ("free 1D oscillator n=1 (dV)^2", 0.375, _variance(Kind.CHO1D, "n=1"), ANCHOR_RTOL),
    ("free 3D oscillator 1s (dV)^2", 0.375, _variance(Kind.CHO3D, "1s"), ANCHOR_RTOL),
    ("hydrogen 1s (dV)^2", 1.0, _variance(Kind.CHA, "1s"), ANCHOR_RTOL),
    ("hydrogen 2s (dV)^2", 3.0 / 16.0, _variance(Kind.CHA, "2s"), ANCHOR_RTOL),
    ("hydrogen 2p (dV)^2", 1.0 / 48.0, _variance(Kind.CHA, "2p"), ANCHOR_RTOL),
    ("hydrogen 1s <T^2> direct", 1.25, _hydrogen_t2("direct"), ANCHOR_RTOL),
    ("hydrogen 1s <T^2> from energy", 1.25, _hydrogen_t2("energy"), ANCHOR_RTOL),
    ("matrix vs shooting, cho1d x_c=1 n=0", 0.0, _backend_gap(Kind.CHO1D, "n=0", x_c=1.0), BACKEND_RTOL),
    ("matrix vs shooting, cha r_c=1 2p", 0.0, _backend_gap(Kind.CHA, "2p", r_c=1.0), BACKEND_RTOL),
    ("1% mixture (dH)^2 / two-level prediction", 1.0, _mixture_ratio, MIXTURE_RTOL),
]


def _passes(expected: float, computed: float, rtol: float) -> bool:
    if expected == 0.0:
        return abs(computed) <= rtol
    return abs(computed - expected) <= rtol * abs(expected)


def run_selftest(policy: Optional[TruncationPolicy] = None) -> List[Dict]:
    """Evaluate every anchor; failures become rows, never exceptions."""
    policy = policy or DEFAULT_POLICY
    rows = []
    for name, expected, check, rtol in CHECKS:
        try:
            computed: Optional[float] = float(check(policy))
            error = None
        except ConfiniumError as exc:
            computed, error = None, f"{type(exc).__name__}: {exc}"
        passed = computed is not None and _passes(expected, computed, rtol)
        if not passed:
            logger.warning("selftest %s failed: expected %s, got %s", name, expected, computed if error is None else error)
        rows.append({"name": name, "expected": expected, "computed": computed, "rtol": rtol,
                     "pass": passed, "error": error})
    return rows
