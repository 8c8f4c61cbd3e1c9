"""Expectation values and the virial-like identities of stationary states.

For an eigenstate of ``H = T + V`` the kinetic and potential variances
coincide and equal ``<T><V> - <TV>``::

    (dT)^2 = (dV)^2 = <T><V> - <TV> = <T><V> - <VT>

and the energy variance ``(dH)^2`` vanishes. The first set is necessary for
a state to be stationary; the second is sufficient. Both are evaluated
here by quadrature on the solver grid.

Variances and cross terms are accumulated in centered form
(``<(T - <T>)^2>`` rather than ``<T^2> - <T>^2``) to keep the cancellation
out of the sums; ``<T^2>`` itself is taken as the norm of ``T psi`` and
cross-checked against ``E (E - 2<V>) + <V^2>``.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .eigensolve import Eigenstate, count_nodes, sample_potential
from .errors import ContractError, ParameterError
from .grid import RadialGrid
from .model import SystemSpec, origin_strength

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-8
IDENTITY_RTOL = 1e-6
VIRIAL_FIELDS = ("dT2", "dV2", "cross1", "cross2")


@dataclass(frozen=True)
class ExpectationSet:
    t: float
    v: float
    t2: float
    v2: float
    tv: float
    vt: float
    v_interior: float
    v_conf: float
    cross_vvc: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class VirialReport:
    dT2: float
    dV2: float
    cross1: float
    cross2: float
    spread: float
    t2_eq6: float
    t2_gap: float
    dH2: float
    energy: float

    def checks(self, t2: float, rtol: float = IDENTITY_RTOL) -> Dict[str, bool]:
        """The identity tests: four-way equality, the T^2 shortcut and zero energy variance."""
        return {
            "spread": self.spread <= rtol * max(1.0, abs(self.dV2)),
            "t2_gap": self.t2_gap <= rtol * max(1.0, abs(t2)),
            "dH2": self.dH2 <= rtol * max(1.0, self.energy ** 2),
        }

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def apply_kinetic(grid: RadialGrid, psi: np.ndarray, ell: int, lo_value: float = 0.0) -> np.ndarray:
    """-1/2 psi'' + l(l+1)/(2 r^2) psi on the grid nodes.

    ``lo_value`` is the function's value at the lower end node, zero for
    anything obeying the wall condition there.
    """
    psi = np.asarray(psi, dtype=float)
    if psi.shape != grid.nodes.shape:
        raise ParameterError(f"samples of length {psi.size} do not match {grid.size} grid nodes")
    out = -0.5 * (grid.d2 @ psi)
    if lo_value:
        out -= 0.5 * lo_value * grid.lo_coupling
    if ell:
        out += ell * (ell + 1) / (2.0 * grid.nodes ** 2) * psi
    return out


def _angular(sys: SystemSpec) -> int:
    return sys.ell if sys.is_radial else 0


def _check_normalized(es: Eigenstate) -> None:
    norm = es.grid.inner(es.psi, es.psi)
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise ContractError(f"state {es.label} is not normalized: |<psi|psi> - 1| = {abs(norm - 1.0):.3g}",
                            {"norm": norm})


def origin_values(sys: SystemSpec, grid: RadialGrid, psi: np.ndarray) -> Optional[Tuple[float, float, float]]:
    """(psi', T psi, V psi) at r = 0 for an s state on a grid starting there.

    ``psi`` vanishes at the origin but ``V psi`` and ``T psi`` of a Coulomb
    s state do not, so every integrand quadratic in them has a finite end
    value there. None when there is no such end.
    """
    if not sys.is_radial or _angular(sys) != 0 or grid.lo != 0.0:
        return None
    slope = float(np.dot(grid.lo_d1, psi))
    return slope, -0.5 * float(np.dot(grid.lo_d2, psi)), origin_strength(sys) * slope


def _moments(sys: SystemSpec, es: Eigenstate) -> Tuple[ExpectationSet, Tuple[float, float, float, float]]:
    _check_normalized(es)
    grid, psi = es.grid, es.psi
    ell = _angular(sys)
    w = grid.weights

    origin = origin_values(sys, grid, psi)
    slope, t0, p0 = origin or (0.0, 0.0, 0.0)
    w0 = grid.lo_weight if origin else 0.0

    v_part, vc_part = sample_potential(sys, grid)
    pot = v_part + vc_part
    t_psi = apply_kinetic(grid, psi, ell)
    density = w * psi * psi

    t = float(np.dot(w, psi * t_psi))
    v = float(np.dot(density, pot))
    hard = sys.is_hard
    # <psi|T f> from the grid plus 1/2 psi'(0) f(0) is <T psi|f>
    moments = ExpectationSet(
        t=t,
        v=v,
        t2=float(np.dot(w, t_psi * t_psi)) + w0 * t0 * t0,
        v2=float(np.dot(density, pot * pot)) + w0 * p0 * p0,
        tv=float(np.dot(w, psi * apply_kinetic(grid, pot * psi, ell, p0))) + 0.5 * slope * p0,
        vt=float(np.dot(w, psi * pot * t_psi)) + w0 * p0 * t0,
        v_interior=float(np.dot(density, v_part)),
        v_conf=0.0 if hard else float(np.dot(density, vc_part)),
        cross_vvc=0.0 if hard else float(np.dot(density, v_part * vc_part)),
    )

    kinetic_dev = t_psi - t * psi
    potential_dev = (pot - v) * psi
    kinetic_at_t = apply_kinetic(grid, potential_dev, ell, p0) - t * potential_dev
    centered = (
        float(np.dot(w, kinetic_dev * kinetic_dev)) + w0 * t0 * t0,
        float(np.dot(w, potential_dev * potential_dev)) + w0 * p0 * p0,
        -(float(np.dot(w, psi * kinetic_at_t)) + 0.5 * slope * p0),
        -(float(np.dot(w, potential_dev * kinetic_dev)) + w0 * p0 * t0),
    )
    return moments, centered


def expectation_set(sys: SystemSpec, es: Eigenstate) -> ExpectationSet:
    return _moments(sys, es)[0]


def t_squared_via_energy(E: float, v: float, v2: float) -> float:
    """<T^2> from the energy and the potential moments, avoiding fourth derivatives."""
    return E * (E - 2.0 * v) + v2


def virial_report(sys: SystemSpec, es: Eigenstate) -> VirialReport:
    moments, (dT2, dV2, cross1, cross2) = _moments(sys, es)
    values = (dT2, dV2, cross1, cross2)
    if not all(math.isfinite(x) for x in values):
        raise ContractError(f"non-finite virial quantities for {es.label}: {values}")

    t2_eq6 = t_squared_via_energy(es.energy, moments.v, moments.v2)
    # dH2 = dT2 + dV2 + (<TV> - <T><V>) + (<VT> - <T><V>)
    dH2 = dT2 + dV2 - cross1 - cross2
    logger.debug("virial %s %s: dT2=%.12g dV2=%.12g dH2=%.3g", sys.describe(), es.label, dT2, dV2, dH2)
    return VirialReport(
        dT2=dT2,
        dV2=dV2,
        cross1=cross1,
        cross2=cross2,
        spread=max(values) - min(values),
        t2_eq6=t2_eq6,
        t2_gap=abs(moments.t2 - t2_eq6),
        dH2=dH2,
        energy=es.energy,
    )


def schwartz_check(sys: SystemSpec, es: Eigenstate) -> Tuple[float, float]:
    """((dT)^2 (dV)^2, |<TV> - <T><V>|^2); equal for eigenstates, lhs >= rhs always."""
    _, (dT2, dV2, cross1, _) = _moments(sys, es)
    return dT2 * dV2, cross1 * cross1


def superpose(a: Eigenstate, b: Eigenstate, coefficient: float) -> Eigenstate:
    """Normalized mixture a + c b of two orthogonal states on the same grid."""
    if a.grid is not b.grid:
        raise ParameterError("states live on different grids")
    grid = a.grid
    psi = a.psi + coefficient * b.psi
    psi = psi / math.sqrt(grid.inner(psi, psi))
    psi.setflags(write=False)
    energy = (a.energy + coefficient ** 2 * b.energy) / (1.0 + coefficient ** 2)
    return Eigenstate(
        energy=energy,
        psi=psi,
        node_count=count_nodes(psi),
        norm_residual=abs(grid.inner(psi, psi) - 1.0),
        system=a.system,
        state=a.state,
        grid=grid,
        domain=a.domain,
    )
