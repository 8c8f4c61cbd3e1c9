"""Bound states by spectral elements and, for closed-form kinds, by shooting.

The matrix route diagonalizes ``W^1/2 H W^-1/2``, the Hamiltonian made
symmetric by the square roots of the quadrature weights, with LAPACK
(Householder tridiagonalization followed by a tridiagonal eigensolver).
LAPACK eigenvalues carry an error of order ``eps * ||H||``; the lowest
levels are then re-diagonalized in the span of the computed vectors, with
the kinetic term summed as the positive form ``1/2 integral psi'^2``
(a Rayleigh-Ritz step free of the cancellation inside ``H psi``).
The shooting route finds zeros of the closed-form regular solution at the
wall with Brent's method and serves as an independent check.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq

from .errors import (AssemblyError, BracketError, ConvergenceError, NumericError,
                     ParameterError, PartialResultError, UnsupportedError)
from .grid import RadialGrid, build_grid
from .logger import record_event
from .model import (CLOSED_FORM_KINDS, DEFAULT_POLICY, Domain, StateSpec, SystemSpec,
                    TruncationPolicy, boundary_function, initial_extent, potential_split,
                    solve_domain, truncated_domain)

logger = logging.getLogger(__name__)

NODE_FLOOR = 1e-10
EIGEN_DRIVER = "evr"

__all__ = [
    "Eigenstate", "TruncationPolicy", "adapt_domain", "assemble_hamiltonian", "bracket_around",
    "build_grid", "count_nodes", "energy_ladder", "sample_potential", "shoot_energy",
    "solve_bound_states",
]


@dataclass(frozen=True, eq=False)
class Eigenstate:
    energy: float
    psi: np.ndarray
    node_count: int
    norm_residual: float
    system: SystemSpec
    state: StateSpec
    grid: RadialGrid
    domain: Domain

    @property
    def label(self) -> str:
        return self.state.label

    def overlap(self, other: "Eigenstate") -> float:
        if other.grid is not self.grid:
            raise ParameterError("states live on different grids")
        return self.grid.inner(self.psi, other.psi)


def sample_potential(sys: SystemSpec, grid: RadialGrid) -> Tuple[np.ndarray, np.ndarray]:
    """(v, v_c) at the interior nodes.

    A node shared by two elements across a discontinuity gets the
    weight-averaged one-sided values of its two elements.
    """
    v, vc = potential_split(sys, grid.nodes)
    v = np.array(v, dtype=float)
    vc = np.array(vc, dtype=float)
    for i in grid.breakpoint_index:
        frac = grid.below_fraction[i]
        v_in, vc_in = potential_split(sys, grid.nodes[i], from_below=True)
        v[i] = frac * v_in + (1.0 - frac) * v[i]
        vc[i] = frac * vc_in + (1.0 - frac) * vc[i]
    return v, vc


def centrifugal(sys: SystemSpec, grid: RadialGrid) -> np.ndarray:
    if not sys.is_radial or sys.ell == 0:
        return np.zeros(grid.size)
    return sys.ell * (sys.ell + 1) / (2.0 * grid.nodes ** 2)


def potential_diagonal(sys: SystemSpec, grid: RadialGrid) -> np.ndarray:
    """Centrifugal plus total potential at the interior nodes."""
    v, vc = sample_potential(sys, grid)
    diagonal = centrifugal(sys, grid) + v + vc
    if not np.all(np.isfinite(diagonal)):
        bad = grid.nodes[~np.isfinite(diagonal)]
        raise AssemblyError(f"non-finite potential at {bad.size} node(s), first at r={bad[0]:.6g}",
                            {"nodes": bad[:10].tolist()})
    return diagonal


def assemble_hamiltonian(sys: SystemSpec, grid: RadialGrid) -> np.ndarray:
    diagonal = potential_diagonal(sys, grid)
    scale = 1.0 / np.sqrt(grid.weights)
    h = 0.5 * grid.stiffness * scale[:, None] * scale[None, :]
    h = 0.5 * (h + h.T)
    h[np.diag_indices_from(h)] += diagonal
    return h


def _ritz(sys: SystemSpec, grid: RadialGrid, columns: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Re-diagonalize H in the span of ``columns`` (symmetric-form eigenvectors)."""
    psi = columns / np.sqrt(grid.weights)[:, None]
    weighted = psi * grid.weights[:, None]
    projected = 0.5 * grid.gradient_form(psi, psi) + psi.T @ (potential_diagonal(sys, grid)[:, None] * weighted)
    overlap = psi.T @ weighted
    energies, mixing = eigh(0.5 * (projected + projected.T), 0.5 * (overlap + overlap.T))
    return energies, columns @ mixing


@lru_cache(maxsize=256)
def _spectrum(sys: SystemSpec, dom: Domain, grid_n: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    grid = build_grid(dom, grid_n)
    if count > grid.size:
        raise ParameterError(f"requested {count} states from a grid of {grid.size} nodes")
    h = assemble_hamiltonian(sys, grid)
    _, vectors = eigh(h, subset_by_index=[0, count - 1], driver=EIGEN_DRIVER)
    energies, vectors = _ritz(sys, grid, vectors)
    energies.setflags(write=False)
    vectors.setflags(write=False)
    return energies, vectors


def _levels(sys: SystemSpec, dom: Domain, grid_n: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    size = build_grid(dom, grid_n).size
    depth = min(max(count, 6), size) if count <= size else count
    energies, vectors = _spectrum(sys, dom, grid_n, depth)
    return energies[:count], vectors[:, :count]


def count_nodes(psi: np.ndarray) -> int:
    """Strict sign changes, ignoring samples lost in the decaying tails."""
    peak = np.max(np.abs(psi))
    if peak == 0:
        return 0
    significant = psi[np.abs(psi) > NODE_FLOOR * peak]
    significant = np.where(significant == 0.0, 1e-300, significant)
    return int(np.count_nonzero(np.signbit(significant[1:]) != np.signbit(significant[:-1])))


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(psi))
    first = psi[np.flatnonzero(np.abs(psi) > NODE_FLOOR * peak)[0]]
    return -psi if first < 0 else psi


def _eigenstate(sys: SystemSpec, dom: Domain, grid: RadialGrid, energy: float,
                column: np.ndarray, index: int) -> Eigenstate:
    psi = column / np.sqrt(grid.weights)
    psi = _fix_sign(psi / math.sqrt(grid.inner(psi, psi)))
    psi.setflags(write=False)
    state = StateSpec(sys.kind, index, sys.ell if sys.is_radial else 0)
    nodes = count_nodes(psi)
    if nodes != index:
        logger.warning("%s %s: %d nodes counted for n_index %d", sys.describe(), state.label, nodes, index)
        raise NumericError(f"{sys.describe()} {state.label}: {nodes} nodes counted for n_index {index}",
                           {"nodes": nodes, "n_index": index, "energy": float(energy), "grid_nodes": grid.size})
    return Eigenstate(
        energy=float(energy),
        psi=psi,
        node_count=nodes,
        norm_residual=abs(grid.inner(psi, psi) - 1.0),
        system=sys,
        state=state,
        grid=grid,
        domain=dom,
    )


def adapt_domain(sys: SystemSpec, st: StateSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> Domain:
    """Grow the truncation radius until the target eigenvalue settles.

    A target at or above the plateau of a penetrable system is not bound.
    It never settles; if it is still above the plateau on the last radius,
    ``PartialResultError`` carries the bound levels found there.
    """
    if sys.is_hard:
        raise ParameterError(f"{sys.describe()} has a hard outer wall; nothing to adapt")

    plateau = sys.plateau
    extent = initial_extent(sys, policy)
    trace: List[Tuple[float, float]] = []
    previous: Optional[float] = None
    energies = np.empty(0)
    bound = False

    for round_number in range(1, policy.max_rounds + 1):
        dom = truncated_domain(sys, extent)
        energies, _ = _levels(sys, dom, policy.grid_n, st.n_index + 1)
        energy = float(energies[st.n_index])
        bound = plateau is None or energy < plateau
        trace.append((extent, energy))
        logger.debug("adapt %s %s round %d: R=%.6g E=%.15g", sys.describe(), st.label, round_number, extent, energy)

        if bound and previous is not None and abs(energy - previous) <= policy.energy_tol * max(1.0, abs(energy)):
            return dom
        previous = energy if bound else None
        extent *= policy.growth

    if not bound:
        found = [float(e) for e in energies if e < plateau]
        raise PartialResultError(
            f"{sys.describe()} {st.label}: level {st.n_index} lies above the plateau {plateau}; "
            f"{len(found)} bound", found)
    raise ConvergenceError(
        f"{sys.describe()} {st.label}: eigenvalue not settled after {policy.max_rounds} rounds", trace)


def _final_domain(sys: SystemSpec, count: int, policy: TruncationPolicy) -> Domain:
    dom = solve_domain(sys, policy)
    if not dom.truncated:
        return dom
    ell = sys.ell if sys.is_radial else 0
    try:
        return adapt_domain(sys, StateSpec(sys.kind, count - 1, ell), policy)
    except PartialResultError as exc:
        if not exc.found:
            raise
        return adapt_domain(sys, StateSpec(sys.kind, len(exc.found) - 1, ell), policy)


def energy_ladder(sys: SystemSpec, count: int, policy: TruncationPolicy = DEFAULT_POLICY) -> List[float]:
    if count < 1:
        raise ParameterError("count must be at least 1")
    dom = _final_domain(sys, count, policy)
    energies, _ = _levels(sys, dom, policy.grid_n, count)
    return [float(e) for e in energies]


def solve_bound_states(sys: SystemSpec, count: int, policy: TruncationPolicy = DEFAULT_POLICY) -> List[Eigenstate]:
    """The ``count`` lowest bound states of ``sys`` at its angular momentum."""
    if count < 1:
        raise ParameterError("count must be at least 1")

    dom = _final_domain(sys, count, policy)
    grid = build_grid(dom, policy.grid_n)
    energies, vectors = _levels(sys, dom, policy.grid_n, count)

    plateau = sys.plateau
    states = []
    for index in range(count):
        if plateau is not None and energies[index] >= plateau:
            break
        states.append(_eigenstate(sys, dom, grid, energies[index], vectors[:, index], index))

    record_event("solve", sys.describe(), {
        "count": count,
        "domain": [dom.lo, dom.hi],
        "nodes": grid.size,
        "energies": [s.energy for s in states],
    })
    if len(states) < count:
        raise PartialResultError(
            f"{sys.describe()}: only {len(states)} of {count} requested states lie below {plateau}", states)
    return states


def bracket_around(energy: float, rel: float = 1e-4, floor: float = 1e-6) -> Tuple[float, float]:
    half = max(rel * abs(energy), floor)
    return energy - half, energy + half


def shoot_energy(sys: SystemSpec, st: StateSpec, bracket: Tuple[float, float], tol: float = 1e-12) -> float:
    """Eigenvalue as the root of the closed-form solution at the wall."""
    if sys.kind not in CLOSED_FORM_KINDS or not sys.is_hard:
        raise UnsupportedError(f"shooting needs a hard-walled closed-form system, got {sys.describe()}")
    sys = sys.for_state(st)

    def at_wall(energy: float) -> float:
        return boundary_function(sys, st, energy)

    lo, hi = bracket
    f_lo, f_hi = at_wall(lo), at_wall(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(f"no sign change of the wall value on [{lo}, {hi}]", (lo, hi), (f_lo, f_hi))

    root, info = brentq(at_wall, lo, hi, xtol=tol, maxiter=200, full_output=True, disp=False)
    if not info.converged:
        raise NumericError(f"Brent iteration stopped: {info.flag}", {"iterations": info.iterations, "root": root})
    logger.debug("shoot %s %s: E=%.15g after %d iterations", sys.describe(), st.label, root, info.iterations)
    record_event("shoot", sys.describe(), {"state": st.label, "energy": root, "iterations": info.iterations})
    return float(root)
