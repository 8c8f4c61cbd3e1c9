"""Gauss-Lobatto spectral-element discretization of a 1D domain.

Every element of the domain (the stretches between its walls, breakpoints
and knots) is cut into sub-elements of moderate Lobatto order, so that
``grid_n`` sets the resolution per element and not the polynomial degree;
the operator norm then grows like ``order^2 * grid_n^2`` instead of
``grid_n^4``. Neighbouring sub-elements share their boundary node. A dense
span (a steep barrier) gets twice the sub-elements at half the order.

The second-derivative operator is the weak (stiffness) form
``d2 = -W^-1 S`` with lumped Lobatto weights ``W``, so that ``W d2`` is
exactly symmetric, and ``S = G^T diag(g) G`` with ``G`` the derivative at
every quadrature point of every sub-element. Both end nodes are removed
(Dirichlet reduction); decay truncations are treated as zeros of the same
kind. The lower end keeps the data needed for integrands that do not vanish
there (the radial origin of an s state).
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import eval_legendre, roots_jacobi

from .errors import ParameterError
from .model import Domain

logger = logging.getLogger(__name__)

MIN_ORDER = 16
SUB_ORDER = 32


@dataclass(frozen=True)
class Element:
    lo: float
    hi: float
    order: int
    pieces: int = 1
    cluster_scale: Optional[float] = None

    @property
    def mapping(self) -> str:
        return "affine" if self.cluster_scale is None else "algebraic"

    @property
    def size(self) -> int:
        return self.order * self.pieces

    def map(self, xi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Physical points and Jacobian dr/dxi for reference points in [-1, 1]."""
        span = self.hi - self.lo
        if self.cluster_scale is None:
            return self.lo + 0.5 * span * (xi + 1.0), np.full_like(xi, 0.5 * span)
        scale = self.cluster_scale
        c = 2.0 * scale / span
        r = self.lo + scale * (1.0 + xi) / (1.0 - xi + c)
        jac = scale * (2.0 + c) / (1.0 - xi + c) ** 2
        return r, jac

    def piece(self, index: int, xi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Points and Jacobian of sub-element ``index``, cut evenly in the reference coordinate."""
        a = -1.0 + 2.0 * index / self.pieces
        b = -1.0 + 2.0 * (index + 1) / self.pieces
        local = a + 0.5 * (b - a) * (xi + 1.0)
        local[0], local[-1] = a, b
        r, jac = self.map(local)
        if index == 0:
            r[0] = self.lo
        if index == self.pieces - 1:
            r[-1] = self.hi
        return r, jac * (0.5 * (b - a))


@dataclass(frozen=True, eq=False)
class RadialGrid:
    nodes: np.ndarray
    weights: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    stiffness: np.ndarray
    gradient: np.ndarray
    gradient_weights: np.ndarray
    elements: Tuple[Element, ...]
    full_nodes: np.ndarray
    full_weights: np.ndarray
    breakpoint_index: Tuple[int, ...]
    below_fraction: np.ndarray
    lo_d1: np.ndarray
    lo_d2: np.ndarray
    lo_coupling: np.ndarray

    def __post_init__(self) -> None:
        for name in ("nodes", "weights", "d1", "d2", "stiffness", "gradient", "gradient_weights",
                     "full_nodes", "full_weights", "below_fraction", "lo_d1", "lo_d2", "lo_coupling"):
            getattr(self, name).setflags(write=False)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def total_weight(self) -> float:
        return float(self.full_weights.sum())

    @property
    def lo(self) -> float:
        return float(self.full_nodes[0])

    @property
    def lo_weight(self) -> float:
        return float(self.full_weights[0])

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.dot(self.weights, f * g))

    def gradient_form(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """``integral f' g'`` for node values (vectors or column blocks), summed term by term."""
        gf = self.gradient @ f
        gg = gf if g is f else self.gradient @ g
        if gf.ndim == 1:
            return np.dot(self.gradient_weights, gf * gg)
        return gf.T @ (self.gradient_weights[:, None] * gg)


@lru_cache(maxsize=16)
def lobatto_reference(order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lobatto points, weights and collocation derivative on [-1, 1]."""
    interior, _ = roots_jacobi(order - 1, 1.0, 1.0)
    xi = np.concatenate(([-1.0], interior, [1.0]))
    pn = eval_legendre(order, xi)
    weights = 2.0 / (order * (order + 1) * pn ** 2)

    diff = xi[:, None] - xi[None, :]
    np.fill_diagonal(diff, 1.0)
    deriv = (pn[:, None] / pn[None, :]) / diff
    np.fill_diagonal(deriv, 0.0)
    np.fill_diagonal(deriv, -deriv.sum(axis=1))

    for arr in (xi, weights, deriv):
        arr.setflags(write=False)
    return xi, weights, deriv


def element_layout(n_per_element: int) -> Tuple[int, int]:
    """(Lobatto order, sub-element count) giving about ``n_per_element`` intervals."""
    pieces = -(-n_per_element // SUB_ORDER)
    return -(-n_per_element // pieces), pieces


def _elements(dom: Domain, n_per_element: int) -> Tuple[Element, ...]:
    order, pieces = element_layout(n_per_element)
    edges = dom.element_edges()
    elements = []
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        local_order, count = order, pieces
        if dom.dense_span is not None and dom.dense_span[0] <= lo and hi <= dom.dense_span[1]:
            local_order, count = order // 2, 2 * pieces
        last = i == len(edges) - 2
        scale = dom.cluster_scale if last else None
        elements.append(Element(lo, hi, local_order, count, scale))
    return tuple(elements)


@lru_cache(maxsize=4)
def build_grid(dom: Domain, n_per_element: int) -> RadialGrid:
    if n_per_element < MIN_ORDER:
        raise ParameterError(f"n_per_element must be at least {MIN_ORDER}, got {n_per_element}")
    if dom.hi <= dom.lo:
        raise ParameterError(f"degenerate domain [{dom.lo}, {dom.hi}]")

    elements = _elements(dom, n_per_element)
    total = sum(e.size for e in elements) + 1
    points = sum(e.pieces * (e.order + 1) for e in elements)
    r = np.empty(total)
    w = np.zeros(total)
    stiff = np.zeros((total, total))
    weighted_d1 = np.zeros((total, total))
    gradient = np.zeros((points, total))
    gradient_weights = np.empty(points)
    lo_d2 = np.zeros(total)
    from_below = np.zeros(total)

    offset = 0
    row = 0
    for element in elements:
        xi, omega, deriv = lobatto_reference(element.order)
        width = element.order + 1
        for index in range(element.pieces):
            x, jac = element.piece(index, xi.copy())
            block = slice(offset, offset + width)
            local_w = omega * jac
            grad = deriv / jac[:, None]

            r[block] = x
            w[block] += local_w
            stiff[block, block] += grad.T @ (local_w[:, None] * grad)
            weighted_d1[block, block] += local_w[:, None] * grad
            gradient[row:row + width, block] = grad
            gradient_weights[row:row + width] = local_w
            if offset == 0:
                lo_d2[block] = (grad @ grad)[0]
            offset += element.order
            row += width
        from_below[offset] += local_w[-1]

    d1_full = weighted_d1 / w[:, None]
    d2_full = -stiff / w[:, None]

    keep = slice(1, total - 1)
    nodes = r[keep].copy()
    breakpoints = tuple(int(np.flatnonzero(nodes == bp)[0]) for bp in dom.breakpoints)

    grid = RadialGrid(
        nodes=nodes,
        weights=w[keep].copy(),
        d1=d1_full[keep, keep].copy(),
        d2=d2_full[keep, keep].copy(),
        stiffness=stiff[keep, keep].copy(),
        gradient=gradient[:, keep].copy(),
        gradient_weights=gradient_weights,
        elements=elements,
        full_nodes=r,
        full_weights=w,
        breakpoint_index=breakpoints,
        below_fraction=(from_below / w)[keep].copy(),
        lo_d1=d1_full[0, keep].copy(),
        lo_d2=lo_d2[keep].copy(),
        lo_coupling=d2_full[keep, 0].copy(),
    )
    logger.debug("grid on [%g, %g]: %d elements, %d sub-elements, %d interior nodes",
                 dom.lo, dom.hi, len(elements), sum(e.pieces for e in elements), grid.size)
    return grid
