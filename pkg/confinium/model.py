"""Catalog of confined quantum systems.

Seven system kinds share one radial (or 1D) Schrodinger problem,
``-1/2 u'' + l(l+1)/(2 r^2) u + (v + v_c) u = E u``, and differ in the
interior potential ``v`` and the confinement ``v_c``:

=======  ==========================  =====================================
kind     v(r)                        v_c(r)
=======  ==========================  =====================================
CHO1D    omega^2 x^2 / 2             infinite wall at |x| > x_c
CHO3D    omega^2 r^2 / 2             infinite wall at r > r_c
CHA      -1/r                        infinite wall at r > r_c
SCHA     -1/r                        infinite outside (r_a, r_b)
HICHA    -1/r                        (r/r_c)^k
SPCHA    -1/r                        total potential is V0 for r >= r_c
HPCHA    -1/r                        U0 / (exp(w (1 - r/r_c)) + 1)
=======  ==========================  =====================================

Free limits are ``x_c = inf`` / ``r_c = inf`` (and ``U0 = 0`` for HPCHA).
Infinite walls never enter an integrand: they are domain boundaries.

The homogeneous cavity has ``v(r_c) + v_c(r_c) = 1 - 1/r_c`` for every k. The
closed form of its ``<v v_c>`` term is sometimes quoted with exponent 2 in
place of k; here k is used throughout.

The 3D oscillator is sometimes written ``omega r^2 / 2``. That form agrees
with ``omega^2 r^2 / 2`` only at ``omega = 1`` (the tabulated frequency);
the squared frequency is used here, as in the 1D case and in the closed-form
Kummer solution.
"""
import logging
import math
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import mpmath
import numpy as np
from scipy.special import expit, jv

from .errors import EvaluationError, ParameterError, UnsupportedError
from .specfun import KummerParams, scaled_kummer_m

logger = logging.getLogger(__name__)

INF = math.inf
ORBITAL_LETTERS = "spdfghik"


class Kind(str, Enum):
    CHO1D = "cho1d"
    CHO3D = "cho3d"
    CHA = "cha"
    SCHA = "scha"
    HICHA = "hicha"
    SPCHA = "spcha"
    HPCHA = "hpcha"


class Confinement(str, Enum):
    FREE = "free"
    HARD = "hard"
    SMOOTH = "smooth"
    PENETRABLE = "penetrable"


class Boundary(str, Enum):
    DIRICHLET_WALL = "dirichlet_wall"
    DECAY_TRUNCATION = "decay_truncation"


COULOMB_KINDS = frozenset({Kind.CHA, Kind.SCHA, Kind.HICHA, Kind.SPCHA, Kind.HPCHA})
CLOSED_FORM_KINDS = frozenset({Kind.CHO1D, Kind.CHO3D, Kind.CHA})

# Parameters each kind carries, with defaults (None means required).
KIND_PARAMETERS: Dict[Kind, Dict[str, Optional[float]]] = {
    Kind.CHO1D: {"omega": 1.0, "x_c": INF},
    Kind.CHO3D: {"omega": 1.0, "r_c": INF},
    Kind.CHA: {"r_c": INF},
    Kind.SCHA: {"r_a": None, "r_b": None},
    Kind.HICHA: {"r_c": INF, "k": 2.0},
    Kind.SPCHA: {"V0": None, "r_c": None},
    Kind.HPCHA: {"r_c": INF, "U0": 10.0, "w": 1000.0},
}
PARAMETER_NAMES = ("omega", "x_c", "r_c", "r_a", "r_b", "k", "V0", "U0", "w")


def parse_real(value: Any) -> float:
    """Accept floats, ints and strings, including the literal ``inf``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "∞"):
            return INF
        try:
            return float(text)
        except ValueError:
            raise ParameterError(f"Not a real number: {value!r}") from None
    if isinstance(value, bool):
        raise ParameterError(f"Not a real number: {value!r}")
    return float(value)


def format_real(value: float) -> str:
    return "inf" if value == INF else repr(float(value))


@dataclass(frozen=True)
class SystemSpec:
    kind: Kind
    omega: Optional[float] = None
    x_c: Optional[float] = None
    r_c: Optional[float] = None
    r_a: Optional[float] = None
    r_b: Optional[float] = None
    k: Optional[float] = None
    V0: Optional[float] = None
    U0: Optional[float] = None
    w: Optional[float] = None
    ell: int = 0

    def __post_init__(self) -> None:
        try:
            kind = Kind(self.kind)
        except ValueError:
            raise ParameterError(f"Unknown system kind: {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)

        relevant = KIND_PARAMETERS[kind]
        for name in PARAMETER_NAMES:
            value = getattr(self, name)
            if name not in relevant:
                if value is not None:
                    raise ParameterError(f"{kind.value} does not take parameter {name}")
                continue
            if value is None:
                raise ParameterError(f"{kind.value} requires parameter {name}")
            object.__setattr__(self, name, parse_real(value))

        if isinstance(self.ell, bool) or int(self.ell) != self.ell or self.ell < 0:
            raise ParameterError(f"ell must be a non-negative integer, got {self.ell!r}")
        object.__setattr__(self, "ell", int(self.ell))
        if kind is Kind.CHO1D and self.ell != 0:
            raise ParameterError("cho1d has no angular momentum; ell must be 0")

        self._check_ranges()

    def _check_ranges(self) -> None:
        def positive(name, allow_inf=False):
            value = getattr(self, name)
            if math.isnan(value) or value <= 0 or (value == INF and not allow_inf):
                raise ParameterError(f"{name} must be positive{' or inf' if allow_inf else ' and finite'}, got {value}")

        kind = self.kind
        if kind in (Kind.CHO1D, Kind.CHO3D):
            positive("omega")
        if kind is Kind.CHO1D:
            positive("x_c", allow_inf=True)
        if kind in (Kind.CHO3D, Kind.CHA, Kind.HICHA, Kind.SPCHA, Kind.HPCHA):
            positive("r_c", allow_inf=True)
        if kind is Kind.SCHA:
            positive("r_a")
            positive("r_b")
            if not self.r_a < self.r_b:
                raise ParameterError(f"shell requires r_a < r_b, got {self.r_a} >= {self.r_b}")
        if kind is Kind.HICHA and not (1.0 < self.k < INF):
            raise ParameterError(f"k must be a finite real > 1, got {self.k}")
        if kind is Kind.SPCHA and not self.V0 >= 0:
            raise ParameterError(f"V0 must be >= 0 or inf, got {self.V0}")
        if kind is Kind.SPCHA and self.r_c == INF:
            raise ParameterError("spcha requires a finite barrier radius r_c")
        if kind is Kind.HPCHA:
            if not 0 <= self.U0 < INF:
                raise ParameterError(f"U0 must be a finite real >= 0, got {self.U0}")
            positive("w")

    @classmethod
    def make(cls, kind, **params) -> "SystemSpec":
        """Build a system filling the defaults of ``kind`` for omitted parameters."""
        kind = Kind(kind)
        values = {name: default for name, default in KIND_PARAMETERS[kind].items() if default is not None}
        values.update({name: value for name, value in params.items() if value is not None})
        return cls(kind=kind, **values)

    @property
    def is_radial(self) -> bool:
        return self.kind is not Kind.CHO1D

    @property
    def is_coulomb(self) -> bool:
        return self.kind in COULOMB_KINDS

    @property
    def confinement(self) -> Confinement:
        kind = self.kind
        if kind is Kind.CHO1D:
            return Confinement.HARD if self.x_c < INF else Confinement.FREE
        if kind in (Kind.CHO3D, Kind.CHA):
            return Confinement.HARD if self.r_c < INF else Confinement.FREE
        if kind is Kind.SCHA:
            return Confinement.HARD
        if kind is Kind.HICHA:
            return Confinement.SMOOTH if self.r_c < INF else Confinement.FREE
        if kind is Kind.SPCHA:
            return Confinement.HARD if self.V0 == INF else Confinement.PENETRABLE
        if self.r_c == INF or self.U0 == 0:
            return Confinement.FREE
        return Confinement.PENETRABLE

    @property
    def is_hard(self) -> bool:
        return self.confinement is Confinement.HARD

    @property
    def plateau(self) -> Optional[float]:
        """Energy above which states are no longer bound, or None when all are."""
        confinement = self.confinement
        if confinement is Confinement.PENETRABLE:
            return self.V0 if self.kind is Kind.SPCHA else self.U0
        if confinement is Confinement.FREE and self.is_coulomb:
            return 0.0
        return None

    @property
    def barrier_radius(self) -> Optional[float]:
        if self.kind is Kind.SPCHA and self.V0 < INF:
            return self.r_c
        return None

    def parameters(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in KIND_PARAMETERS[self.kind]}

    def replace(self, **changes) -> "SystemSpec":
        return replace(self, **changes)

    def for_state(self, st: "StateSpec") -> "SystemSpec":
        if st.kind is not self.kind:
            raise ParameterError(f"state {st.label} belongs to {st.kind.value}, not {self.kind.value}")
        if not self.is_radial or st.ell == self.ell:
            return self
        return replace(self, ell=st.ell)

    def describe(self) -> str:
        parts = [self.kind.value]
        parts += [f"{name}={format_real(value)}" for name, value in self.parameters().items()]
        if self.is_radial:
            parts.append(f"ell={self.ell}")
        return " ".join(parts)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        for name, value in self.parameters().items():
            data[name] = "inf" if value == INF else value
        if self.is_radial:
            data["ell"] = self.ell
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SystemSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"Unknown system fields: {sorted(unknown)}")
        if "kind" not in data:
            raise ParameterError("System definition lacks 'kind'")
        values = {name: parse_real(value) for name, value in data.items() if name in PARAMETER_NAMES}
        return cls(kind=Kind(data["kind"]), ell=int(data.get("ell", 0)), **values)


@dataclass(frozen=True)
class StateSpec:
    kind: Kind
    n_index: int
    ell: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.n_index < 0 or self.ell < 0:
            raise ParameterError(f"quantum numbers must be non-negative: n_index={self.n_index}, ell={self.ell}")
        if self.kind is Kind.CHO1D and self.ell != 0:
            raise ParameterError("cho1d states carry no angular momentum")

    @property
    def parity(self) -> Optional[str]:
        if self.kind is not Kind.CHO1D:
            return None
        return "even" if self.n_index % 2 == 0 else "odd"

    @property
    def principal(self) -> int:
        if self.kind is Kind.CHO3D:
            return self.n_index + 1
        return self.n_index + self.ell + 1

    @property
    def label(self) -> str:
        if self.kind is Kind.CHO1D:
            return f"n={self.n_index}"
        letter = ORBITAL_LETTERS[self.ell] if self.ell < len(ORBITAL_LETTERS) else f"[l={self.ell}]"
        return f"{self.principal}{letter}"

    @classmethod
    def parse(cls, kind, text: str) -> "StateSpec":
        """Parse ``n=0``, ``1s``, ``2p``, ``3d`` or ``nr=1,l=2``."""
        kind = Kind(kind)
        raw = text.strip().lower().replace(" ", "")
        try:
            if raw.startswith("nr=") or "l=" in raw:
                items = dict(part.split("=", 1) for part in raw.split(","))
                return cls(kind, int(items.get("nr", items.get("n", 0))), int(items.get("l", 0)))
            if raw.startswith("n="):
                return cls(kind, int(raw[2:]), 0)
            digits = raw.rstrip(ORBITAL_LETTERS)
            letter = raw[len(digits):]
            if kind is Kind.CHO1D or len(letter) != 1 or not digits:
                raise ValueError(raw)
            principal = int(digits)
            ell = ORBITAL_LETTERS.index(letter)
            n_index = principal - 1 if kind is Kind.CHO3D else principal - ell - 1
            return cls(kind, n_index, ell)
        except (ValueError, ParameterError):
            raise ParameterError(f"Cannot parse state {text!r} for {kind.value}") from None


@dataclass(frozen=True)
class Domain:
    lo: float
    hi: float
    lo_boundary: Boundary = Boundary.DIRICHLET_WALL
    hi_boundary: Boundary = Boundary.DIRICHLET_WALL
    breakpoints: Tuple[float, ...] = ()
    knots: Tuple[float, ...] = ()
    dense_span: Optional[Tuple[float, float]] = None
    cluster_scale: Optional[float] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi <= self.lo:
            raise ParameterError(f"degenerate domain [{self.lo}, {self.hi}]")
        for point in self.breakpoints + self.knots:
            if not self.lo < point < self.hi:
                raise ParameterError(f"interior point {point} outside ({self.lo}, {self.hi})")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def truncated(self) -> bool:
        return self.hi_boundary is Boundary.DECAY_TRUNCATION

    def element_edges(self) -> Tuple[float, ...]:
        return (self.lo,) + tuple(sorted(set(self.breakpoints + self.knots))) + (self.hi,)


@dataclass(frozen=True)
class TruncationPolicy:
    initial_rmax: float = 30.0
    growth: float = 1.5
    energy_tol: float = 1e-9
    max_rounds: int = 8
    grid_n: int = 256

    def __post_init__(self) -> None:
        if not self.growth > 1:
            raise ParameterError(f"growth must exceed 1, got {self.growth}")
        if not (self.energy_tol > 0 and self.initial_rmax > 0):
            raise ParameterError("tolerances and initial_rmax must be positive")
        if self.max_rounds < 1:
            raise ParameterError("max_rounds must be at least 1")
        if self.grid_n < 16:
            raise ParameterError(f"grid_n must be at least 16, got {self.grid_n}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT_POLICY = TruncationPolicy()


def _shaped(template, values):
    if np.ndim(template) == 0:
        return float(values)
    return values


def _radius(sys: SystemSpec, r) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if sys.is_radial and np.any(arr < 0):
        raise ParameterError("radial coordinate must be non-negative")
    return arr


def interior_potential(sys: SystemSpec, r):
    """The unconfined potential v(r)."""
    arr = _radius(sys, r)
    if sys.kind in (Kind.CHO1D, Kind.CHO3D):
        return _shaped(r, 0.5 * sys.omega ** 2 * arr ** 2)
    if np.any(arr == 0):
        raise EvaluationError("Coulomb potential evaluated at r = 0")
    return _shaped(r, -1.0 / arr)


def confining_potential(sys: SystemSpec, r):
    """The confinement v_c(r); infinite outside hard walls."""
    arr = _radius(sys, r)
    kind = sys.kind
    if kind is Kind.CHO1D:
        values = np.where(np.abs(arr) > sys.x_c, INF, 0.0)
    elif kind in (Kind.CHO3D, Kind.CHA):
        values = np.where(arr > sys.r_c, INF, 0.0)
    elif kind is Kind.SCHA:
        values = np.where((arr < sys.r_a) | (arr > sys.r_b), INF, 0.0)
    elif kind is Kind.HICHA:
        values = np.zeros_like(arr) if sys.r_c == INF else (arr / sys.r_c) ** sys.k
    elif kind is Kind.SPCHA:
        if sys.V0 == INF:
            values = np.where(arr > sys.r_c, INF, 0.0)
        else:
            with np.errstate(divide="ignore"):
                values = np.where(arr < sys.r_c, 0.0, sys.V0 + 1.0 / np.maximum(arr, sys.r_c))
    else:
        if sys.r_c == INF:
            values = np.zeros_like(arr)
        else:
            values = sys.U0 * expit(sys.w * (arr / sys.r_c - 1.0))
    return _shaped(r, values)


def potential_split(sys: SystemSpec, r, from_below: bool = False):
    """Split of the total potential into (interior part, confining part).

    Hard walls contribute zero inside the domain and inf outside. The sharp barrier is
    split by region: ``-1/r`` below r_c and ``V0`` from r_c on. At a node
    sitting exactly on r_c, ``from_below=True`` selects the inner limit.
    """
    arr = _radius(sys, r)
    if sys.barrier_radius is not None:
        if np.any(arr == 0):
            raise EvaluationError("Coulomb potential evaluated at r = 0")
        inside = arr <= sys.r_c if from_below else arr < sys.r_c
        with np.errstate(divide="ignore"):
            v = np.where(inside, -1.0 / arr, 0.0)
        vc = np.where(inside, 0.0, sys.V0)
        return _shaped(r, v), _shaped(r, vc)

    v = np.asarray(interior_potential(sys, arr), dtype=float)
    if sys.confinement is Confinement.FREE:
        vc = np.zeros_like(v)
    else:
        vc = np.asarray(confining_potential(sys, arr), dtype=float)
    return _shaped(r, v), _shaped(r, vc)


def total_potential(sys: SystemSpec, r, from_below: bool = False):
    v, vc = potential_split(sys, r, from_below=from_below)
    return v + vc


def origin_strength(sys: SystemSpec) -> float:
    """Limit of ``r (v + v_c)`` at the origin."""
    return -1.0 if sys.is_coulomb else 0.0


def _cha_regular(ell: int, E: float, r: float) -> float:
    """Regular Coulomb solution R(r) normalized to r**ell at the origin, any E."""
    if r == 0:
        return 1.0 if ell == 0 else 0.0
    if E < 0:
        kappa = math.sqrt(-2.0 * E)
        p = KummerParams(ell + 1.0 - 1.0 / kappa, 2.0 * ell + 2.0, 2.0 * kappa * r)
        return r ** ell * scaled_kummer_m(p, kappa * r)
    if E == 0:
        return (math.sqrt(r) * jv(2 * ell + 1, math.sqrt(8.0 * r)) / r
                * math.factorial(2 * ell + 1) / 2.0 ** (ell + 0.5))
    # Oscillatory continuation through the Coulomb wave function F_l(eta, kr).
    k = math.sqrt(2.0 * E)
    eta = -1.0 / k
    with mpmath.workdps(30):
        f = mpmath.coulombf(ell, eta, k * r)
        c = mpmath.coulombc(ell, eta)
        return float(f / (c * mpmath.mpf(k) ** (ell + 1) * r))


def analytic_wavefunction(sys: SystemSpec, st: StateSpec, E: float, r: float) -> float:
    """Unnormalized closed-form solution regular at the origin.

    CHO1D returns the even or odd solution picked by the state's parity,
    CHO3D and CHA return the radial function R(r) (not u = rR). For CHA with
    E >= 0 the Coulomb-wave continuation is returned, normalized like the
    bound form near the origin.
    """
    if sys.kind not in CLOSED_FORM_KINDS:
        raise UnsupportedError(f"{sys.kind.value} has no closed-form wavefunction")
    r = float(r)
    if sys.kind is Kind.CHO1D:
        omega = sys.omega
        z = omega * r * r
        if st.parity == "even":
            return scaled_kummer_m(KummerParams(0.25 - E / (2 * omega), 0.5, z), z / 2)
        return r * scaled_kummer_m(KummerParams(0.75 - E / (2 * omega), 1.5, z), z / 2)

    if r < 0:
        raise ParameterError("radial coordinate must be non-negative")
    ell = st.ell
    if sys.kind is Kind.CHO3D:
        omega = sys.omega
        z = omega * r * r
        p = KummerParams(0.5 * (ell + 1.5 - E / omega), ell + 1.5, z)
        return r ** ell * scaled_kummer_m(p, z / 2)

    if E < 0:
        return (2.0 * math.sqrt(-2.0 * E)) ** ell * _cha_regular(ell, E, r)
    return _cha_regular(ell, E, r)


def boundary_function(sys: SystemSpec, st: StateSpec, E: float) -> float:
    """Closed-form solution at the wall, continuous in E; zero at eigenvalues."""
    if sys.kind not in CLOSED_FORM_KINDS or not sys.is_hard:
        raise UnsupportedError(f"{sys.describe()} has no finite-wall closed form")
    if sys.kind is Kind.CHO1D:
        return analytic_wavefunction(sys, st, E, sys.x_c)
    if sys.kind is Kind.CHO3D:
        return analytic_wavefunction(sys, st, E, sys.r_c)
    return _cha_regular(st.ell, E, sys.r_c)


def initial_extent(sys: SystemSpec, policy: TruncationPolicy) -> float:
    """Starting truncation radius for systems without an outer wall."""
    if sys.kind in (Kind.CHO1D, Kind.CHO3D):
        return min(policy.initial_rmax, 10.0 / math.sqrt(sys.omega))
    if sys.kind is Kind.HICHA and sys.r_c < INF:
        return min(policy.initial_rmax, sys.r_c * 400.0 ** (1.0 / sys.k))
    if sys.r_c is not None and sys.r_c < INF:
        return max(policy.initial_rmax, sys.r_c + 20.0)
    return policy.initial_rmax


def truncated_domain(sys: SystemSpec, extent: float) -> Domain:
    """Decay-truncated domain of half-width or radius ``extent``."""
    decay = Boundary.DECAY_TRUNCATION
    if sys.kind is Kind.CHO1D:
        return Domain(-extent, extent, decay, decay)
    if not sys.is_coulomb:
        return Domain(0.0, extent, Boundary.DIRICHLET_WALL, decay)

    breakpoints: Tuple[float, ...] = ()
    knots: Tuple[float, ...] = ()
    dense = None
    if sys.barrier_radius is not None:
        breakpoints = (sys.r_c,)
    elif sys.kind is Kind.HPCHA and sys.confinement is Confinement.PENETRABLE:
        half = min(40.0 * sys.r_c / sys.w, 0.5 * sys.r_c)
        knots = (sys.r_c - half, sys.r_c + half)
        dense = knots
    last_start = max((0.0,) + breakpoints + knots)
    scale = min(5.0, (extent - last_start) / 4.0)
    return Domain(0.0, extent, Boundary.DIRICHLET_WALL, decay,
                  breakpoints=breakpoints, knots=knots, dense_span=dense, cluster_scale=scale)


def solve_domain(sys: SystemSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> Domain:
    """Domain on which the eigenproblem is posed.

    Hard walls become Dirichlet ends; everything else starts from a decay
    truncation that ``eigensolve.adapt_domain`` grows until converged.
    """
    if sys.is_hard:
        if sys.kind is Kind.CHO1D:
            return Domain(-sys.x_c, sys.x_c)
        if sys.kind is Kind.SCHA:
            return Domain(sys.r_a, sys.r_b)
        return Domain(0.0, sys.r_c)
    return truncated_domain(sys, initial_extent(sys, policy))
