"""Table reproduction against embedded reference values, and parameter sweeps."""
import contextvars
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .eigensolve import solve_bound_states
from .errors import ConfiniumError, ParameterError
from .hasher import Hasher
from .logger import record_event
from .model import (DEFAULT_POLICY, INF, Kind, StateSpec, SystemSpec, TruncationPolicy,
                    format_real, parse_real)
from .observables import VIRIAL_FIELDS, VirialReport, virial_report

logger = logging.getLogger(__name__)

TABLE_IDS = ("I", "II", "III", "IV", "V", "VI", "VII")
QUANTITIES = ("energy",) + VIRIAL_FIELDS
BODY_STATUSES = ("ok", "disputed")
LITERATURE_STATUSES = ("literature", "literature_disputed")
STATUSES = BODY_STATUSES + LITERATURE_STATUSES
DISPUTED_STATUSES = ("disputed", "literature_disputed")
MIN_DIGITS = 3
PARAM_KEYS = {"xc": "x_c", "rc": "r_c", "ra": "r_a", "rb": "r_b", "k": "k",
              "V0": "V0", "U0": "U0", "w": "w", "omega": "omega"}
REFERENCE_COLUMNS = ["table", "state", "param_list", "quantity", "value", "digits", "status"]


@dataclass(frozen=True)
class TableLayout:
    table_id: str
    kind: Kind
    energy_rtol: float
    virial_rtol: float
    atol: float
    literature_rtol: float
    # Size in hartree of the unit printed energies and V0 are given in.
    energy_unit: float = 1.0


LAYOUTS: Dict[str, TableLayout] = {
    "I": TableLayout("I", Kind.CHO1D, 1e-7, 1e-6, 1e-9, 1e-7),
    "II": TableLayout("II", Kind.CHO3D, 1e-7, 1e-6, 1e-9, 1e-7),
    "III": TableLayout("III", Kind.CHA, 1e-7, 1e-6, 1e-9, 1e-7),
    "IV": TableLayout("IV", Kind.SCHA, 1e-6, 1e-6, 1e-9, 1e-6),
    "V": TableLayout("V", Kind.HICHA, 1e-6, 1e-6, 1e-9, 5e-3),
    "VI": TableLayout("VI", Kind.SPCHA, 1e-4, 1e-4, 1e-6, 1e-3, energy_unit=0.5),
    "VII": TableLayout("VII", Kind.HPCHA, 1e-4, 1e-4, 1e-6, 3e-2),
}


@dataclass(frozen=True)
class ReferenceEntry:
    table_id: str
    system: SystemSpec
    state: StateSpec
    quantity: str
    value: float
    digits: int
    status: str = "ok"
    params: str = ""

    @property
    def disputed(self) -> bool:
        return self.status in DISPUTED_STATUSES

    @property
    def literature(self) -> bool:
        return self.status in LITERATURE_STATUSES

    @property
    def resolution(self) -> float:
        """One unit in the last printed digit."""
        if self.value == 0:
            return 0.0
        return 10.0 ** (math.floor(math.log10(abs(self.value))) - self.digits + 1)


@dataclass(frozen=True)
class ComparisonRow:
    reference: ReferenceEntry
    computed: Optional[float]
    abs_err: float
    rel_err: float
    passed: bool
    error: Optional[str] = None

    def to_dict(self) -> Dict:
        ref = self.reference
        return {
            "table": ref.table_id,
            "system": ref.system.to_dict(),
            "state": ref.state.label,
            "params": ref.params,
            "quantity": ref.quantity,
            "reference": ref.value,
            "digits": ref.digits,
            "status": ref.status,
            "computed": self.computed,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "pass": self.passed,
            "error": self.error,
        }


@dataclass(frozen=True)
class SweepPoint:
    param: str
    value: float
    state: StateSpec
    system: Optional[SystemSpec]
    energy: Optional[float] = None
    report: Optional[VirialReport] = None
    error: Optional[str] = None

    def to_dict(self) -> Dict:
        data = {
            "param": self.param,
            "value": self.value,
            "state": self.state.label,
            "system": self.system.to_dict() if self.system is not None else None,
            "energy": self.energy,
            "error": self.error,
        }
        if self.report is not None:
            data.update(self.report.to_dict())
        return data


def _parse_params(table_id: str, text: str) -> Dict[str, float]:
    layout = LAYOUTS[table_id]
    params: Dict[str, float] = {}
    for item in filter(None, text.split(";")):
        key, _, raw = item.partition("=")
        if key not in PARAM_KEYS or not raw:
            raise ParameterError(f"table {table_id}: bad parameter {item!r}")
        value = parse_real(raw)
        if key == "V0" and value < INF:
            value *= layout.energy_unit
        params[PARAM_KEYS[key]] = value
    return params


def _entry(row: Dict[str, str]) -> ReferenceEntry:
    table_id = row["table"].strip()
    if table_id not in LAYOUTS:
        raise ParameterError(f"unknown table {table_id!r}")
    quantity, status = row["quantity"].strip(), row["status"].strip()
    if quantity not in QUANTITIES:
        raise ParameterError(f"unknown quantity {quantity!r}")
    if status not in STATUSES:
        raise ParameterError(f"unknown status {status!r}")
    try:
        value = float(row["value"])
        digits = int(row["digits"])
    except ValueError:
        raise ParameterError(f"unreadable value/digits {row['value']!r}/{row['digits']!r}") from None
    if not math.isfinite(value):
        raise ParameterError(f"non-finite reference value {row['value']!r}")
    if digits < MIN_DIGITS:
        raise ParameterError(f"reference {row['value']} carries only {digits} digits")

    kind = LAYOUTS[table_id].kind
    state = StateSpec.parse(kind, row["state"])
    params = row["param_list"].strip()
    system = SystemSpec.make(kind, ell=state.ell, **_parse_params(table_id, params))
    return ReferenceEntry(table_id, system, state, quantity, value, digits, status, params)


def load_references(path: Optional[str] = None) -> List[ReferenceEntry]:
    """Read reference values from ``path`` or the packaged data file."""
    if path is None:
        source = resources.files("confinium").joinpath("data", "reference_values.csv")
        with resources.as_file(source) as packaged:
            frame = pd.read_csv(packaged, dtype=str, comment="#", skipinitialspace=True)
    else:
        frame = pd.read_csv(path, dtype=str, comment="#", skipinitialspace=True)

    missing = set(REFERENCE_COLUMNS) - set(frame.columns)
    if missing:
        raise ParameterError(f"reference file lacks columns {sorted(missing)}")
    entries = []
    for line, row in enumerate(frame.fillna("").to_dict("records"), start=1):
        try:
            entries.append(_entry(row))
        except ParameterError as exc:
            raise ParameterError(f"reference row {line}: {exc}") from None
    logger.debug("loaded %d reference values", len(entries))
    return entries


def reference_digest(path: Optional[str] = None) -> str:
    """SHA-256 of the reference file (packaged by default), recorded with table reports."""
    if path is not None:
        return Hasher.hash_file(path)
    source = resources.files("confinium").joinpath("data", "reference_values.csv")
    with resources.as_file(source) as packaged:
        return Hasher.hash_file(str(packaged))


def _tolerance(entry: ReferenceEntry, layout: TableLayout) -> float:
    if entry.literature:
        return layout.literature_rtol
    return layout.energy_rtol if entry.quantity == "energy" else layout.virial_rtol


def compare(entry: ReferenceEntry, computed: float) -> ComparisonRow:
    layout = LAYOUTS[entry.table_id]
    abs_err = abs(computed - entry.value)
    rel_err = abs_err / abs(entry.value) if entry.value != 0 else (0.0 if abs_err == 0 else INF)
    # Printed values may be truncated rather than rounded: allow a full last unit.
    floor = max(layout.atol, 1.01 * entry.resolution)
    passed = rel_err <= _tolerance(entry, layout) or abs_err <= floor
    return ComparisonRow(entry, computed, abs_err, rel_err, bool(passed))


def _cell_values(sys: SystemSpec, st: StateSpec, policy: TruncationPolicy, unit: float) -> Dict[str, float]:
    es = solve_bound_states(sys, st.n_index + 1, policy)[st.n_index]
    report = virial_report(sys, es)
    values = {name: getattr(report, name) for name in VIRIAL_FIELDS}
    values["energy"] = es.energy / unit
    return values


def _evaluate_cell(table_id: str, sys: SystemSpec, st: StateSpec,
                   policy: TruncationPolicy) -> Tuple[Optional[Dict[str, float]], Optional[str]]:
    layout = LAYOUTS[table_id]
    try:
        values = _cell_values(sys, st, policy, layout.energy_unit)
    except (ConfiniumError, np.linalg.LinAlgError) as exc:
        logger.warning("table %s %s %s failed: %s", table_id, sys.describe(), st.label, exc)
        record_event("cell", sys.describe(), {"table": table_id, "state": st.label, "error": str(exc)})
        return None, f"{type(exc).__name__}: {exc}"
    logger.info("table %s %s %s: E=%.12g", table_id, sys.describe(), st.label, values["energy"])
    record_event("cell", sys.describe(), {"table": table_id, "state": st.label, "values": values})
    return values, None


def reproduce_table(table_id: str, policy: Optional[TruncationPolicy] = None,
                    include_literature: bool = False, jobs: int = 1,
                    references: Optional[Sequence[ReferenceEntry]] = None) -> List[ComparisonRow]:
    """Solve every cell of a table and compare it with the reference values.

    Rows come back in reference-file order whatever ``jobs`` is. A failing
    cell marks all its rows failed and the run goes on.
    """
    if table_id not in LAYOUTS:
        raise ParameterError(f"unknown table {table_id!r}; expected one of {', '.join(TABLE_IDS)}")
    if jobs < 1:
        raise ParameterError(f"jobs must be at least 1, got {jobs}")
    policy = policy or DEFAULT_POLICY
    allowed = STATUSES if include_literature else BODY_STATUSES
    entries = [e for e in (references if references is not None else load_references())
               if e.table_id == table_id and e.status in allowed]

    cells = list(dict.fromkeys((e.system, e.state) for e in entries))
    if jobs == 1:
        outcomes = [_evaluate_cell(table_id, sys, st, policy) for sys, st in cells]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(contextvars.copy_context().run, _evaluate_cell, table_id, sys, st, policy)
                       for sys, st in cells]
            outcomes = [future.result() for future in futures]
    results = dict(zip(cells, outcomes))

    rows = []
    for entry in entries:
        values, error = results[(entry.system, entry.state)]
        if values is None:
            rows.append(ComparisonRow(entry, None, INF, INF, False, error))
        else:
            rows.append(compare(entry, values[entry.quantity]))
    for row in rows:
        if row.reference.disputed:
            logger.warning("table %s %s %s %s: reference %s is disputed; computed %s",
                           table_id, row.reference.state.label, row.reference.params,
                           row.reference.quantity, row.reference.value, row.computed)
    return rows


def summarize(rows: Iterable[ComparisonRow]) -> Dict[str, int]:
    """Counts of passing, failing and disputed rows; disputed rows count as neither."""
    summary = {"pass": 0, "fail": 0, "disputed": 0}
    for row in rows:
        if row.reference.disputed:
            summary["disputed"] += 1
        elif row.passed:
            summary["pass"] += 1
        else:
            summary["fail"] += 1
    return summary


def sweep(template: SystemSpec, param: str, values: Iterable, states: Sequence[StateSpec],
          policy: Optional[TruncationPolicy] = None, energies_only: bool = False) -> List[SweepPoint]:
    """Solve ``states`` for each value of one parameter of ``template``."""
    if param not in template.parameters():
        raise ParameterError(f"{template.kind.value} has no parameter {param!r}; "
                             f"choose from {', '.join(template.parameters())}")
    policy = policy or DEFAULT_POLICY
    points = []
    for raw in values:
        value = parse_real(raw)
        for st in states:
            try:
                sys = template.replace(**{param: value}).for_state(st)
            except ConfiniumError as exc:
                logger.warning("sweep %s=%s %s skipped: %s", param, format_real(value), st.label, exc)
                points.append(SweepPoint(param, value, st, None, error=f"{type(exc).__name__}: {exc}"))
                continue
            try:
                es = solve_bound_states(sys, st.n_index + 1, policy)[st.n_index]
                report = None if energies_only else virial_report(sys, es)
            except (ConfiniumError, np.linalg.LinAlgError) as exc:
                logger.warning("sweep %s %s failed: %s", sys.describe(), st.label, exc)
                points.append(SweepPoint(param, value, st, sys, error=f"{type(exc).__name__}: {exc}"))
                continue
            logger.info("sweep %s %s: E=%.12g", sys.describe(), st.label, es.energy)
            points.append(SweepPoint(param, value, st, sys, es.energy, report))
    return points
