import argparse
import logging
import sys
from contextlib import nullcontext
from typing import Any, Dict, List, Optional, Tuple

from .config import OUTPUT_FORMATS, SYSTEM_FLAGS, RunConfig, resolve
from .differ import Differ
from .eigensolve import solve_bound_states
from .errors import ConfiniumError, ParameterError
from .hasher import Hasher
from .logger import TraceLog
from .model import Kind
from .observables import expectation_set, virial_report
from .report import TABLE_IDS, reference_digest, reproduce_table, summarize, sweep as run_sweep
from .reporter import Reporter
from .selftest import run_selftest

logger = logging.getLogger(__name__)

Outcome = Tuple[List[Dict[str, Any]], Dict[str, int], bool]

# argparse dest -> config key, for everything that may also come from a config file.
CONFIG_DESTS = ("system", "state", "count", "grid_n", "energy_tol", "rtol", "output", "out", "digits",
                "jobs", "trace", "id", "literature", "param", "values", "states", "energies_only",
                *SYSTEM_FLAGS)


def solve(config: RunConfig) -> Outcome:
    policy = config.policy()
    st = config.parsed_state()
    sys_ = config.system_spec(ell=st.ell)
    states = solve_bound_states(sys_, st.n_index + config.count, policy)[st.n_index:]

    rows = []
    for es in states:
        moments = expectation_set(sys_, es)
        report = virial_report(sys_, es)
        checks = report.checks(moments.t2)
        row: Dict[str, Any] = {
            "system": sys_.to_dict(),
            "state": es.label,
            "energy": es.energy,
            "node_count": es.node_count,
            "norm_residual": es.norm_residual,
        }
        row.update(moments.to_dict())
        row.update({k: v for k, v in report.to_dict().items() if k != "energy"})
        row["pass"] = all(checks.values())
        rows.append(row)
    passed = sum(1 for row in rows if row["pass"])
    return rows, {"pass": passed, "fail": len(rows) - passed}, passed == len(rows)


def table(config: RunConfig) -> Outcome:
    ids = TABLE_IDS if config.table_id.lower() == "all" else (config.table_id.upper(),)
    policy = config.policy()
    rows = []
    for table_id in ids:
        rows.extend(reproduce_table(table_id, policy, include_literature=config.include_literature,
                                    jobs=config.jobs))
    summary = summarize(rows)
    return [row.to_dict() for row in rows], summary, summary["fail"] == 0


def sweep(config: RunConfig) -> Outcome:
    template = config.system_spec()
    states = [config.parsed_state(label) for label in config.states]
    points = run_sweep(template, config.param, config.values, states, config.policy(),
                       energies_only=config.energies_only)
    failed = sum(1 for point in points if point.error)
    return [point.to_dict() for point in points], {"pass": len(points) - failed, "fail": failed}, failed == 0


def selftest(config: RunConfig) -> Outcome:
    rows = run_selftest(config.policy())
    passed = sum(1 for row in rows if row["pass"])
    return rows, {"pass": passed, "fail": len(rows) - passed}, passed == len(rows)


HANDLERS = {"solve": solve, "table": table, "sweep": sweep, "selftest": selftest}


def _comma_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Config file (key=value lines, or YAML for .yaml/.yml)")
    common.add_argument("--grid-n", dest="grid_n", type=int, help="grid intervals per element (default: 256)")
    common.add_argument("--energy-tol", dest="energy_tol", type=float, help="Truncation convergence tolerance")
    common.add_argument("--output", choices=OUTPUT_FORMATS, help="Output format (default: text)")
    common.add_argument("--out", help="Write the report to this file instead of stdout")
    common.add_argument("--digits", type=int, help="Significant digits in text output (default: 10)")
    common.add_argument("--trace", help="Record an NDJSON solve trace to this file")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug")

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--system", choices=[k.value for k in Kind], help="System kind")
    system.add_argument("--omega", help="Oscillator frequency")
    system.add_argument("--xc", help="1D wall half-width (inf for none)")
    system.add_argument("--rc", help="Confinement radius (inf for none)")
    system.add_argument("--ra", help="Shell inner radius")
    system.add_argument("--rb", help="Shell outer radius")
    system.add_argument("--k", help="Cavity exponent (> 1)")
    system.add_argument("--V0", dest="V0", help="Barrier height (inf for a hard wall)")
    system.add_argument("--U0", dest="U0", help="Soft barrier height")
    system.add_argument("--w", help="Soft barrier steepness")

    parser = argparse.ArgumentParser(prog="confinium", description="Confinium: confined quantum systems and virial identities")
    subparsers = parser.add_subparsers(dest="command")

    # solve
    solve_parser = subparsers.add_parser("solve", parents=[common, system], help="Solve one system")
    solve_parser.add_argument("--state", help="State label: n=0, 1s, 2p, nr=1,l=2")
    solve_parser.add_argument("--count", type=int, help="Number of consecutive states from --state (default: 1)")

    # table
    table_parser = subparsers.add_parser("table", parents=[common], help="Reproduce a reference table")
    table_parser.add_argument("--id", help=f"Table id ({', '.join(TABLE_IDS)} or all)")
    table_parser.add_argument("--literature", action="store_true", default=None,
                              help="Also compare against literature footnote values")
    table_parser.add_argument("--jobs", type=int, help="Parallel cell evaluations (default: 1)")

    # sweep
    sweep_parser = subparsers.add_parser("sweep", parents=[common, system], help="Sweep one parameter")
    sweep_parser.add_argument("--param", help="Parameter name (e.g. r_c, x_c, V0)")
    sweep_parser.add_argument("--values", type=_comma_list, help="Comma-separated values")
    sweep_parser.add_argument("--states", type=_comma_list, help="Comma-separated state labels")
    sweep_parser.add_argument("--energies-only", dest="energies_only", action="store_true", default=None,
                              help="Skip the virial report")

    # selftest
    subparsers.add_parser("selftest", parents=[common], help="Run the analytic anchor suite")

    # diff
    diff_parser = subparsers.add_parser("diff", help="Compare two JSON reports")
    diff_parser.add_argument("file1", help="Path to first report")
    diff_parser.add_argument("file2", help="Path to second report")
    diff_parser.add_argument("--rtol", type=float, help="Relative tolerance for numbers (default: 1e-9)")
    diff_parser.add_argument("--config", help="Config file")
    diff_parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(format='  %(message)s', level=level, force=True, stream=sys.stderr)


def _fail(config: Optional[RunConfig], exc: ConfiniumError) -> int:
    if config is not None and config.output == "json":
        print(Hasher.canonical_json(Reporter.error_document(exc)), end="")
    else:
        print(f"Error: {exc}", file=sys.stderr)
    return 1


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    _configure_logging(getattr(args, "verbose", 0))
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2

    flags = {dest: getattr(args, dest) for dest in CONFIG_DESTS if hasattr(args, dest)}
    try:
        config = resolve(args.command, flags, args.config)
    except ParameterError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 2

    if args.command == "diff":
        return 0 if Differ.diff_reports(args.file1, args.file2, config.rtol) == 0 else 1

    trace = TraceLog.recording(config.trace_path) if config.trace_path else nullcontext()
    with trace:
        try:
            rows, summary, ok = HANDLERS[args.command](config)
        except ParameterError as exc:
            print(f"Error: {exc}", file=sys.stderr)
            return 2
        except ConfiniumError as exc:
            return _fail(config, exc)

    config_doc = config.to_dict()
    if args.command == "table":
        config_doc["references_sha256"] = reference_digest()
    document = Reporter.document(args.command, config_doc, rows, summary)
    try:
        Reporter.write(document, config.out_path, config.output, config.digits)
    except OSError as exc:
        print(f"Error writing report: {exc}", file=sys.stderr)
        return 1
    return 0 if ok else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
