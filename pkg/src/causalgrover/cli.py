"""Command-line entry point.

Exit status is 0 on success, 1 for input or validation problems and 2 when
an internal consistency check fails.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bundled
from .grover import (
    DEFAULT_FIX,
    PlanError,
    SeparationError,
    build_clauses,
    classify,
    plan,
    program_to_text,
    run,
    synthesize,
    verify,
)
from .statevector import Histogram, SimulatorError
from .topology import TopologyError, enumerate_causal, load_topology, to_bitstring

MAX_CHART_ENTRIES = 1024


class InvariantError(RuntimeError):
    pass


def render_ascii_chart(histogram: Histogram, width: int = 50) -> str:
    """One bar per bitstring in value order; ``*`` marks strings classified causal."""
    p = histogram.probabilities
    if p.size == 0:
        raise ValueError("nothing to render")
    if p.size > MAX_CHART_ENTRIES:
        raise ValueError(
            f"{p.size} entries is too many for a chart (max {MAX_CHART_ENTRIES}); use --format csv"
        )
    top = p.max()
    lines = []
    for k in range(p.size):
        n = int(round(width * p[k] / top)) if top > 0 else 0
        mark = ""
        if histogram.causal is not None:
            mark = " *" if histogram.causal[k] else ""
        lines.append(f"{histogram.bitstring(k)} |{'#' * n:<{width}}| {p[k]:.6f}{mark}")
    return "\n".join(lines) + "\n"


def _fix_qubit(text):
    try:
        i, v = text.split("=")
        i, v = int(i), int(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected i=v, got {text!r}") from None
    if i < 0 or v not in (0, 1):
        raise argparse.ArgumentTypeError(f"expected index ≥ 0 and value 0 or 1, got {text!r}")
    return i, v


def _resolve_topology(arg: str):
    path = Path(arg)
    if path.is_file():
        return load_topology(path)
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if stem in bundled.names():
        return bundled.load(stem)
    return load_topology(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalgrover",
        description="Find causal configurations of multiloop topologies with a simulated Grover search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_, formats, default in [
        ("enumerate", "brute-force causal orientations", ("text", "csv"), "text"),
        ("grover", "simulate the Grover circuit", ("csv", "text", "ascii-chart"), "csv"),
        ("verify", "cross-check Grover against brute force", ("text",), "text"),
        ("circuit-dump", "print the synthesized gate list", ("text",), "text"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("topology", help="topology JSON file or bundled name (%s)" % ", ".join(bundled.names()))
        p.add_argument("--fix-qubit", type=_fix_qubit, metavar="i=v",
                       help="fix edge qubit i to value v (forces qubit fixing)")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", type=Path, help="write output here instead of stdout")
        if name in ("grover", "verify", "circuit-dump"):
            p.add_argument("--no-ancilla", action="store_true", help="never add the search ancilla")
        if name in ("grover", "verify"):
            p.add_argument("--shots", type=int)
            p.add_argument("--seed", type=int)
    return parser


def _plan_for(args, topology):
    classical = enumerate_causal(topology)
    fix = args.fix_qubit or DEFAULT_FIX
    return classical, plan(
        classical.count,
        topology.n_edges,
        fix=fix,
        fixing=True if args.fix_qubit else None,
        ancilla=False if args.no_ancilla else None,
    )


def _cmd_enumerate(args, topology, emit, warn):
    cs = enumerate_causal(topology, args.fix_qubit)
    n = topology.n_edges
    if args.format == "csv":
        emit("bitstring\n" + "".join(b + "\n" for b in cs.bitstrings()))
        return 0
    head = f"{cs.count} causal / {1 << n} total"
    if args.fix_qubit:
        head += f" (q{args.fix_qubit[0]} fixed to {args.fix_qubit[1]})"
    emit(head + "\n" + "".join(b + "\n" for b in cs.bitstrings()))
    return 0


def _cmd_grover(args, topology, emit, warn):
    _, p = _plan_for(args, topology)
    if not p.feasible:
        warn(f"error: infeasible plan: {p.summary()}")
        return 1
    program = synthesize(build_clauses(topology), p)
    hist = run(program, shots=args.shots, seed=args.seed)
    if hist.exact and abs(hist.probabilities.sum() - 1.0) > 1e-9:
        raise InvariantError("q-register marginal does not sum to 1")
    try:
        hist.causal = classify(hist, p)
    except SeparationError as exc:
        warn(f"warning: {exc}")
    summary = f"{p.summary()}, qubits={program.qubit_count}"
    if args.format == "csv":
        warn(summary)
        emit(hist.to_csv())
    elif args.format == "ascii-chart":
        emit(summary + "\n" + render_ascii_chart(hist))
    else:
        lines = [summary]
        for k in np.argsort(-hist.probabilities, kind="stable"):
            tag = " causal" if hist.causal is not None and hist.causal[k] else ""
            lines.append(f"{hist.bitstring(k)} {hist.probabilities[k]:.10f}{tag}")
        emit("\n".join(lines) + "\n")
    return 0


def _cmd_verify(args, topology, emit, warn):
    report = verify(
        topology,
        fix=args.fix_qubit or DEFAULT_FIX,
        fixing=True if args.fix_qubit else None,
        ancilla=False if args.no_ancilla else None,
        shots=args.shots,
        seed=args.seed,
    )
    if report.plan is not None and not report.plan.feasible:
        warn(f"warning: infeasible plan, ran with t={report.plan.iterations} anyway")
    emit("\n".join(report.lines()) + "\n")
    if report.plan is None:
        return 0
    if report.quantum is not None and not report.ok:
        raise InvariantError("quantum and classical causal sets disagree")
    return 0


def _cmd_circuit_dump(args, topology, emit, warn):
    _, p = _plan_for(args, topology)
    program = synthesize(build_clauses(topology), p)
    emit(program_to_text(program))
    return 0


COMMANDS = {
    "enumerate": _cmd_enumerate,
    "grover": _cmd_grover,
    "verify": _cmd_verify,
    "circuit-dump": _cmd_circuit_dump,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    chunks = []

    def warn(msg):
        print(msg, file=sys.stderr)

    try:
        if getattr(args, "seed", None) is not None and args.shots is None:
            raise ValueError("--seed requires --shots")
        topology = _resolve_topology(args.topology)
        if args.fix_qubit and args.fix_qubit[0] >= topology.n_edges:
            raise ValueError(
                f"--fix-qubit index {args.fix_qubit[0]} out of range for {topology.n_edges} edges"
            )
        status = COMMANDS[args.command](args, topology, chunks.append, warn)
    except InvariantError as exc:
        warn(f"internal error: {exc}")
        return 2
    except (TopologyError, PlanError, SeparationError, SimulatorError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        warn(f"error: {msg}")
        return 1
    text = "".join(chunks)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
