"""Grover search for causal configurations.

The circuit works on four registers laid out contiguously as
``q | c | a | out | ancilla``: one qubit per edge, one per binary clause,
one per loop clause, the phase marker and an optional search ancilla.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .statevector import (
    CX,
    H,
    MCX,
    X,
    GateOp,
    Histogram,
    MAX_QUBITS,
    SimulatorError,
    apply_gates,
    init_state,
    probabilities,
    sample,
)
from .topology import (
    CausalSet,
    ClauseSet,
    MultiloopTopology,
    build_clauses,
    enumerate_causal,
)

FEASIBLE_ANGLE = math.pi / 6
# π/24 on top of π/6 admits θ = arcsin√(23/64) ≈ π/4.88 and still rejects π/3.
FEASIBILITY_TOLERANCE = math.pi / 24
DEFAULT_FIX = (0, 1)


class PlanError(ValueError):
    pass


class SeparationError(ValueError):
    pass


# -- planning ---------------------------------------------------------------

@dataclass(frozen=True)
class GroverPlan:
    n_edges: int
    r_raw: int
    n_states: int
    n_solutions: int
    theta_raw: float
    theta: float
    iterations: int
    fixed_qubit: tuple[int, int] | None = None
    ancilla_added: bool = False
    feasible: bool = True
    tolerance: float = FEASIBILITY_TOLERANCE

    @property
    def theta_t(self) -> float:
        return (2 * self.iterations + 1) * self.theta

    @property
    def success_probability(self) -> float:
        return math.sin(self.theta_t) ** 2

    def plateaus(self) -> tuple[float, float]:
        """Predicted per-string probability of marked and unmarked q-strings.

        With the ancilla, marked full states carry ancilla 0 and the ancilla
        is summed out of the reported strings.
        """
        s = self.success_probability / self.n_solutions
        u = (1.0 - self.success_probability) / (self.n_states - self.n_solutions)
        if self.ancilla_added:
            return s + u, 2 * u
        return s, u

    def summary(self) -> str:
        text = (
            f"t={self.iterations}, theta={self.theta:.4f} rad, "
            f"predicted success {self.success_probability:.4f}"
        )
        mods = []
        if self.fixed_qubit is not None:
            mods.append(f"q{self.fixed_qubit[0]} fixed to {self.fixed_qubit[1]}")
        if self.ancilla_added:
            mods.append("ancilla added")
        if mods:
            text += " (" + ", ".join(mods) + ")"
        if not self.feasible:
            text += " [infeasible]"
        return text


def mixing_angle(r: int, n_states: int) -> float:
    return math.asin(math.sqrt(r / n_states))


def best_iterations(theta: float) -> int:
    """t in 1..ceil(π/4θ) maximizing sin²((2t+1)θ); the smallest wins ties."""
    t_max = max(1, math.ceil(math.pi / (4 * theta)))
    ts = np.arange(1, t_max + 1)
    return int(ts[np.argmax(np.sin((2 * ts + 1) * theta) ** 2)])


def plan(
    r_raw: int,
    n: int,
    *,
    fix: tuple[int, int] = DEFAULT_FIX,
    fixing: bool | None = None,
    ancilla: bool | None = None,
    tolerance: float = FEASIBILITY_TOLERANCE,
) -> GroverPlan:
    """Choose modifications and iteration count for ``r_raw`` of ``2**n`` solutions.

    ``fixing`` and ``ancilla`` default to ``None`` (apply only when the angle
    is still above the feasibility bound); pass True/False to force them.
    """
    N = 1 << n
    if r_raw <= 0:
        raise PlanError("no causal configurations")
    if r_raw >= N:
        raise PlanError("all configurations causal — Grover degenerate")
    if not 0 <= fix[0] < n or fix[1] not in (0, 1):
        raise PlanError(f"cannot fix qubit {fix[0]}={fix[1]} with {n} edges")
    bound = FEASIBLE_ANGLE + tolerance
    theta_raw = mixing_angle(r_raw, N)

    r, fixed = r_raw, None
    if fixing or (fixing is None and theta_raw > bound):
        if r_raw % 2:
            raise PlanError(f"odd solution count {r_raw} cannot be halved by mirror symmetry")
        r, fixed = r_raw // 2, tuple(fix)
    theta = mixing_angle(r, N)
    add_ancilla = bool(ancilla or (ancilla is None and theta > bound))
    if add_ancilla:
        N *= 2
        theta = mixing_angle(r, N)
    return GroverPlan(
        n_edges=n,
        r_raw=r_raw,
        n_states=N,
        n_solutions=r,
        theta_raw=theta_raw,
        theta=theta,
        iterations=best_iterations(theta),
        fixed_qubit=fixed,
        ancilla_added=add_ancilla,
        feasible=theta <= bound,
        tolerance=tolerance,
    )


# -- circuit synthesis ------------------------------------------------------

@dataclass(frozen=True)
class RegisterLayout:
    q: tuple[int, ...]
    c: tuple[int, ...]
    a: tuple[int, ...]
    out: int
    ancilla: tuple[int, ...] = ()

    @classmethod
    def build(cls, n_edges: int, n_binary: int, n_loops: int, ancilla: bool = False):
        q = tuple(range(n_edges))
        c = tuple(range(n_edges, n_edges + n_binary))
        a = tuple(range(n_edges + n_binary, n_edges + n_binary + n_loops))
        out = n_edges + n_binary + n_loops
        return cls(q, c, a, out, (out + 1,) if ancilla else ())

    @property
    def total(self) -> int:
        return len(self.q) + len(self.c) + len(self.a) + 1 + len(self.ancilla)

    @property
    def search(self) -> tuple[int, ...]:
        return self.q + self.ancilla

    def describe(self) -> str:
        def span(r):
            return f"{r[0]}-{r[-1]}" if r else "-"

        return (
            f"q={span(self.q)} c={span(self.c)} a={span(self.a)} "
            f"out={self.out} ancilla={span(self.ancilla)}"
        )


@dataclass
class CircuitProgram:
    layout: RegisterLayout
    gates: list[GateOp]
    # (name, iteration, start, stop); iteration 0 is the init segment
    segments: list[tuple[str, int, int, int]] = field(default_factory=list)

    @property
    def qubit_count(self) -> int:
        return self.layout.total

    def segment(self, name: str, iteration: int = 1) -> list[GateOp]:
        for nm, it, lo, hi in self.segments:
            if nm == name and it == iteration:
                return self.gates[lo:hi]
        raise KeyError((name, iteration))

    def upto(self, name: str, iteration: int) -> list[GateOp]:
        """All gates through the end of segment ``(name, iteration)``."""
        for nm, it, lo, hi in self.segments:
            if nm == name and it == iteration:
                return self.gates[:hi]
        raise KeyError((name, iteration))


def clause_compute_gates(clause_set: ClauseSet, layout: RegisterLayout) -> list[GateOp]:
    gates = []
    for k, bc in enumerate(clause_set.binary_clauses):
        target = layout.c[k]
        gates += [CX(layout.q[bc.i], target), CX(layout.q[bc.j], target)]
        if not bc.negated:
            gates.append(X(target))
    for k, lc in enumerate(clause_set.loop_clauses):
        target = layout.a[k]
        gates += [X(target), MCX([layout.c[b] for b in lc.clauses], target)]
    return gates


def oracle_mark_gate(layout: RegisterLayout, fixed_qubit=None) -> GateOp:
    controls = [(q, 1) for q in layout.a]
    if fixed_qubit is not None:
        controls.append((layout.q[fixed_qubit[0]], fixed_qubit[1]))
    # the ancilla halves the marked fraction like a fixed qubit that no mirror pairs with
    controls += [(q, 0) for q in layout.ancilla]
    return MCX(controls, layout.out)


def diffuser_gates(qubits) -> list[GateOp]:
    """Exact 2|s><s| - I on ``qubits``."""
    qubits = list(qubits)
    last = qubits[-1]
    gates = [H(q) for q in qubits] + [X(q) for q in qubits]
    gates += [H(last), MCX(qubits[:-1], last), H(last)]
    gates += [X(q) for q in qubits] + [H(q) for q in qubits]
    # the H/X/MCZ/X/H sandwich is I - 2|s><s|; (HX)^4 = ZXZX = -I fixes the sign
    gates += [H(last), X(last)] * 4
    return gates


def synthesize(clause_set: ClauseSet, plan: GroverPlan, max_qubits: int = MAX_QUBITS) -> CircuitProgram:
    if plan.n_edges != clause_set.n_edges:
        raise PlanError(
            f"plan is for {plan.n_edges} edges, clause set has {clause_set.n_edges}"
        )
    if not clause_set.loop_clauses:
        raise PlanError("no loop clauses: every configuration is causal")
    layout = RegisterLayout.build(
        clause_set.n_edges,
        len(clause_set.binary_clauses),
        len(clause_set.loop_clauses),
        plan.ancilla_added,
    )
    if layout.total > max_qubits:
        raise SimulatorError(
            f"circuit needs {layout.total} qubits, over the simulator cap of {max_qubits}"
        )
    gates: list[GateOp] = []
    segments = []

    def emit(name, it, block):
        segments.append((name, it, len(gates), len(gates) + len(block)))
        gates.extend(block)

    emit("init", 0, [H(q) for q in layout.search] + [X(layout.out), H(layout.out)])
    compute = clause_compute_gates(clause_set, layout)
    mark = oracle_mark_gate(layout, plan.fixed_qubit)
    for it in range(1, plan.iterations + 1):
        emit("clause-compute", it, compute)
        emit("oracle-mark", it, [mark])
        emit("clause-uncompute", it, compute[::-1])
        emit("diffuser", it, diffuser_gates(layout.search))
    return CircuitProgram(layout, gates, segments)


def simulate(program: CircuitProgram, gates=None):
    state = init_state(program.qubit_count)
    apply_gates(state, program.gates if gates is None else gates)
    return state


def run(program: CircuitProgram, shots: int | None = None, seed: int | None = None) -> Histogram:
    """Marginal over the q register (ancilla excluded); sampled when ``shots`` is given."""
    state = simulate(program)
    if shots is None:
        return probabilities(state, program.layout.q)
    return sample(state, program.layout.q, shots, seed)


# -- readout ----------------------------------------------------------------

def _two_means_split(values: np.ndarray) -> int:
    """Exact 1-D 2-means on sorted ``values``; returns size of the low cluster."""
    n = values.size
    csum = np.cumsum(values)
    csq = np.cumsum(values**2)
    k = np.arange(1, n)
    lo_sse = csq[:-1] - csum[:-1] ** 2 / k
    hi_n = n - k
    hi_sse = (csq[-1] - csq[:-1]) - (csum[-1] - csum[:-1]) ** 2 / hi_n
    return int(k[np.argmin(lo_sse + hi_sse)])


def classify(histogram: Histogram, plan: GroverPlan) -> np.ndarray:
    """Boolean mask over register values: True for strings marked by the oracle."""
    p = histogram.probabilities
    if p.size < 2:
        raise SeparationError("plateaus not separated: fewer than two strings")
    floor = 0.5 / histogram.shots if histogram.shots else 1e-300
    logp = np.log(np.maximum(p, floor))
    order = np.argsort(logp, kind="stable")
    sorted_lp = logp[order]
    k = _two_means_split(sorted_lp)
    low, high = sorted_lp[:k], sorted_lp[k:]
    gap = high[0] - low[-1]
    spread = max(low[-1] - low[0], high[-1] - high[0])
    if not gap > max(1e-9, spread):
        raise SeparationError(
            "plateaus not separated: max low-class probability "
            f"{math.exp(low[-1]):.6g} vs min high-class {math.exp(high[0]):.6g}"
        )
    threshold = 0.5 * (low.mean() + high.mean())  # log of the geometric mean
    marked_high, unmarked = plan.plateaus()
    if marked_high >= unmarked:
        return logp > threshold
    return logp < threshold


def extract_causal(histogram: Histogram, plan: GroverPlan) -> CausalSet:
    mask = classify(histogram, plan)
    found = CausalSet(np.flatnonzero(mask), plan.n_edges)
    if plan.fixed_qubit is not None:
        found = found.with_mirrors()
    return found


# -- end-to-end -------------------------------------------------------------

@dataclass
class VerifyReport:
    topology: MultiloopTopology
    plan: GroverPlan | None
    classical: CausalSet
    quantum: CausalSet | None
    qubits: int = 0
    predicted: tuple[float, float] | None = None
    simulated: tuple[float, float] | None = None
    causal_probability: float | None = None
    error: str | None = None
    tolerance: float = 1e-9

    @property
    def sets_equal(self) -> bool:
        return self.quantum is not None and self.quantum == self.classical

    @property
    def plateaus_match(self) -> bool:
        if self.predicted is None or self.simulated is None:
            return False
        return all(abs(p - s) <= self.tolerance for p, s in zip(self.predicted, self.simulated))

    @property
    def ok(self) -> bool:
        return self.sets_equal and (self.simulated is None or self.plateaus_match)

    def lines(self) -> list[str]:
        n = self.topology.n_edges
        out = [f"topology: {self.topology.name or '(unnamed)'}, {n} edges, {self.topology.vertex_count} vertices"]
        out.append(f"classical: {self.classical.count} causal / {1 << n} total")
        if self.plan is not None:
            out.append(f"plan: {self.plan.summary()}")
            out.append(
                f"theta_raw={self.plan.theta_raw:.6f} rad, N={self.plan.n_states}, "
                f"r={self.plan.n_solutions}, qubits={self.qubits}"
            )
        if self.error:
            out.append(f"quantum: {self.error}")
        if self.quantum is not None:
            out.append(f"quantum: {self.quantum.count} causal after mirror completion")
        out.append(f"sets equal: {'yes' if self.sets_equal else 'no'}")
        if self.predicted and self.simulated:
            out.append(
                "plateaus (high, low): predicted "
                f"({self.predicted[0]:.10f}, {self.predicted[1]:.10f}) simulated "
                f"({self.simulated[0]:.10f}, {self.simulated[1]:.10f}) "
                f"match: {'yes' if self.plateaus_match else 'no'}"
            )
        return out


def verify(
    topology: MultiloopTopology,
    *,
    fix: tuple[int, int] = DEFAULT_FIX,
    fixing: bool | None = None,
    ancilla: bool | None = None,
    shots: int | None = None,
    seed: int | None = None,
    max_qubits: int = MAX_QUBITS,
) -> VerifyReport:
    """Classical enumeration against the simulated Grover pipeline; never raises on mismatch."""
    classical = enumerate_causal(topology)
    report = VerifyReport(topology, None, classical, None)
    try:
        p = plan(classical.count, topology.n_edges, fix=fix, fixing=fixing, ancilla=ancilla)
    except PlanError as exc:
        report.error = str(exc)
        return report
    report.plan = p
    try:
        program = synthesize(build_clauses(topology), p, max_qubits=max_qubits)
    except (PlanError, SimulatorError) as exc:
        report.error = str(exc)
        return report
    report.qubits = program.qubit_count
    hist = run(program, shots=shots, seed=seed)
    try:
        report.quantum = extract_causal(hist, p)
    except SeparationError as exc:
        report.error = str(exc)
        return report
    if shots is None:
        fixed = enumerate_causal(topology, p.fixed_qubit) if p.fixed_qubit else classical
        marked = np.zeros(len(hist), dtype=bool)
        marked[fixed.orientations] = True
        probs = hist.probabilities
        report.predicted = p.plateaus()
        report.simulated = (float(probs[marked].mean()), float(probs[~marked].mean()))
        report.causal_probability = float(probs[marked].sum())
    return report


def with_iterations(p: GroverPlan, t: int) -> GroverPlan:
    return replace(p, iterations=t)


# -- text gate lists --------------------------------------------------------

def program_to_text(program: CircuitProgram) -> str:
    """One gate per line: ``KIND target [qubit:polarity ...]``; ``#`` lines are comments."""
    lines = [f"# qubits {program.qubit_count} {program.layout.describe()}"]
    starts = {lo: (nm, it) for nm, it, lo, hi in program.segments if hi > lo}
    for k, g in enumerate(program.gates):
        if k in starts:
            nm, it = starts[k]
            lines.append(f"# segment {nm}" + (f" {it}" if it else ""))
        ctrl = " ".join(f"{q}:{p}" for q, p in g.controls)
        lines.append(f"{g.kind} {g.target}" + (f" {ctrl}" if ctrl else ""))
    return "\n".join(lines) + "\n"


def parse_gate_list(text: str) -> list[GateOp]:
    gates = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *rest = line.split()
        try:
            target = int(rest[0])
            controls = tuple(tuple(int(v) for v in tok.split(":")) for tok in rest[1:])
            gates.append(GateOp(kind, target, controls))
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse gate {line!r}") from exc
    return gates
