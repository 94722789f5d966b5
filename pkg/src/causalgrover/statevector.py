"""Dense statevector simulation for H, X, CX and multicontrolled X.

Qubit 0 is the least significant bit of the basis-state index. Register
bitstrings are printed with the register's last qubit leftmost.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

MAX_QUBITS = 28
KINDS = ("H", "X", "CX", "MCX")
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class SimulatorError(ValueError):
    pass


@dataclass(frozen=True)
class GateOp:
    """One gate. ``controls`` holds ``(qubit, polarity)``; polarity 1 fires on |1>."""

    kind: str
    target: int
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        controls = tuple((int(q), int(p)) for q, p in self.controls)
        object.__setattr__(self, "controls", controls)
        if self.kind not in KINDS:
            raise SimulatorError(f"unknown gate kind {self.kind!r}")
        if self.kind in ("H", "X") and controls:
            raise SimulatorError(f"{self.kind} takes no controls")
        if self.kind == "CX" and len(controls) != 1:
            raise SimulatorError("CX takes exactly one control")
        qubits = [q for q, _ in controls]
        if self.target in qubits:
            raise SimulatorError(f"target {self.target} is also a control")
        if len(set(qubits)) != len(qubits):
            raise SimulatorError("repeated control qubit")
        if any(p not in (0, 1) for _, p in controls):
            raise SimulatorError("control polarity must be 0 or 1")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) + tuple(q for q, _ in self.controls)


def H(q):
    return GateOp("H", q)


def X(q):
    return GateOp("X", q)


def CX(control, target):
    return GateOp("CX", target, ((control, 1),))


def MCX(controls, target):
    """``controls`` is an iterable of qubit indices (on |1>) or (qubit, polarity) pairs."""
    ctrl = tuple(c if isinstance(c, tuple) else (c, 1) for c in controls)
    if not ctrl:
        return X(target)
    return GateOp("MCX", target, ctrl)


@dataclass
class QuantumState:
    amplitudes: np.ndarray
    qubit_count: int

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy(), self.qubit_count)


def init_state(m: int, max_qubits: int = MAX_QUBITS) -> QuantumState:
    if m < 1:
        raise SimulatorError("need at least one qubit")
    if m > max_qubits:
        raise SimulatorError(f"{m} qubits exceeds the simulator cap of {max_qubits}")
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(amps, m)


def basis_state(index: int, m: int) -> QuantumState:
    s = init_state(m)
    s.amplitudes[0] = 0.0
    s.amplitudes[index] = 1.0
    return s


# Kernels walk the 2^(m-1) index pairs that differ only in the target bit.

@numba.njit(cache=True, nogil=True)
def _hadamard(amps, target):
    bit = 1 << target
    low = bit - 1
    for k in range(amps.size >> 1):
        i = ((k >> target) << (target + 1)) | (k & low)
        j = i | bit
        a = amps[i]
        b = amps[j]
        amps[i] = (a + b) * _INV_SQRT2
        amps[j] = (a - b) * _INV_SQRT2


@numba.njit(cache=True, nogil=True)
def _controlled_x(amps, target, ctrl_mask, ctrl_value):
    bit = 1 << target
    low = bit - 1
    for k in range(amps.size >> 1):
        i = ((k >> target) << (target + 1)) | (k & low)
        if (i & ctrl_mask) == ctrl_value:
            j = i | bit
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


def apply_gate(state: QuantumState, gate: GateOp) -> None:
    m = state.qubit_count
    for q in gate.qubits:
        if not 0 <= q < m:
            raise SimulatorError(f"qubit {q} out of range for {m}-qubit state")
    if gate.kind == "H":
        _hadamard(state.amplitudes, gate.target)
        return
    mask = value = 0
    for q, p in gate.controls:
        mask |= 1 << q
        value |= p << q
    _controlled_x(state.amplitudes, gate.target, mask, value)


def apply_gates(state: QuantumState, gates: Sequence[GateOp]) -> None:
    for g in gates:
        apply_gate(state, g)


def gate_matrix(gate: GateOp, m: int) -> np.ndarray:
    """Column k is the gate applied to basis state k (small m only)."""
    cols = []
    for k in range(1 << m):
        s = basis_state(k, m)
        apply_gate(s, gate)
        cols.append(s.amplitudes)
    return np.stack(cols, axis=1)


# -- readout ----------------------------------------------------------------

@dataclass
class Histogram:
    """Distribution over a register; index k of ``probabilities`` is register value k.

    Sampled histograms also carry ``counts`` and ``shots``; their
    ``probabilities`` are the observed frequencies.
    """

    register: tuple[int, ...]
    probabilities: np.ndarray
    counts: np.ndarray | None = None
    shots: int | None = None
    causal: np.ndarray | None = field(default=None, repr=False)

    @property
    def width(self) -> int:
        return len(self.register)

    @property
    def exact(self) -> bool:
        return self.counts is None

    def __len__(self):
        return self.probabilities.size

    def bitstring(self, k: int) -> str:
        return format(k, f"0{self.width}b")

    def entries(self) -> dict[str, float]:
        vals = self.probabilities if self.counts is None else self.counts
        return {self.bitstring(k): vals[k].item() for k in range(vals.size)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["bitstring", "probability"]
        if self.counts is not None:
            header.append("count")
        if self.causal is not None:
            header.append("causal")
        w.writerow(header)
        for k in range(self.probabilities.size):
            row = [self.bitstring(k), format(self.probabilities[k], ".17g")]
            if self.counts is not None:
                row.append(int(self.counts[k]))
            if self.causal is not None:
                row.append(int(self.causal[k]))
            w.writerow(row)
        return buf.getvalue()


def histogram_from_csv(text: str, register: Sequence[int] | None = None) -> Histogram:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty histogram CSV")
    width = len(rows[0]["bitstring"])
    probs = np.zeros(1 << width)
    counts = np.zeros(1 << width, dtype=np.int64) if "count" in rows[0] else None
    causal = np.zeros(1 << width, dtype=bool) if "causal" in rows[0] else None
    for row in rows:
        k = int(row["bitstring"], 2)
        probs[k] = float(row["probability"])
        if counts is not None:
            counts[k] = int(row["count"])
        if causal is not None:
            causal[k] = row["causal"] == "1"
    reg = tuple(register) if register is not None else tuple(range(width))
    shots = int(counts.sum()) if counts is not None else None
    return Histogram(reg, probs, counts, shots, causal)


def _register_values(m: int, register: Sequence[int]) -> np.ndarray:
    idx = np.arange(1 << m, dtype=np.int64)
    vals = np.zeros_like(idx)
    for k, q in enumerate(register):
        vals |= ((idx >> q) & 1) << k
    return vals


def probabilities(state: QuantumState, register: Sequence[int]) -> Histogram:
    register = tuple(register)
    m = state.qubit_count
    if len(set(register)) != len(register):
        raise SimulatorError("register qubits must be distinct")
    if any(not 0 <= q < m for q in register):
        raise SimulatorError(f"register {register} out of range for {m} qubits")
    p = np.abs(state.amplitudes) ** 2
    if register == tuple(range(m)):
        return Histogram(register, p)
    vals = _register_values(m, register)
    return Histogram(register, np.bincount(vals, weights=p, minlength=1 << len(register)))


def sample(state: QuantumState, register: Sequence[int], shots: int, seed: int | None = None) -> Histogram:
    if shots < 1:
        raise SimulatorError("shots must be ≥ 1")
    exact = probabilities(state, register)
    p = exact.probabilities / exact.probabilities.sum()
    counts = np.random.default_rng(seed).multinomial(shots, p)
    return Histogram(exact.register, counts / shots, counts, shots)
