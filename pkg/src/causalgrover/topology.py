"""Multiloop topologies, their eloops and the causality clauses built from them.

Conventions
-----------
* Edge ``i`` of a topology is encoded by qubit ``i``.
* An orientation is an integer whose bit ``i`` is the flow of edge ``i``:
  1 keeps the reference direction (tail -> head), 0 inverts it.
* Bitstrings are printed most-significant edge first, so edge 0 is the
  rightmost character.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BRUTE_FORCE_CAP = 24


class TopologyError(ValueError):
    """Raised for malformed topologies or topology files."""


@dataclass(frozen=True)
class MultiloopTopology:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""

    def __post_init__(self):
        edges = tuple((int(t), int(h)) for t, h in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.vertex_count < 1:
            raise TopologyError("vertex_count must be a positive integer")
        if not edges:
            raise TopologyError("a topology needs at least one edge")
        for i, (t, h) in enumerate(edges):
            for v in (t, h):
                if not 0 <= v < self.vertex_count:
                    raise TopologyError(
                        f"edge {i} ({t}, {h}): vertex {v} out of range 0..{self.vertex_count - 1}"
                    )
            if t == h:
                raise TopologyError(f"edge {i} ({t}, {h}) is a self-loop")
        unreached = _unreached_vertices(self.vertex_count, edges)
        if unreached:
            raise TopologyError(
                f"topology is disconnected: vertices {sorted(unreached)} unreachable from vertex 0"
            )

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_loops(self) -> int:
        """Number of independent loops (first Betti number)."""
        return self.n_edges - self.vertex_count + 1

    def incident(self, vertex: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if vertex in e]

    def directed_edges(self, orientation: int) -> list[tuple[int, int]]:
        """Edges as (from, to) pairs under ``orientation``."""
        return [
            (t, h) if (orientation >> i) & 1 else (h, t)
            for i, (t, h) in enumerate(self.edges)
        ]

    def to_dict(self) -> dict:
        d = {"vertex_count": self.vertex_count, "edges": [list(e) for e in self.edges]}
        if self.name:
            d["name"] = self.name
        return d


def _unreached_vertices(vertex_count, edges):
    adj = [[] for _ in range(vertex_count)]
    for t, h in edges:
        adj[t].append(h)
        adj[h].append(t)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return set(range(vertex_count)) - seen


# -- topology files ---------------------------------------------------------

def parse_topology(data: dict, name: str = "") -> MultiloopTopology:
    """Build a topology from a decoded topology document.

    The document is a mapping with an integer ``vertex_count`` and ``edges``,
    a list of ``[tail, head]`` integer pairs. An optional ``name`` string is
    kept; any other keys are ignored.
    """
    if not isinstance(data, dict):
        raise TopologyError("topology document must be a JSON object")
    for key in ("vertex_count", "edges"):
        if key not in data:
            raise TopologyError(f"missing required key '{key}'")
    vc = data["vertex_count"]
    if not isinstance(vc, int) or isinstance(vc, bool):
        raise TopologyError("'vertex_count' must be an integer")
    raw = data["edges"]
    if not isinstance(raw, list):
        raise TopologyError("'edges' must be a list of [tail, head] pairs")
    edges = []
    for i, e in enumerate(raw):
        if (
            not isinstance(e, (list, tuple))
            or len(e) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in e)
        ):
            raise TopologyError(f"edge {i} must be a [tail, head] pair of integers, got {e!r}")
        edges.append((e[0], e[1]))
    return MultiloopTopology(vc, tuple(edges), name=data.get("name", name) or name)


def load_topology(path) -> MultiloopTopology:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TopologyError(f"cannot read topology file {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return parse_topology(data, name=path.stem)


def dump_topology(topology: MultiloopTopology) -> str:
    return json.dumps(topology.to_dict())


# -- cycles -----------------------------------------------------------------

@dataclass(frozen=True)
class Cycle:
    """A simple cycle as traversed from ``vertices[0]``.

    ``edge_sequence[k]`` is ``(edge, parity)`` where parity 0 means the edge's
    reference direction agrees with the traversal. Edge ``k`` runs from
    ``vertices[k]`` to ``vertices[k + 1]`` (indices mod length).
    """

    edge_sequence: tuple[tuple[int, int], ...]
    vertices: tuple[int, ...]

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.edge_sequence)

    def __len__(self):
        return len(self.edge_sequence)

    def mask(self) -> int:
        return sum(1 << e for e in self.edges)

    def parity_mask(self) -> int:
        return sum(p << e for e, p in self.edge_sequence)


def _make_cycle(topology, start_vertex, edge_path):
    seq = []
    verts = []
    v = start_vertex
    for e in edge_path:
        t, h = topology.edges[e]
        verts.append(v)
        seq.append((e, 0 if t == v else 1))
        v = h if t == v else t
    assert v == start_vertex
    return Cycle(tuple(seq), tuple(verts))


def enumerate_cycles(topology: MultiloopTopology) -> list[Cycle]:
    """All simple cycles of the multigraph, each exactly once.

    Each cycle starts at its lowest edge index and heads toward the lower
    indexed of that edge's two cycle neighbours. Cycles are returned sorted
    by length, then by edge sequence.
    """
    edges = topology.edges
    adj = [[] for _ in range(topology.vertex_count)]
    for i, (t, h) in enumerate(edges):
        adj[t].append((i, h))
        adj[h].append((i, t))

    found = []
    for e0, (a, b) in enumerate(edges):
        # simple paths b -> a through edges > e0 close a cycle whose minimum edge is e0
        path = [e0]
        on_path = {a, b}

        def extend(v):
            for e, w in adj[v]:
                if e <= e0:
                    continue
                if w == a:
                    found.append((a, path + [e]))
                elif w not in on_path:
                    on_path.add(w)
                    path.append(e)
                    extend(w)
                    path.pop()
                    on_path.discard(w)

        extend(b)

    cycles = []
    for start, p in found:
        if len(p) > 2 and p[-1] < p[1]:
            # reverse traversal, keeping e0 first
            p = [p[0]] + p[:0:-1]
            t, h = edges[p[0]]
            start = h if start == t else t
        cycles.append(_make_cycle(topology, start, p))
    cycles.sort(key=lambda c: (len(c), c.edges))
    return cycles


# -- clauses ----------------------------------------------------------------

@dataclass(frozen=True)
class BinaryClause:
    """``q_i == q_j`` (or ``q_i != q_j`` when ``negated``)."""

    i: int
    j: int
    negated: bool

    def evaluate(self, orientation: int) -> bool:
        equal = ((orientation >> self.i) & 1) == ((orientation >> self.j) & 1)
        return equal != self.negated

    def __str__(self):
        return f"{'~' if self.negated else ''}c{self.i}_{self.j}"


@dataclass(frozen=True)
class LoopClause:
    """Negated conjunction of binary clauses; false iff the cycle is directed."""

    cycle: int
    clauses: tuple[int, ...]


@dataclass(frozen=True)
class ClauseSet:
    n_edges: int
    binary_clauses: tuple[BinaryClause, ...]
    loop_clauses: tuple[LoopClause, ...]

    def evaluate_binary(self, orientation: int) -> list[bool]:
        return [c.evaluate(orientation) for c in self.binary_clauses]

    def evaluate_loops(self, orientation: int) -> list[bool]:
        c = self.evaluate_binary(orientation)
        return [not all(c[k] for k in lc.clauses) for lc in self.loop_clauses]


def clauses_for_cycles(topology: MultiloopTopology, cycles: Sequence[Cycle]) -> ClauseSet:
    keyed = {}
    per_cycle = []
    for cyc in cycles:
        seq = cyc.edge_sequence
        keys = []
        for (e1, p1), (e2, p2) in zip(seq, seq[1:]):
            i, j = min(e1, e2), max(e1, e2)
            keys.append((i, j, p1 != p2))
        per_cycle.append(keys)
        for k in keys:
            keyed.setdefault(k, None)
    ordered = sorted(keyed)
    index = {k: n for n, k in enumerate(ordered)}
    binary = tuple(BinaryClause(i, j, neg) for i, j, neg in ordered)
    loops = tuple(
        LoopClause(n, tuple(index[k] for k in keys)) for n, keys in enumerate(per_cycle)
    )
    return ClauseSet(topology.n_edges, binary, loops)


def build_clauses(topology: MultiloopTopology) -> ClauseSet:
    return clauses_for_cycles(topology, enumerate_cycles(topology))


# -- orientations -----------------------------------------------------------

def to_bitstring(orientation: int, n: int) -> str:
    return format(orientation, f"0{n}b") if n else ""


def from_bitstring(bits: str) -> int:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def mirror(orientation, n: int | None = None):
    """Invert every edge's flow. Accepts a bitstring or an int with ``n``."""
    if isinstance(orientation, str):
        return orientation.translate(str.maketrans("01", "10"))
    if n is None:
        raise TypeError("integer orientations need the edge count n")
    return orientation ^ ((1 << n) - 1)


def is_causal(orientation, clause_set: ClauseSet) -> bool:
    if isinstance(orientation, str):
        if len(orientation) != clause_set.n_edges:
            raise ValueError(
                f"orientation has {len(orientation)} bits, topology has {clause_set.n_edges} edges"
            )
        orientation = from_bitstring(orientation)
    return all(clause_set.evaluate_loops(orientation))


@dataclass(eq=False)
class CausalSet:
    """Sorted array of causal orientations of an ``n_edges``-edge topology."""

    orientations: np.ndarray
    n_edges: int
    fixed_qubit: tuple[int, int] | None = field(default=None)

    def __post_init__(self):
        self.orientations = np.unique(np.asarray(self.orientations, dtype=np.int64))

    @property
    def count(self) -> int:
        return int(self.orientations.size)

    def __len__(self):
        return self.count

    def __iter__(self):
        return (int(x) for x in self.orientations)

    def __contains__(self, x):
        if isinstance(x, str):
            x = from_bitstring(x)
        i = np.searchsorted(self.orientations, x)
        return bool(i < self.count and self.orientations[i] == x)

    def __eq__(self, other):
        if not isinstance(other, CausalSet):
            return NotImplemented
        return self.n_edges == other.n_edges and np.array_equal(
            self.orientations, other.orientations
        )

    def __repr__(self):
        return f"CausalSet(count={self.count}, n_edges={self.n_edges})"

    def bitstrings(self) -> list[str]:
        return [to_bitstring(x, self.n_edges) for x in self]

    def mirrored(self) -> "CausalSet":
        full = (1 << self.n_edges) - 1
        return CausalSet(self.orientations ^ full, self.n_edges)

    def with_mirrors(self) -> "CausalSet":
        return CausalSet(
            np.concatenate([self.orientations, self.mirrored().orientations]), self.n_edges
        )

    def is_mirror_closed(self) -> bool:
        return self.mirrored() == CausalSet(self.orientations, self.n_edges)


def enumerate_causal(
    topology: MultiloopTopology,
    fixed_qubit: tuple[int, int] | None = None,
    max_edges: int = DEFAULT_BRUTE_FORCE_CAP,
    chunk: int = 1 << 20,
) -> CausalSet:
    """Exhaustively test all 2^n orientations for directed cycles."""
    n = topology.n_edges
    if n > max_edges:
        raise TopologyError(
            f"{n} edges is too large for exhaustive enumeration (cap {max_edges})"
        )
    if fixed_qubit is not None:
        idx, val = fixed_qubit
        if not 0 <= idx < n or val not in (0, 1):
            raise ValueError(f"invalid fixed qubit {fixed_qubit} for {n} edges")
    cycles = enumerate_cycles(topology)
    masks = [(c.mask(), c.parity_mask()) for c in cycles]
    total = 1 << n
    kept = []
    for lo in range(0, total, chunk):
        x = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        ok = np.ones(x.size, dtype=bool)
        for m, p in masks:
            # edge along traversal  <=>  bit xor parity == 1
            along = (x ^ p) & m
            ok &= (along != m) & (along != 0)
        if fixed_qubit is not None:
            ok &= ((x >> idx) & 1) == val
        kept.append(x[ok])
    return CausalSet(np.concatenate(kept), n, fixed_qubit)


def is_acyclic(topology: MultiloopTopology, orientation: int) -> bool:
    """Kahn's algorithm on the directed multigraph; no use of cycles or clauses."""
    indeg = [0] * topology.vertex_count
    out = [[] for _ in range(topology.vertex_count)]
    for u, v in topology.directed_edges(orientation):
        out[u].append(v)
        indeg[v] += 1
    ready = [v for v, d in enumerate(indeg) if d == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for v in out[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    return seen == topology.vertex_count


def iter_orientations(n: int) -> Iterable[int]:
    return range(1 << n)
