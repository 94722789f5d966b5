import random

import pytest

from causalgrover import bundled
from causalgrover.grover import RegisterLayout
from causalgrover.topology import MultiloopTopology, build_clauses, enumerate_cycles

CORPUS_QUBIT_BUDGET = 20

_acceptance_lines = []


def random_multigraph(rng, n_edges, n_vertices):
    """Random connected multigraph: a random spanning tree plus extra edges."""
    order = list(range(n_vertices))
    rng.shuffle(order)
    pairs = []
    for k in range(1, n_vertices):
        pairs.append((order[k], order[rng.randrange(k)]))
    while len(pairs) < n_edges:
        u, v = rng.sample(range(n_vertices), 2)
        pairs.append((u, v))
    rng.shuffle(pairs)
    edges = tuple((u, v) if rng.random() < 0.5 else (v, u) for u, v in pairs)
    return MultiloopTopology(n_vertices, edges)


def qubits_needed(topology):
    cs = build_clauses(topology)
    # worst case: ancilla added
    return RegisterLayout.build(topology.n_edges, len(cs.binary_clauses), len(cs.loop_clauses), True).total


def make_corpus(size=240, seed=20221):
    """Connected multigraphs with 2-8 edges and at least one cycle, within the qubit budget."""
    rng = random.Random(seed)
    corpus, seen = [], set()
    while len(corpus) < size:
        n = rng.randint(2, 8)
        v = rng.randint(2, n)
        t = random_multigraph(rng, n, v)
        if t.edges in seen or not enumerate_cycles(t):
            continue
        if qubits_needed(t) > CORPUS_QUBIT_BUDGET:
            continue
        seen.add(t.edges)
        corpus.append(t)
    return corpus


CORPUS = make_corpus()


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


@pytest.fixture
def fig1():
    return bundled.load("two-eloop-six-edge")


@pytest.fixture
def triangle():
    return bundled.load("triangle")


@pytest.fixture
def banana():
    return bundled.load("banana")


@pytest.fixture
def single_edge():
    return bundled.load("single-edge")


@pytest.fixture
def record_acceptance():
    def record(criterion, passed, detail=""):
        _acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
