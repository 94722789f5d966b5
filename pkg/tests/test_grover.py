import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from causalgrover.grover import (
    PlanError,
    RegisterLayout,
    SeparationError,
    best_iterations,
    clause_compute_gates,
    diffuser_gates,
    extract_causal,
    oracle_mark_gate,
    parse_gate_list,
    plan,
    program_to_text,
    run,
    simulate,
    synthesize,
    verify,
    with_iterations,
)
from causalgrover.statevector import (
    H,
    X,
    apply_gates,
    basis_state,
    init_state,
    probabilities,
)
from causalgrover.topology import MultiloopTopology, build_clauses, enumerate_causal, is_causal


def pipeline(topology, t=None, **kw):
    cs = build_clauses(topology)
    p = plan(enumerate_causal(topology).count, topology.n_edges, **kw)
    if t is not None:
        p = with_iterations(p, t)
    return cs, p, synthesize(cs, p)


def marked_set(topology, p):
    return enumerate_causal(topology, p.fixed_qubit)


# -- planning ---------------------------------------------------------------

def test_plan_fig1():
    p = plan(46, 6)
    assert p.theta_raw == pytest.approx(math.asin(math.sqrt(46 / 64)), abs=1e-12)
    assert p.theta_raw > math.pi / 6 + p.tolerance
    assert p.fixed_qubit == (0, 1)
    assert not p.ancilla_added
    assert p.n_solutions == 23 and p.n_states == 64
    assert p.theta == pytest.approx(math.asin(math.sqrt(23 / 64)), abs=1e-12)
    assert p.feasible
    assert p.iterations == 1


def test_plan_no_modification_needed():
    p = plan(1, 4)
    assert p.theta == pytest.approx(math.asin(0.25), abs=1e-15)
    assert p.fixed_qubit is None and not p.ancilla_added and p.feasible
    # scan t=1..ceil(pi/4θ)=4 by hand
    scores = {t: math.sin((2 * t + 1) * p.theta) ** 2 for t in range(1, 5)}
    assert max(scores, key=scores.get) == 3 == p.iterations
    assert p.success_probability == pytest.approx(0.9613, abs=1e-4)


def test_plan_degenerate():
    with pytest.raises(PlanError, match="no causal configurations"):
        plan(0, 3)
    with pytest.raises(PlanError, match="Grover degenerate"):
        plan(8, 3)


def test_plan_ancilla_after_fixing():
    p = plan(6, 3)
    assert p.fixed_qubit == (0, 1) and p.ancilla_added
    assert p.n_states == 16 and p.n_solutions == 3
    assert p.feasible


def test_plan_infeasible_flagged():
    p = plan(6, 3, ancilla=False)
    assert p.fixed_qubit is not None and not p.ancilla_added
    assert not p.feasible
    assert p.iterations >= 1


def test_plan_rejects_odd_halving():
    with pytest.raises(PlanError, match="odd"):
        plan(7, 3, fixing=True)


@given(st.integers(1, 2**12 - 1), st.just(12))
def test_best_iterations_is_argmax(r, n):
    theta = math.asin(math.sqrt(r / 2**n))
    t = best_iterations(theta)
    t_max = max(1, math.ceil(math.pi / (4 * theta)))
    vals = [math.sin((2 * k + 1) * theta) ** 2 for k in range(1, t_max + 1)]
    assert 1 <= t <= t_max
    assert vals[t - 1] == max(vals)


@given(st.integers(2, 14).flatmap(lambda n: st.tuples(st.integers(1, 2 ** (n - 1) - 1).map(lambda h: 2 * h), st.just(n))))
def test_plan_theta_in_range(rn):
    r, n = rn
    p = plan(r, n)
    assert 0 < p.theta < math.pi / 2
    assert p.feasible  # fixing + ancilla always reach the bound for mirror-closed counts


# -- synthesis --------------------------------------------------------------

def test_fig1_program(fig1):
    cs, p, prog = pipeline(fig1)
    lay = prog.layout
    assert prog.qubit_count == 16
    assert lay.q == tuple(range(6)) and lay.c == tuple(range(6, 12))
    assert lay.a == (12, 13, 14) and lay.out == 15 and lay.ancilla == ()
    (mark,) = prog.segment("oracle-mark", 1)
    assert mark.target == 15
    assert set(mark.controls) == {(12, 1), (13, 1), (14, 1), (0, 1)}


def test_triangle_register_count(triangle):
    cs = build_clauses(triangle)
    p = plan(6, 3, fixing=True, ancilla=False)
    assert synthesize(cs, p).qubit_count == 7
    p = plan(6, 3)
    assert synthesize(cs, p).qubit_count == 8


def test_uncompute_is_reverse(fig1):
    _, p, prog = pipeline(fig1, t=2)
    for it in (1, 2):
        assert prog.segment("clause-uncompute", it) == prog.segment("clause-compute", it)[::-1]


def test_tree_rejected_upstream():
    t = MultiloopTopology(3, ((0, 1), (1, 2)))
    with pytest.raises(PlanError, match="all configurations causal"):
        plan(enumerate_causal(t).count, t.n_edges)
    cs = build_clauses(t)
    with pytest.raises(PlanError, match="no loop clauses"):
        synthesize(cs, plan(2, 2))


def test_plan_edge_count_mismatch(fig1):
    with pytest.raises(PlanError, match="edges"):
        synthesize(build_clauses(fig1), plan(6, 3))


def test_layout_overflow(fig1):
    from causalgrover.statevector import SimulatorError

    with pytest.raises(SimulatorError, match="cap"):
        synthesize(build_clauses(fig1), plan(46, 6), max_qubits=12)


def test_program_text_round_trip(fig1):
    _, _, prog = pipeline(fig1)
    text = program_to_text(prog)
    assert text.startswith("# qubits 16 q=0-5 c=6-11 a=12-14 out=15")
    assert "MCX 15 12:1 13:1 14:1 0:1" in text
    assert parse_gate_list(text) == prog.gates
    with pytest.raises(ValueError, match="line 1"):
        parse_gate_list("CX six 0:1")


# -- execution --------------------------------------------------------------

def test_fig1_plateaus(fig1):
    _, p, prog = pipeline(fig1)
    h = run(prog)
    probs = h.probabilities
    levels = np.unique(np.round(probs, 12))
    assert levels.size == 2
    high = probs > probs.mean()
    assert high.sum() == 23
    success = math.sin(3 * math.asin(math.sqrt(23 / 64))) ** 2
    assert probs[high] == pytest.approx(np.full(23, success / 23), abs=1e-12)
    assert probs[~high] == pytest.approx(np.full(41, (1 - success) / 41), abs=1e-12)
    assert set(np.flatnonzero(high)) == set(enumerate_causal(fig1, (0, 1)))


def test_zero_iterations_uniform(fig1):
    _, p, prog = pipeline(fig1, t=0)
    assert np.allclose(run(prog).probabilities, 1 / 64, atol=1e-15)


def test_extract_fig1(fig1):
    _, p, prog = pipeline(fig1)
    found = extract_causal(run(prog), p)
    assert found.count == 46
    assert found == enumerate_causal(fig1)
    assert found.is_mirror_closed()


def test_extract_without_amplification(fig1):
    _, p, prog = pipeline(fig1, t=0)
    with pytest.raises(SeparationError, match="plateaus not separated"):
        extract_causal(run(prog), p)


def test_extract_triangle(triangle):
    _, p, prog = pipeline(triangle)
    assert extract_causal(run(prog), p) == enumerate_causal(triangle)


def test_extract_sampled(fig1):
    _, p, prog = pipeline(fig1)
    h = run(prog, shots=100 * 64, seed=7)
    assert h.shots == 6400
    assert extract_causal(h, p) == enumerate_causal(fig1)


@pytest.mark.parametrize("name", ["two-eloop-six-edge", "triangle", "banana"])
def test_verify_bundled(name):
    from causalgrover import bundled

    r = verify(bundled.load(name))
    assert r.sets_equal and r.plateaus_match and r.ok
    assert any("sets equal: yes" in line for line in r.lines())


def test_verify_reports_degenerate(single_edge):
    r = verify(single_edge)
    assert r.plan is None and r.quantum is None
    assert "Grover degenerate" in r.error


def test_verify_sampled(banana):
    r = verify(banana, shots=2000, seed=1)
    assert r.sets_equal and r.predicted is None


# -- invariants ---------------------------------------------------------------

def _zero_probability(state, qubit):
    return probabilities(state, [qubit]).probabilities[0]


def test_uncompute_restores_work_registers(corpus, fig1):
    for topo in [fig1] + corpus[::8]:
        _, p, prog = pipeline(topo, t=2)
        for it in (1, 2):
            for seg in ("clause-uncompute", "diffuser"):
                state = simulate(prog, prog.upto(seg, it))
                for q in prog.layout.c + prog.layout.a:
                    assert abs(_zero_probability(state, q) - 1) < 1e-9


def test_two_plateau_and_theta_t_laws(corpus, fig1):
    for topo in [fig1] + corpus[::6]:
        _, base, _ = pipeline(topo)
        marked = marked_set(topo, base)
        cs = build_clauses(topo)
        for t in (1, 2, 3):
            p = with_iterations(base, t)
            probs = run(synthesize(cs, p)).probabilities
            mask = np.zeros(probs.size, dtype=bool)
            mask[marked.orientations] = True
            hi, lo = p.plateaus()
            assert np.abs(probs[mask] - hi).max() < 1e-10
            assert np.abs(probs[~mask] - lo).max() < 1e-10
            if not p.ancilla_added:
                assert abs(probs[mask].sum() - math.sin((2 * t + 1) * p.theta) ** 2) < 1e-9


def test_theta_t_law_with_ancilla(triangle):
    cs = build_clauses(triangle)
    base = plan(6, 3)
    assert base.ancilla_added
    for t in (1, 2, 3):
        p = with_iterations(base, t)
        prog = synthesize(cs, p)
        state = simulate(prog)
        full = probabilities(state, prog.layout.search).probabilities
        # marked: causal q-strings with q0 = 1 and ancilla (bit 3) = 0
        idx = np.arange(full.size)
        q = idx & 0b111
        mask = np.isin(q, list(enumerate_causal(triangle, (0, 1)))) & ((idx >> 3) == 0)
        assert abs(full[mask].sum() - math.sin((2 * t + 1) * p.theta) ** 2) < 1e-9


def _oracle_gates(clause_set, p):
    lay = RegisterLayout.build(
        clause_set.n_edges, len(clause_set.binary_clauses), len(clause_set.loop_clauses), p.ancilla_added
    )
    compute = clause_compute_gates(clause_set, lay)
    return lay, compute + [oracle_mark_gate(lay, p.fixed_qubit)] + compute[::-1]


def test_oracle_soundness_per_basis_state(fig1, triangle, banana):
    for topo in (fig1, triangle, banana):
        cs = build_clauses(topo)
        p = plan(enumerate_causal(topo).count, topo.n_edges, fixing=True, ancilla=False)
        lay, oracle = _oracle_gates(cs, p)
        m = lay.total
        for x in range(1 << topo.n_edges):
            s = basis_state(x, m)
            apply_gates(s, [X(lay.out), H(lay.out)])
            before = s.amplitudes.copy()
            apply_gates(s, oracle)
            overlap = np.vdot(before, s.amplitudes).real
            expect = is_causal(x, cs) and (x & 1) == 1
            assert overlap == pytest.approx(-1.0 if expect else 1.0, abs=1e-12)


def test_oracle_soundness_corpus(corpus):
    # on a uniform q register the oracle is diagonal, so each amplitude's sign is f(x)
    for topo in corpus:
        cs = build_clauses(topo)
        for fixing in (False, True):
            p = plan(enumerate_causal(topo).count, topo.n_edges, fixing=fixing, ancilla=False)
            lay, oracle = _oracle_gates(cs, p)
            s = init_state(lay.total)
            apply_gates(s, [H(q) for q in lay.q] + [X(lay.out), H(lay.out)])
            before = s.amplitudes.copy()
            apply_gates(s, oracle)
            ratio = np.divide(s.amplitudes, before, out=np.ones_like(before), where=before != 0)
            assert np.allclose(np.abs(s.amplitudes), np.abs(before), atol=1e-12)
            flipped = {int(x) & ((1 << topo.n_edges) - 1) for x in np.flatnonzero(ratio.real < 0)}
            expect = set(enumerate_causal(topo, p.fixed_qubit))
            assert flipped == expect


def test_diffuser_matrix():
    for m in (1, 2, 3, 4):
        gates = diffuser_gates(range(m))
        cols = []
        for k in range(1 << m):
            s = basis_state(k, m)
            apply_gates(s, gates)
            cols.append(s.amplitudes)
        D = np.stack(cols, axis=1)
        s_vec = np.full(1 << m, 2 ** (-m / 2))
        target = 2 * np.outer(s_vec, s_vec) - np.eye(1 << m)
        assert np.abs(D - target).max() < 1e-12


def test_extract_mirror_closed(corpus):
    for topo in corpus[::10]:
        _, p, prog = pipeline(topo)
        assert extract_causal(run(prog), p).is_mirror_closed()
