"""Phase-table synthesis, gate lowering, and the circuit file format."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iqpsynth.decompose import build_multiplicity_map, round_to_dyadic
from iqpsynth.errors import (
    DimensionMismatch,
    FormatError,
    LengthMismatch,
    MassOutOfRange,
    OutcomeOutOfRange,
    TooManyQubits,
)
from iqpsynth.probdist import tv_distance, validate
from iqpsynth.sim import (
    StateVector,
    apply_hadamard_layer,
    full_statevector,
    is_uma,
    marginal_mixture,
    simulate_gates,
)
from iqpsynth.synth import (
    GateList,
    PhaseTable,
    approx_phase_table,
    exact_phase_table,
    gates_to_phases,
    parse_circuit,
    serialize_circuit,
    uma_phases_for_pair,
    walsh_lower,
)

from helpers import random_dist


def row_state(row):
    amps = np.exp(1j * row.theta) * 2.0 ** (-0.5 * row.n)
    return StateVector(row.n, amps)


def measured(row):
    out = apply_hadamard_layer(row_state(row), range(row.n))
    return np.abs(out.amps) ** 2


def test_uma_frozen_half_half():
    row = uma_phases_for_pair(0, 1, 0.5, 1)
    assert np.allclose(row.theta, [0.0, np.pi / 2], atol=1e-15)
    assert abs(row.theta_star - np.pi / 2) < 1e-15
    probs = measured(row)
    assert np.allclose(probs, [0.5, 0.5], atol=1e-12)


def test_uma_degenerate_pair_takes_all_mass():
    row = uma_phases_for_pair(3, 3, 0.25, 2)
    assert row.mass == 1.0 and row.theta_star == 0.0
    probs = measured(row)
    assert abs(probs[3] - 1.0) <= 1e-12


def test_uma_extreme_masses():
    lo = measured(uma_phases_for_pair(1, 2, 0.0, 2))
    assert abs(lo[2] - 1.0) <= 1e-12 and lo[1] <= 1e-12
    hi = measured(uma_phases_for_pair(1, 2, 1.0, 2))
    assert abs(hi[1] - 1.0) <= 1e-12 and hi[2] <= 1e-12


def test_uma_validation():
    with pytest.raises(OutcomeOutOfRange):
        uma_phases_for_pair(4, 0, 0.5, 2)
    with pytest.raises(OutcomeOutOfRange):
        uma_phases_for_pair(0, -1, 0.5, 2)
    with pytest.raises(MassOutOfRange):
        uma_phases_for_pair(0, 1, 1.5, 2)
    with pytest.raises(MassOutOfRange):
        uma_phases_for_pair(0, 1, float("nan"), 2)
    # dust beyond the boundary is clamped, not rejected
    assert uma_phases_for_pair(0, 1, 1.0 + 1e-13, 2).mass == 1.0


@settings(derandomize=True, max_examples=300, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.integers(0, (1 << n) - 1),
            st.integers(0, (1 << n) - 1),
            st.floats(0.0, 1.0, allow_nan=False),
        )
    )
)
def test_uma_support_and_mass(args):
    n, b1, b2, mass = args
    row = uma_phases_for_pair(b1, b2, mass, n)
    assert is_uma(row_state(row), tol=1e-12)
    probs = measured(row)
    off = [p for b, p in enumerate(probs) if b not in (b1, b2)]
    assert max(off, default=0.0) <= 1e-12
    assert abs(probs[b1] - row.mass) <= 1e-12


def test_exact_table_shape_and_marginal():
    p = validate([0.1, 0.1, 0.3, 0.5], 2)
    pt = exact_phase_table(p)
    assert pt.m == p.n + 1 and pt.n == p.n
    assert tv_distance(marginal_mixture(pt), p) <= 1e-9


def test_exact_table_point_mass_is_all_zero():
    # every mixture component is the same point mass, so every row is flat
    pt = exact_phase_table(validate([1.0, 0.0, 0.0, 0.0], 2))
    assert not pt.theta.any()


@settings(derandomize=True, max_examples=120, deadline=None)
@given(st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_exact_table_property(n, seed):
    rng = np.random.default_rng(seed)
    p = validate(random_dist(rng, n), n)
    pt = exact_phase_table(p)
    # every hidden row should land on at most two visible outcomes
    for j in range(1 << pt.m):
        amps = np.exp(1j * pt.row(j)) * 2.0 ** (-0.5 * n)
        out = apply_hadamard_layer(StateVector(n, amps), range(n))
        assert np.sum(np.abs(out.amps) ** 2 > 1e-12) <= 2
    assert tv_distance(marginal_mixture(pt), p) <= 1e-12


@settings(derandomize=True, max_examples=120, deadline=None)
@given(
    st.integers(0, 3).flatmap(
        lambda n: st.tuples(
            st.just(n), st.integers(n, n + 5), st.integers(0, 2**32 - 1)
        )
    )
)
def test_approx_table_hits_dyadic_target(args):
    n, m, seed = args
    rng = np.random.default_rng(seed)
    p = validate(random_dist(rng, n), n)
    d = round_to_dyadic(p, m)
    pt = approx_phase_table(build_multiplicity_map(d, n), n)
    assert pt.m == m and pt.n == n
    # parity tables only ever use phases 0 and pi
    assert np.all((pt.theta == 0.0) | (pt.theta == np.pi))
    assert tv_distance(marginal_mixture(pt), d.q) <= 1e-12
    assert tv_distance(marginal_mixture(pt), p) <= 0.5 * 2.0 ** (n - m)


def test_phase_table_canonicalizes():
    pt = PhaseTable(0, 1, [2.0 * np.pi, -np.pi])
    assert pt.theta.tolist() == [0.0, np.pi]
    with pytest.raises(LengthMismatch):
        PhaseTable(0, 1, [0.0, 0.0, 0.0])
    with pytest.raises(LengthMismatch):
        PhaseTable(0, 1, [np.inf, 0.0])
    with pytest.raises(OutcomeOutOfRange):
        pt.row(2)


def test_gatelist_validation():
    with pytest.raises(LengthMismatch):
        GateList(2, 0.0, (((), 0.5),))
    with pytest.raises(LengthMismatch):
        GateList(2, 0.0, (((0,), 0.5), ((0,), 0.25)))
    with pytest.raises(DimensionMismatch):
        GateList(2, 0.0, (((2,), 0.5),))
    with pytest.raises(LengthMismatch):
        GateList(2, 0.0, (((1, 0), 0.5),))
    with pytest.raises(LengthMismatch):
        GateList(2, float("inf"), ())


def test_gatelist_canonicalizes_angles():
    g = GateList(1, 0.0, (((0,), 7.0),))
    assert abs(g.gates[0][1] - (7.0 - 2.0 * np.pi)) < 1e-15
    assert GateList(1, 0.0, (((0,), -np.pi),)).gates[0][1] == np.pi
    # equivalent angles drive identical simulations
    h = GateList(1, 0.0, (((0,), 7.0 - 2.0 * np.pi),))
    assert np.array_equal(simulate_gates(g).amps, simulate_gates(h).amps)


def test_walsh_frozen_single_qubit():
    pt = PhaseTable(0, 1, [0.0, np.pi])
    g = walsh_lower(pt)
    assert abs(g.global_phase - np.pi / 2) < 1e-15
    assert len(g.gates) == 1
    support, angle = g.gates[0]
    assert support == (0,) and abs(angle + np.pi / 2) < 1e-15


def test_gates_to_phases_frozen_single_qubit():
    g = GateList(1, np.pi / 2, (((0,), np.pi / 2),))
    pt = gates_to_phases(g)
    assert np.allclose(pt.theta, [np.pi, 0.0], atol=1e-15)


@settings(derandomize=True, max_examples=150, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_walsh_round_trip(m, n, seed):
    rng = np.random.default_rng(seed)
    pt = PhaseTable(m, n, rng.uniform(0.0, 2.0 * np.pi, 1 << (m + n)))
    g = walsh_lower(pt)
    assert len(g.gates) <= (1 << (m + n)) - 1
    back = gates_to_phases(g, m)
    delta = np.abs(back.theta - pt.theta)
    delta = np.minimum(delta, 2.0 * np.pi - delta)
    assert delta.max() <= 1e-9


@settings(derandomize=True, max_examples=100, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2**32 - 1))
def test_walsh_is_linear(m, n, seed):
    # entries below pi keep the entrywise sum free of mod-2pi wraparound
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, np.pi, 1 << (m + n))
    b = rng.uniform(0.0, np.pi, 1 << (m + n))
    g_sum = walsh_lower(PhaseTable(m, n, a + b))
    g_a = walsh_lower(PhaseTable(m, n, a))
    g_b = walsh_lower(PhaseTable(m, n, b))
    merged = {}
    for support, angle in g_a.gates + g_b.gates:
        merged[support] = merged.get(support, 0.0) + angle
    summed = dict(g_sum.gates)
    for support in merged.keys() | summed.keys():
        d = abs(merged.get(support, 0.0) - summed.get(support, 0.0)) % (2.0 * np.pi)
        assert min(d, 2.0 * np.pi - d) <= 1e-9
    d = abs((g_a.global_phase + g_b.global_phase) - g_sum.global_phase)
    d %= 2.0 * np.pi
    assert min(d, 2.0 * np.pi - d) <= 1e-9


@settings(derandomize=True, max_examples=100, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2**32 - 1))
def test_gate_path_equals_table_path(m, n, seed):
    rng = np.random.default_rng(seed)
    pt = PhaseTable(m, n, rng.uniform(0.0, 2.0 * np.pi, 1 << (m + n)))
    total = m + n
    want = apply_hadamard_layer(full_statevector(pt), range(total))
    got = simulate_gates(walsh_lower(pt))
    assert np.abs(got.amps - want.amps).max() <= 1e-9


def test_walsh_drops_null_rotations():
    pt = PhaseTable(0, 2, np.full(4, 0.75))  # constant table: pure global phase
    g = walsh_lower(pt)
    assert len(g.gates) == 0
    assert abs(g.global_phase - 0.75) < 1e-15


def test_walsh_qubit_cap(monkeypatch):
    monkeypatch.setenv("IQP_MAX_QUBITS", "3")
    with pytest.raises(TooManyQubits):
        walsh_lower(PhaseTable(2, 2, np.zeros(16)))
    with pytest.raises(TooManyQubits):
        gates_to_phases(GateList(4, 0.0, ()), 2)


def test_gates_to_phases_split_bounds():
    g = GateList(2, 0.0, ())
    with pytest.raises(DimensionMismatch):
        gates_to_phases(g, 3)


def round_trip(m, n, table=None, gates=None, mode=None):
    return parse_circuit(serialize_circuit(m, n, table=table, gates=gates, mode=mode))


@settings(derandomize=True, max_examples=100, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_circuit_file_round_trip(m, n, seed):
    rng = np.random.default_rng(seed)
    pt = PhaseTable(m, n, rng.uniform(0.0, 2.0 * np.pi, 1 << (m + n)))
    g = walsh_lower(pt)
    circ = round_trip(m, n, table=pt, gates=g, mode="exact")
    assert circ.m == m and circ.n == n and circ.mode == "exact"
    assert np.array_equal(circ.table.theta, pt.theta)
    assert circ.gates.gates == g.gates
    assert circ.gates.global_phase == g.global_phase


def test_circuit_file_blocks_are_optional():
    pt = PhaseTable(1, 1, [0.0, 0.5, 1.0, 1.5])
    only_table = round_trip(1, 1, table=pt)
    assert only_table.gates is None and only_table.table is not None
    g = walsh_lower(pt)
    only_gates = round_trip(1, 1, gates=g)
    assert only_gates.table is None
    assert only_gates.gates.gates == g.gates
    with pytest.raises(FormatError):
        serialize_circuit(1, 1)


def test_circuit_parser_accepts_comments_and_blanks():
    text = "# a comment\n\nHEADER m=1 n=1\n  # mode: approx\nPHASE 01 1.5 # trailing\n"
    circ = parse_circuit(text)
    assert circ.mode == "approx"
    assert circ.table.theta.tolist() == [0.0, 1.5, 0.0, 0.0]


def test_circuit_parser_rejects_malformed():
    bad = (
        "PHASE 00 1.0\n",  # nothing before HEADER
        "HEADER m=1\n",
        "HEADER m=1 n=x\n",
        "HEADER m=-1 n=1\n",
        "HEADER m=1 n=1\nHEADER m=1 n=1\n",
        "HEADER m=1 n=1\nPHASE 0 1.0\n",
        "HEADER m=1 n=1\nPHASE 00 1.0\nPHASE 00 2.0\n",
        "HEADER m=1 n=1\nPHASE 00 nan\n",
        "HEADER m=1 n=1\nGLOBALPHASE 1\nGLOBALPHASE 2\n",
        "HEADER m=1 n=1\nXROT 0.5 q0,q0\n",
        "HEADER m=1 n=1\nXROT 0.5 q2\n",
        "HEADER m=1 n=1\nXROT 0.5\n",
        "HEADER m=1 n=1\nXROT 0.5 r0\n",
        "HEADER m=1 n=1\nFROBNICATE 12\n",
    )
    for text in bad:
        with pytest.raises(FormatError):
            parse_circuit(text)


def test_circuit_parser_reports_line_numbers():
    with pytest.raises(FormatError, match="line 3"):
        parse_circuit("HEADER m=1 n=1\nPHASE 00 0.5\nPHASE 00 0.7\n")


def test_zero_qubit_circuit_round_trip():
    pt = PhaseTable(0, 0, [1.25])
    circ = round_trip(0, 0, table=pt)
    assert circ.table.theta.tolist() == [1.25]
