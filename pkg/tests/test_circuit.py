"""Tests for the circuit IR, text format, validator and generators."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from zxgnd.circuit import (
    CircuitError,
    Gate,
    HybridCircuit,
    ParseError,
    ValidationError,
    WireType,
    circuit_inputs,
    circuit_outputs,
    parse_circuit,
    serialize_circuit,
    validate_circuit,
)
from zxgnd.generate import gen_clifford_t_meas, gen_parity
from zxgnd.phase import normalize_phase


def test_parse_single_hadamard():
    c = parse_circuit("qubits 1\nh q0")
    assert c.wires == [WireType.QUANTUM]
    assert c.gates == [Gate.h(0)]


def test_parse_measurement():
    c = parse_circuit("qubits 1\nbits 1\nmeasure q0 -> c0")
    assert c.gates == [Gate.measure(0, 1)]
    assert circuit_inputs(c) == [0]
    assert circuit_outputs(c) == [1]


def test_parse_type_error_names_gate_and_wire():
    with pytest.raises(ParseError) as err:
        parse_circuit("qubits 1\nbits 1\nxor c0 q0")
    assert "xor" in str(err.value) and "q0" in str(err.value)
    assert "line 3" in str(err.value)


def test_parse_reports_line_numbers():
    with pytest.raises(ParseError) as err:
        parse_circuit("qubits 2\n\ncnot q0\n")
    assert "line 3" in str(err.value)


def test_parse_comments_and_blank_lines():
    c = parse_circuit("# a comment\nqubits 2\n\ncnot q0 q1  # inline\n")
    assert c.gates == [Gate.cnot(0, 1)]


def test_serialize_empty_circuit():
    c = HybridCircuit(wires=[WireType.QUANTUM] * 2)
    assert serialize_circuit(c) == "qubits 2\n"


def test_serialize_cnot():
    c = HybridCircuit(wires=[WireType.QUANTUM] * 2, gates=[Gate.cnot(0, 1)])
    assert serialize_circuit(c) == "qubits 2\ncnot q0 q1\n"


def test_serialize_phase_in_pi_units():
    c = HybridCircuit(wires=[WireType.QUANTUM], gates=[Gate.rz(0, Fraction(1, 4))])
    assert serialize_circuit(c) == "qubits 1\nrz 1/4 q0\n"


def test_cz_spellings_disambiguate():
    quantum = parse_circuit("qubits 2\ncz q0 q1")
    assert quantum.gates == [Gate.cz(0, 1)]
    controlled = parse_circuit("qubits 1\nbits 1\ncz c0 q0")
    assert controlled.gates == [Gate.ctrl_z(1, 0)]
    assert serialize_circuit(quantum).strip().endswith("cz q0 q1")
    assert serialize_circuit(controlled).strip().endswith("cz c0 q0")


def test_liveness_rules():
    # measure kills the qubit: reusing it is an error
    with pytest.raises(CircuitError):
        parse_circuit("qubits 1\nbits 1\nmeasure q0 -> c0\nh q0")
    # prepare brings it back
    parse_circuit("qubits 1\nbits 1\nmeasure q0 -> c0\nprepare c0 -> q0\nh q0")
    # qinit requires a dead wire: first touch decides
    c = parse_circuit("qubits 1\nqinit q0")
    assert circuit_inputs(c) == []
    assert circuit_outputs(c) == [0]
    with pytest.raises(CircuitError):
        parse_circuit("qubits 1\nh q0\nqinit q0")
    # measure onto a live classical wire is rejected
    with pytest.raises(CircuitError):
        parse_circuit("qubits 1\nbits 1\nnot c0\nmeasure q0 -> c0")


def test_wire_order_is_canonical():
    with pytest.raises(ValidationError):
        HybridCircuit(wires=[WireType.CLASSICAL, WireType.QUANTUM])


def test_out_of_range_wire():
    with pytest.raises(ParseError):
        parse_circuit("qubits 1\nh q1")


@pytest.mark.parametrize("seed", range(250))
def test_round_trip_clifford(seed):
    c = gen_clifford_t_meas(2 + seed % 3, 5 + seed % 26, 0.2, 0.2, seed)
    assert parse_circuit(serialize_circuit(c)) == c


@pytest.mark.parametrize("seed", range(250))
def test_round_trip_parity(seed):
    c = gen_parity(2 + seed % 9, 5 + seed % 26, seed)
    assert parse_circuit(serialize_circuit(c)) == c


@given(st.integers(0, 2**32), st.integers(0, 10**6))
def test_mutating_an_operand_type_is_rejected(seed, pick):
    c = gen_clifford_t_meas(3, 10, 0.0, 0.4, seed)
    if c.n_bits == 0:
        c.add_bit()
    validate_circuit(c)
    g_idx = pick % len(c.gates)
    gate = c.gates[g_idx]
    o_idx = (pick // len(c.gates)) % len(gate.operands)
    old = gate.operands[o_idx]
    # swap in a wire of the opposite type
    wrong = c.bit(0) if c.wires[old] is WireType.QUANTUM else c.qubit(0)
    operands = list(gate.operands)
    operands[o_idx] = wrong
    c.gates[g_idx] = Gate(gate.kind, tuple(operands), gate.phase)
    with pytest.raises(ValidationError):
        validate_circuit(c)


def test_generator_empty():
    c = gen_clifford_t_meas(2, 0, 0.4, 0.0, 123)
    assert c.gates == []
    assert c.n_qubits == 2


def test_generator_zero_t_probability():
    c = gen_clifford_t_meas(2, 10, 0.0, 0.4, 1)
    assert all(not (g.kind == "rz" and g.phase == Fraction(1, 4)) for g in c.gates)


def test_generator_bad_split():
    with pytest.raises(ValueError):
        gen_clifford_t_meas(2, 10, 0.3, 0.3, 0)
    with pytest.raises(ValueError):
        gen_clifford_t_meas(1, 10, 0.2, 0.2, 0)


def test_clifford_generator_statistics():
    c = gen_clifford_t_meas(8, 10**4, 0.2, 0.2, 7)
    counts = {"cnot": 0, "s": 0, "hsh": 0, "t": 0, "meas": 0}
    for g in c.gates:
        if g.kind == "cnot":
            counts["cnot"] += 1
        elif g.kind == "rx":
            counts["hsh"] += 1
        elif g.kind == "rz" and g.phase == Fraction(1, 2):
            counts["s"] += 1
        elif g.kind == "rz":
            counts["t"] += 1
        elif g.kind == "measure":
            counts["meas"] += 1
    draws = sum(counts.values())
    assert draws == 10**4
    for kind, p in [("cnot", 0.2), ("s", 0.2), ("hsh", 0.2), ("t", 0.2), ("meas", 0.2)]:
        assert abs(counts[kind] / draws - p) < 0.1


def test_clifford_generator_draw_count():
    c = gen_clifford_t_meas(8, 256, 0.2, 0.2, 7)
    n_meas = sum(1 for g in c.gates if g.kind == "measure")
    assert len(c.gates) - n_meas == 256
    validate_circuit(c)


def test_parity_generator_empty():
    c = gen_parity(10, 0, 99)
    assert c.n_bits == 10 and c.n_qubits == 0 and c.gates == []


def test_parity_generator_gate_closure():
    c = gen_parity(10, 100, 3)
    assert len(c.gates) == 100
    assert {g.kind for g in c.gates} <= {"not", "xor", "fanout"}
    validate_circuit(c)


def test_parity_generator_statistics():
    c = gen_parity(2, 10**4, 5)
    counts = {"not": 0, "xor": 0, "fanout": 0}
    for g in c.gates:
        counts[g.kind] += 1
    for kind, p in [("not", 0.3), ("xor", 0.3), ("fanout", 0.4)]:
        assert abs(counts[kind] / 10**4 - p) < 0.05


def test_generators_are_deterministic():
    a = gen_clifford_t_meas(4, 50, 0.1, 0.3, 42)
    b = gen_clifford_t_meas(4, 50, 0.1, 0.3, 42)
    assert a == b
    assert gen_parity(5, 60, 9) == gen_parity(5, 60, 9)


@given(
    st.fractions(max_denominator=64),
    st.fractions(max_denominator=64),
)
def test_phase_arithmetic_stays_normalized(a, b):
    total = normalize_phase(normalize_phase(a) + normalize_phase(b))
    assert 0 <= total < 2
    negated = normalize_phase(-normalize_phase(a))
    assert 0 <= negated < 2
    assert normalize_phase(negated + normalize_phase(a)) == 0
