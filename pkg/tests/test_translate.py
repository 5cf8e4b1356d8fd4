"""Tests for circuit-to-diagram translation."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from zxgnd.circuit import Gate, HybridCircuit, WireType, CircuitError, parse_circuit
from zxgnd.gadgets import CTRL_X_GADGET, CTRL_Z_GADGET
from zxgnd.generate import gen_clifford_t_meas, gen_parity
from zxgnd.gflow import find_focused_gflow, verify_focused_gflow
from zxgnd.semantics import (
    Superoperator,
    circuit_superoperator,
    diagram_superoperator,
    equiv_up_to_scalar,
)
from zxgnd.translate import circuit_to_diagram, record_boundary_types

from helpers import channels_agree, diagrams_equal

DEPHASE = np.diag([1.0, 0.0, 0.0, 1.0])

Q, C = WireType.QUANTUM, WireType.CLASSICAL


def small_parity(seed: int) -> HybridCircuit:
    """A parity circuit kept within the oracle's boundary budget."""
    for n_gates in (12, 8, 5, 3, 1):
        c = gen_parity(2 + seed % 2, n_gates, seed)
        if len(c.wires) <= 5:
            return c
    raise AssertionError("unreachable: one gate adds at most one wire")


# --- pinned examples -------------------------------------------------------


def test_empty_one_qubit_circuit_is_identity():
    d = circuit_to_diagram(HybridCircuit([Q]))
    assert d.check_graph_like(strict=True) == []
    # pass-through spider plus the two-spider identity chain
    assert d.spider_count() == 3
    s = diagram_superoperator(d)
    ok, _ = equiv_up_to_scalar(s, Superoperator.identity(1), 1e-9)
    assert ok


def test_empty_one_bit_circuit_is_dephasing():
    d = circuit_to_diagram(HybridCircuit([C]))
    assert d.check_graph_like(strict=True) == []
    assert len(d.grounded_spiders()) == 1
    s = diagram_superoperator(d)
    ok, _ = equiv_up_to_scalar(s, Superoperator(1, 1, DEPHASE), 1e-9)
    assert ok


def test_measure_then_prepare_is_computational_dephasing():
    c = parse_circuit("qubits 1\nbits 1\nmeasure q0 -> c0\nprepare c0 -> q0\n")
    d = circuit_to_diagram(c)
    assert d.check_graph_like(strict=True) == []
    s = diagram_superoperator(d)
    ok, _ = equiv_up_to_scalar(s, Superoperator(1, 1, DEPHASE), 1e-9)
    assert ok


SUPERDENSE = """\
qubits 4
bits 2
# payload bits arrive on q0/q1 and are read out up front
measure q0 -> c0
measure q1 -> c1
# shared entangled pair
qinit q2
qinit q3
h q2
cnot q2 q3
# encode both bits on one half, then decode coherently
cz c0 q2
cx c1 q2
cnot q2 q3
h q2
"""


def test_superdense_coding_translation():
    c = parse_circuit(SUPERDENSE)
    d = circuit_to_diagram(c)
    assert d.check_graph_like(strict=True) == []
    assert len(d.grounded_spiders()) == 2
    assert [d.is_classical(b) for b in d.inputs] == [False, False]
    assert [d.is_classical(b) for b in d.outputs] == [False, False, True, True]
    assert channels_agree(circuit_superoperator(c), diagram_superoperator(d), 1e-9)


def test_superdense_open_graph_sinks():
    d = circuit_to_diagram(parse_circuit(SUPERDENSE))
    og = d.underlying_open_graph()
    grounds = set(d.grounded_spiders())
    out_spiders = {s for b in d.outputs for s in d.neighbors(b)}
    assert grounds <= og.sinks
    assert og.sinks == grounds | out_spiders
    assert len(og.sinks) == 6
    assert len(og.sources) == 2


# --- classically controlled gadgets ---------------------------------------


def test_gadget_fixtures_have_three_spiders_and_one_ground():
    for gadget in (CTRL_X_GADGET, CTRL_Z_GADGET):
        assert len(gadget.spiders) == 3
        assert sum(sp.grounded for sp in gadget.spiders) == 1
        assert len(gadget.cross_edges) == 1


def _controlled_superoperator(local: np.ndarray) -> Superoperator:
    """Channel of a bit-controlled single-qubit gate on (qubit, bit)."""
    kraus = []
    for b in (0, 1):
        proj = np.zeros((2, 2))
        proj[b, b] = 1.0
        power = np.linalg.matrix_power(local, b)
        kraus.append(np.kron(power, proj))
    return Superoperator.from_kraus(kraus, 2, 2)


@pytest.mark.parametrize(
    "mnemonic,local",
    [("cx", np.array([[0.0, 1.0], [1.0, 0.0]])), ("cz", np.diag([1.0, -1.0]))],
)
def test_controlled_gadget_matches_controlled_channel(mnemonic, local):
    c = parse_circuit(f"qubits 1\nbits 1\n{mnemonic} c0 q0\n")
    d = circuit_to_diagram(c)
    assert d.check_graph_like(strict=True) == []
    assert channels_agree(
        diagram_superoperator(d), _controlled_superoperator(local), 1e-9
    )


# --- boundary type recording -----------------------------------------------


def test_all_quantum_circuit_has_quantum_boundaries():
    d = circuit_to_diagram(parse_circuit("qubits 2\ncnot q0 q1\n"))
    assert all(not d.is_classical(b) for b in d.inputs + d.outputs)


def test_parity_circuit_boundary_flags():
    c = gen_parity(10, 30, seed=7)
    d = circuit_to_diagram(c)
    assert len(d.inputs) == 10
    assert all(d.is_classical(b) for b in d.inputs)
    assert len(d.outputs) == len(c.wires)
    assert all(d.is_classical(b) for b in d.outputs)


def test_mixed_circuit_boundary_flags_in_order():
    d = circuit_to_diagram(parse_circuit("qubits 1\nbits 1\n"))
    assert [d.is_classical(b) for b in d.inputs] == [False, True]
    assert [d.is_classical(b) for b in d.outputs] == [False, True]


def test_record_boundary_types_rejects_arity_mismatch():
    d = circuit_to_diagram(parse_circuit("qubits 1\n"))
    other = parse_circuit("qubits 2\n")
    with pytest.raises(CircuitError):
        record_boundary_types(other, d)


# --- single-gate channels ---------------------------------------------------


@pytest.mark.parametrize(
    "text",
    [
        "qubits 1\nrz 1/4 q0\n",
        "qubits 1\nrx 3/2 q0\n",
        "qubits 1\nh q0\n",
        "qubits 2\ncnot q0 q1\n",
        "qubits 2\ncnot q1 q0\n",
        "qubits 2\ncz q0 q1\n",
        "qubits 2\nswap q0 q1\n",
        "qubits 0\nbits 1\nnot c0\n",
        "qubits 0\nbits 2\nxor c0 c1\n",
        "qubits 0\nbits 2\nxor c1 c0\n",
        "qubits 0\nbits 2\nswapc c0 c1\n",
        "qubits 0\nbits 2\nfanout c0 c1\n",
        "qubits 1\nbits 1\nmeasure q0 -> c0\n",
        "qubits 1\nbits 1\nprepare c0 -> q0\n",
        "qubits 1\nqinit q0\n",
        "qubits 1\nqterm q0\n",
        "qubits 0\nbits 1\ncterm c0\n",
        "qubits 1\nqinit q0\nh q0\n",
    ],
)
def test_single_gate_translation_matches_oracle(text):
    c = parse_circuit(text)
    d = circuit_to_diagram(c)
    assert d.check_graph_like(strict=True) == []
    assert channels_agree(circuit_superoperator(c), diagram_superoperator(d), 1e-9)


# --- random soundness -------------------------------------------------------


@pytest.mark.parametrize("seed", range(150))
def test_translation_soundness_clifford_t_meas(seed):
    c = gen_clifford_t_meas(2 + seed % 3, 5 + seed % 11, 0.2, 0.2, seed)
    d = circuit_to_diagram(c)
    assert d.check_graph_like(strict=True) == []
    assert channels_agree(circuit_superoperator(c), diagram_superoperator(d), 1e-9)


@pytest.mark.parametrize("seed", range(150))
def test_translation_soundness_parity(seed):
    c = small_parity(seed)
    d = circuit_to_diagram(c)
    assert d.check_graph_like(strict=True) == []
    assert channels_agree(circuit_superoperator(c), diagram_superoperator(d), 1e-9)


def test_translation_is_deterministic():
    c = gen_clifford_t_meas(3, 12, 0.2, 0.2, seed=41)
    assert diagrams_equal(circuit_to_diagram(c), circuit_to_diagram(c))


def test_translated_circuits_admit_focused_gflow():
    for seed in range(120):
        if seed % 2:
            c = gen_clifford_t_meas(2 + seed % 3, 5 + seed % 11, 0.2, 0.2, seed=seed)
        else:
            c = gen_parity(2 + seed % 4, 6 + seed % 13, seed)
        og = circuit_to_diagram(c).underlying_open_graph()
        f = find_focused_gflow(og)
        assert f is not None, f"no focused gFlow after translating {c.name}"
        assert verify_focused_gflow(og, f)


def test_translated_medium_circuits_admit_focused_gflow():
    for c in (
        gen_parity(10, 120, 3),
        gen_clifford_t_meas(4, 60, 0.2, 0.2, seed=4),
    ):
        og = circuit_to_diagram(c).underlying_open_graph()
        f = find_focused_gflow(og)
        assert f is not None
        assert verify_focused_gflow(og, f)
