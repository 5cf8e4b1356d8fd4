"""Gate-by-gate translation of hybrid circuits into graph-like diagrams.

Each gate drops a small spider layout onto its operand wires; the layouts
are connected left to right by the running wire state.  Hadamard gates
never create spiders: each wire carries a pending-Hadamard flag that is
consumed by the next edge laid on that wire.  X-spiders are stored as
Z-spiders with the Hadamard tags pushed onto their legs (eager color
change), so diagrams only ever hold Z-spiders.

Classical wires are ordinary diagram wires.  Their boundary positions are
recorded as classical tags, and grounded spiders are placed where the
circuit interacts with the environment: at classical inputs and outputs,
at measurements and preparations, at wire terminations, and on the
control of classically controlled gates.

After the gate sweep the diagram is normalized (spider fusion and ground
cleanup) and strictified, so the result always passes the strict
graph-like check.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

from .circuit import (
    CircuitError,
    HybridCircuit,
    WireType,
    circuit_inputs,
    circuit_outputs,
    validate_circuit,
)
from .diagram import Diagram, normalize, to_strict_graph_like
from .gadgets import CTRL_X_GADGET, CTRL_Z_GADGET, GateGadget

# wire index -> (last vertex laid on the wire, pending Hadamard flag)
_WireState = Dict[int, Tuple[int, bool]]


def _attach(
    d: Diagram,
    state: _WireState,
    wire: int,
    phase=Fraction(0),
    x_form: bool = False,
    grounded: bool = False,
) -> int:
    """Append one spider to ``wire``, consuming its pending Hadamard."""
    last, pending = state[wire]
    v = d.add_spider(phase, grounded)
    d.add_edge(last, v, "h" if pending != x_form else "p")
    state[wire] = (v, x_form)
    return v


def _apply_gadget(
    d: Diagram, state: _WireState, gadget: GateGadget, wires: Dict[str, int]
) -> None:
    vids = {
        sp.name: _attach(d, state, wires[sp.wire], sp.phase, sp.x_form, sp.grounded)
        for sp in gadget.spiders
    }
    for a, b, kind in gadget.cross_edges:
        is_h = (kind == "h") ^ gadget.x_form_of(a) ^ gadget.x_form_of(b)
        d.add_edge(vids[a], vids[b], "h" if is_h else "p")


def _translate_gate(d: Diagram, state: _WireState, gate) -> None:
    kind = gate.kind
    a = gate.operands[0]
    if kind == "h":
        last, pending = state[a]
        state[a] = (last, not pending)
    elif kind == "rz":
        _attach(d, state, a, gate.phase)
    elif kind == "rx":
        _attach(d, state, a, gate.phase, x_form=True)
    elif kind == "not":
        _attach(d, state, a, Fraction(1), x_form=True)
    elif kind in ("cnot", "xor"):
        va = _attach(d, state, a)
        vb = _attach(d, state, gate.operands[1], x_form=True)
        d.add_edge(va, vb, "h")  # plain before the color change on vb
    elif kind == "cz":
        va = _attach(d, state, a)
        vb = _attach(d, state, gate.operands[1])
        d.add_edge(va, vb, "h")
    elif kind in ("swap", "swapc"):
        b = gate.operands[1]
        state[a], state[b] = state[b], state[a]
    elif kind == "ctrl_x":
        _apply_gadget(
            d, state, CTRL_X_GADGET, {"control": a, "target": gate.operands[1]}
        )
    elif kind == "ctrl_z":
        _apply_gadget(
            d, state, CTRL_Z_GADGET, {"control": a, "target": gate.operands[1]}
        )
    elif kind == "measure":
        q, c = gate.operands
        v = _attach(d, state, q, grounded=True)
        del state[q]
        state[c] = (v, False)
    elif kind == "prepare":
        c, q = gate.operands
        v = _attach(d, state, c, grounded=True)
        del state[c]
        state[q] = (v, False)
    elif kind == "fanout":
        src, new = gate.operands
        v = _attach(d, state, src)
        state[new] = (v, False)
    elif kind == "qinit":
        # |0> state: a degree-1 X-spider, i.e. a Z-spider plus a leg Hadamard
        state[a] = (d.add_spider(), True)
    elif kind in ("qterm", "cterm"):
        _attach(d, state, a, grounded=True)
        del state[a]
    else:
        raise CircuitError(f"gate kind {kind!r} has no diagram translation")


def circuit_to_diagram(circuit: HybridCircuit) -> Diagram:
    """Translate a valid circuit into a strictly graph-like diagram."""
    start, final = validate_circuit(circuit)
    d = Diagram()
    state: _WireState = {}
    for w, alive in enumerate(start):
        if not alive:
            continue
        classical = circuit.wires[w] is WireType.CLASSICAL
        b = d.add_boundary(classical)
        d.inputs.append(b)
        state[w] = (b, False)
        if classical:
            _attach(d, state, w, grounded=True)
    for gate in circuit.gates:
        _translate_gate(d, state, gate)
    for w, alive in enumerate(final):
        if not alive:
            continue
        classical = circuit.wires[w] is WireType.CLASSICAL
        if classical:
            _attach(d, state, w, grounded=True)
        b = d.add_boundary(classical)
        d.outputs.append(b)
        last, pending = state[w]
        d.add_edge(last, b, "h" if pending else "p")
    normalize(d)
    to_strict_graph_like(d)
    return record_boundary_types(circuit, d)


def record_boundary_types(circuit: HybridCircuit, d: Diagram) -> Diagram:
    """Flag the diagram's boundaries classical/quantum to match the circuit.

    The circuit's open wires map positionally onto the diagram's boundary
    lists.  Raises :class:`CircuitError` when the arities disagree.
    """
    ins, outs = circuit_inputs(circuit), circuit_outputs(circuit)
    if len(ins) != len(d.inputs) or len(outs) != len(d.outputs):
        raise CircuitError(
            f"boundary arity mismatch: circuit has {len(ins)} inputs and"
            f" {len(outs)} outputs, diagram has {len(d.inputs)} and"
            f" {len(d.outputs)}"
        )
    for wires, boundaries in ((ins, d.inputs), (outs, d.outputs)):
        for w, b in zip(wires, boundaries):
            d.set_classical(b, circuit.wires[w] is WireType.CLASSICAL)
    return d
