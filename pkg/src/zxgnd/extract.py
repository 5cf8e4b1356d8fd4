"""Hybrid circuit extraction from graph-like diagrams with grounds.

The extractor peels a diagram from its outputs toward its inputs while
maintaining a frontier: the set of spiders currently carrying the open
circuit lines.  Each loop step runs Gauss elimination on the biadjacency
matrix between frontier and non-frontier spiders, replaying every row
addition on the diagram as an extracted CNOT.  Frontier spiders touching
an input boundary are left out of the elimination: a row addition sourced
there cannot be replayed as a CNOT.  A resulting unit row lets the single
neighbor take over the line (the Hadamard edge it crossed becomes an H
gate); when no unit row exists, a grounded spider next to the frontier
opens a fresh line whose measured bit is discarded.  Every candidate move
is first vetted on a copy and kept only if the diagram still admits a
focused gFlow, which guarantees the next step can make progress.  Between
steps ``clean_frontier`` normalizes the frontier: grounds become
measure/re-prepare pairs, phases become Z rotations, frontier-internal
edges become CZ gates, and exhausted spiders either bind a circuit input
or turn into a plus-state initialization.

Gates are logged in extraction order, which is right to left, so the
final circuit is the reversed log with boundary bookkeeping wrapped
around it: input-permutation swaps and classical-input preparations go in
front, measurements at classical outputs and discarded-bit terminations
go at the end.

Log entries are tuples tagged by kind:

``("h", line)``
    Hadamard on a line, from a crossed Hadamard edge.
``("phase", line, alpha)``
    Z rotation by ``alpha``, from a frontier spider phase.
``("cz", line_a, line_b)``
    CZ between two lines, from a frontier-internal edge.
``("cnot", line_src, line_dst)``
    CNOT replaying a row addition of ``src`` into ``dst``.
``("dephase", line)``
    Measure and immediately re-prepare, from a grounded frontier spider.
``("init_plus", line)``
    Plus-state initialization closing a fresh line.
``("terminate", line)``
    Measurement whose bit is discarded, opening a ground-spider line.
``("bind", line, input_pos)``
    The line ends at diagram input ``input_pos``; no gate by itself.
``("discard_bit", input_pos)``
    A classical input that is never read; terminated outright.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .circuit import Gate, HybridCircuit, WireType, validate_circuit
from .diagram import Diagram
from .gf2 import Gf2Matrix
from .gflow import find_focused_gflow

__all__ = ["ExtractionError", "Frontier", "clean_frontier", "extract_circuit"]

ExtractOp = tuple

# Gate kinds extract_circuit is allowed to emit.
EXTRACTED_GATE_KINDS = frozenset(
    {"h", "rz", "cz", "cnot", "swap", "measure", "prepare", "qinit", "cterm"}
)


class ExtractionError(RuntimeError):
    """An internal extraction invariant broke; carries the step trace."""

    def __init__(self, message: str, steps: list[str] | None = None):
        self.steps = list(steps or [])
        if self.steps:
            message = message + "; steps so far: " + " | ".join(self.steps)
        super().__init__(message)


@dataclass
class Frontier:
    """Spiders currently carrying the open circuit lines.

    Attributes
    ----------
    members:
        The frontier spider set.
    qubit_of:
        Line id carried by each member.  Injective: one line per spider,
        one spider per line.
    """

    members: set[int] = field(default_factory=set)
    qubit_of: dict[int, int] = field(default_factory=dict)

    def add(self, v: int, line: int) -> None:
        if v in self.members:
            raise ExtractionError(f"spider {v} promoted twice")
        if line in self.qubit_of.values():
            raise ExtractionError(f"line {line} carried by two spiders")
        self.members.add(v)
        self.qubit_of[v] = line

    def remove(self, v: int) -> int:
        self.members.discard(v)
        return self.qubit_of.pop(v)

    def copy(self) -> Frontier:
        return Frontier(set(self.members), dict(self.qubit_of))

    def check(self, d: Diagram) -> None:
        if self.members != set(self.qubit_of):
            raise ExtractionError("frontier members and line map disagree")
        lines = list(self.qubit_of.values())
        if len(set(lines)) != len(lines):
            raise ExtractionError("line map is not injective")
        for v in self.members:
            if not d.has_vertex(v):
                raise ExtractionError(f"frontier spider {v} left the diagram")


def _touches_input(d: Diagram, v: int, input_set: set[int]) -> bool:
    return any(b in input_set for b in d.boundary_neighbors(v))


def clean_frontier(d: Diagram, f: Frontier, out: list[ExtractOp]) -> None:
    """Normalize every frontier spider, appending extracted ops to ``out``.

    Repeats until stable: clears grounds into dephasing pairs, zeroes
    phases into Z rotations, removes frontier-internal edges as CZ gates,
    and retires spiders with no spider neighbor left, either binding the
    circuit input they touch or closing the line with a plus-state
    initialization.

    Parameters
    ----------
    d:
        Diagram under extraction; mutated in place.
    f:
        Current frontier; consistent with ``d``.
    out:
        Append-only extraction log.
    """
    input_set = set(d.inputs)
    changed = True
    while changed:
        changed = False
        for v in sorted(f.members, key=lambda s: f.qubit_of[s]):
            if v not in f.members:
                continue
            line = f.qubit_of[v]
            if d.is_grounded(v):
                d.set_grounded(v, False)
                out.append(("dephase", line))
                changed = True
            if d.phase(v) != 0:
                out.append(("phase", line, d.phase(v)))
                d.set_phase(v, 0)
                changed = True
            for w in [w for w in d.neighbors(v) if w in f.members]:
                d.remove_edge(v, w)
                out.append(("cz", line, f.qubit_of[w]))
                changed = True
            if any(not d.is_boundary(w) for w in d.neighbors(v)):
                continue
            # the line is fully peeled; close it at an input or an init
            bound = [b for b in d.boundary_neighbors(v) if b in input_set]
            if bound:
                out.append(("bind", line, d.inputs.index(bound[0])))
            else:
                out.append(("init_plus", line))
            d.remove_vertex(v)
            f.remove(v)
            changed = True


def _check_boundary_order(d: Diagram) -> None:
    for kind, bounds in (("input", d.inputs), ("output", d.outputs)):
        seen_classical = False
        for b in bounds:
            if d.is_classical(b):
                seen_classical = True
            elif seen_classical:
                raise ValueError(
                    f"quantum {kind} listed after a classical one; extraction"
                    " needs quantum boundaries first"
                )


def _biadjacency(
    d: Diagram, rows: list[int], cols: list[int]
) -> "list[int]":
    col_bit = {u: 1 << j for j, u in enumerate(cols)}
    out = []
    for v in rows:
        acc = 0
        for u in d.neighbors(v):
            bit = col_bit.get(u)
            if bit is not None:
                acc |= bit
        out.append(acc)
    return out


def extract_circuit(
    d: Diagram,
    *,
    on_iteration: Optional[Callable[[Diagram, Frontier], None]] = None,
) -> HybridCircuit:
    """Extract a hybrid circuit from a strictly graph-like diagram.

    The diagram must be strictly graph-like and admit a focused gFlow;
    both are checked up front.  The input is not mutated.  The result's
    channel equals the diagram's up to a positive scalar, using only the
    gate kinds in ``EXTRACTED_GATE_KINDS``.

    Parameters
    ----------
    d:
        Source diagram.
    on_iteration:
        Instrumentation hook called after every main-loop iteration with
        the working diagram and frontier.  Observational only; mutating
        either breaks the extraction.

    Returns
    -------
    HybridCircuit
        Quantum wire ``i`` is line ``i``; lines below the diagram's
        output arity end at the matching output.  Classical wires hold,
        in order, classical inputs, classical outputs, then scratch bits.

    Raises
    ------
    ValueError
        Not strictly graph-like, no focused gFlow, or boundary lists that
        interleave quantum and classical wires.
    ExtractionError
        An internal invariant broke mid-extraction.
    """
    issues = d.check_graph_like(strict=True)
    if issues:
        raise ValueError("diagram is not strictly graph-like: " + "; ".join(issues))
    _check_boundary_order(d)
    gf = find_focused_gflow(d.underlying_open_graph())
    if gf is None:
        raise ValueError("diagram has no focused gFlow; cannot extract")
    level = dict(gf.order)

    d = d.copy()
    in_classical = [d.is_classical(b) for b in d.inputs]
    out_classical = [d.is_classical(b) for b in d.outputs]
    n_out = len(d.outputs)
    input_set = set(d.inputs)
    spiders_at_start = d.spider_count()

    log: list[ExtractOp] = []
    steps: list[str] = []
    f = Frontier()
    for pos, b in enumerate(d.outputs):
        nbrs = d.neighbors(b)
        if len(nbrs) != 1 or d.is_boundary(nbrs[0]):
            raise ExtractionError(f"output boundary {b} is not on a spider wire")
        f.add(nbrs[0], pos)
    next_line = n_out

    clean_frontier(d, f, log)
    iterations = 0
    while f.members:
        iterations += 1
        if iterations > spiders_at_start + 1:
            raise ExtractionError("loop exceeded the spider-count bound", steps)
        # input-attached members stay out of the row space: a row addition
        # sourced there would have to copy the input connection onto the
        # destination spider, which no CNOT replay can express
        rows = sorted(
            (v for v in f.members if not _touches_input(d, v, input_set)),
            key=lambda v: (-level.get(v, 0), v),
        )
        cols = sorted(
            (v for v in d.spiders() if v not in f.members),
            key=lambda v: (-level.get(v, 0), v),
        )
        mat = Gf2Matrix(_biadjacency(d, rows, cols), len(cols))
        row_spiders = list(rows)
        for op in mat.rref_with_ops():
            if op.kind == "swap":
                row_spiders[op.a], row_spiders[op.b] = (
                    row_spiders[op.b],
                    row_spiders[op.a],
                )
                continue
            src, dst = row_spiders[op.a], row_spiders[op.b]
            for u in [
                u
                for u in d.neighbors(src)
                if not d.is_boundary(u) and u not in f.members
            ]:
                d.toggle_edge(dst, u)
            log.append(("cnot", f.qubit_of[src], f.qubit_of[dst]))

        # row additions can strand a spider with no edges at all; a bare
        # spider is a scalar factor and extraction is up to scalar anyway
        for v in [v for v in d.spiders() if d.degree(v) == 0 and v not in f.members]:
            d.remove_vertex(v)

        candidates: list[tuple] = [
            ("unit", row_spiders[ri], cols[ci]) for ri, ci in mat.unit_rows()
        ]
        candidates += [
            ("ground", g)
            for g in sorted(
                (g for g in d.grounded_spiders() if g not in f.members),
                key=lambda g: (
                    not any(w in f.members for w in d.neighbors(g)),
                    -level.get(g, 0),
                    g,
                ),
            )
        ]
        if not candidates:
            raise ExtractionError(
                "no unit row and no ground spider left", steps
            )

        # vet each move on a copy: keep the first that leaves the diagram
        # with a focused gFlow, which certifies both further progress and
        # that fully peeled input fragments are trace-equivalent
        adopted = None
        for cand in candidates:
            d2 = d.copy()
            f2 = f.copy()
            sub: list[ExtractOp] = []
            if cand[0] == "unit":
                _, v, u = cand
                line = f2.qubit_of[v]
                out_bs = [b for b in d2.boundary_neighbors(v) if b not in input_set]
                d2.remove_vertex(v)
                f2.remove(v)
                sub.append(("h", line))
                f2.add(u, line)
                for b in out_bs:
                    # keep the line's boundary on the spider that carries it
                    d2.add_edge(u, b, "p")
                move = f"line {line}: spider {u} took over from {v}"
            else:
                _, g = cand
                d2.set_grounded(g, False)
                line = next_line
                b = d2.add_boundary()
                d2.outputs.append(b)
                d2.add_edge(g, b, "p")
                sub.append(("terminate", line))
                f2.add(g, line)
                move = f"line {line}: opened at ground-spider {g}"
            clean_frontier(d2, f2, sub)
            if find_focused_gflow(d2.underlying_open_graph()) is not None:
                adopted = (d2, f2, sub, cand[0], move)
                break
        if adopted is None:
            raise ExtractionError("no candidate move preserves gFlow", steps)
        d, f, sub, kind, move = adopted
        if kind == "ground":
            next_line += 1
        log.extend(sub)
        steps.append(move)
        f.check(d)
        if on_iteration is not None:
            on_iteration(d, f)

    # inputs whose wire never reached the frontier are traced out
    bound_positions = {op[2] for op in log if op[0] == "bind"}
    for pos in range(len(d.inputs)):
        if pos in bound_positions:
            continue
        if in_classical[pos]:
            log.append(("discard_bit", pos))
        else:
            line = next_line
            next_line += 1
            log.append(("terminate", line))
            log.append(("bind", line, pos))
        steps.append(f"input {pos}: discarded")

    return _lower(log, next_line, in_classical, out_classical, steps, d.name)


def _lower(
    log: list[ExtractOp],
    n_lines: int,
    in_classical: list[bool],
    out_classical: list[bool],
    steps: list[str],
    name: str,
) -> HybridCircuit:
    """Reverse the extraction log into a validated hybrid circuit."""
    cin_wire = {}
    cout_wire = {}
    next_wire = n_lines
    for pos, classical in enumerate(in_classical):
        if classical:
            cin_wire[pos] = next_wire
            next_wire += 1
    for pos, classical in enumerate(out_classical):
        if classical:
            cout_wire[pos] = next_wire
            next_wire += 1

    binds: dict[int, int] = {}
    for op in log:
        if op[0] == "bind":
            if op[2] in binds.values():
                raise ExtractionError(f"input {op[2]} bound twice", steps)
            binds[op[1]] = op[2]

    gates: list[Gate] = []
    # classical inputs enter their lines through preparations up front
    for line, pos in sorted(binds.items()):
        if in_classical[pos]:
            gates.append(Gate.prepare(cin_wire[pos], line))

    # quantum inputs arrive on the bound lines in ascending order; swap
    # them into the lines that actually expect them (selection sort)
    qbinds = {pos: line for line, pos in binds.items() if not in_classical[pos]}
    expected = [qbinds[pos] for pos in sorted(qbinds)]
    arrival = sorted(expected)
    holder = {wire: k for k, wire in enumerate(arrival)}
    wire_of = dict(enumerate(arrival))
    for k, target in enumerate(expected):
        w = wire_of[k]
        if w == target:
            continue
        gates.append(Gate.swap(w, target))
        j = holder[target]
        holder[w], holder[target] = j, k
        wire_of[j], wire_of[k] = w, target

    loose_bits: list[int] = []
    for op in reversed(log):
        kind = op[0]
        if kind == "h":
            gates.append(Gate.h(op[1]))
        elif kind == "phase":
            gates.append(Gate.rz(op[1], op[2]))
        elif kind == "cz":
            gates.append(Gate.cz(op[1], op[2]))
        elif kind == "cnot":
            # adding row src into row dst is a CNOT controlled on dst's line
            gates.append(Gate.cnot(op[2], op[1]))
        elif kind == "dephase":
            c = next_wire
            next_wire += 1
            gates.append(Gate.measure(op[1], c))
            gates.append(Gate.prepare(c, op[1]))
        elif kind == "init_plus":
            gates.append(Gate.qinit(op[1]))
            gates.append(Gate.h(op[1]))
        elif kind == "terminate":
            c = next_wire
            next_wire += 1
            gates.append(Gate.measure(op[1], c))
            loose_bits.append(c)
        elif kind == "bind":
            pass
        elif kind == "discard_bit":
            loose_bits.append(cin_wire[op[1]])
        else:
            raise ExtractionError(f"unknown log entry {kind!r}", steps)

    for pos in sorted(cout_wire):
        gates.append(Gate.measure(pos, cout_wire[pos]))
    for c in sorted(loose_bits):
        gates.append(Gate.cterm(c))

    wires = [WireType.QUANTUM] * n_lines + [WireType.CLASSICAL] * (
        next_wire - n_lines
    )
    circuit = HybridCircuit(wires, gates, name=name)
    try:
        validate_circuit(circuit)
    except Exception as exc:
        raise ExtractionError(f"lowered circuit is invalid: {exc}", steps) from exc
    return circuit
