"""Hybrid quantum-classical circuit IR with a line-based text format.

A circuit is a fixed, ordered list of typed wires plus a gate list.  Wires
are never added or removed by gates; instead, segments of a wire are *live*
or *dead*: ``qinit``/``prepare`` bring a dead wire to life, ``qterm``,
``cterm`` and ``measure`` kill one.  Whether a wire starts out live is
inferred from its first use (a wire whose first touching gate creates it
starts dead; untouched wires are live identities), which keeps the text
format free of ancilla declarations.

Wire layout is canonical: all quantum wires precede all classical wires, so
the text names ``qI``/``cJ`` map to global indices ``I`` and
``n_qubits + J``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .phase import format_phase, normalize_phase, parse_phase


class WireType(enum.Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


class CircuitError(Exception):
    """Base class for circuit format and validation errors."""


class ParseError(CircuitError):
    """Raised on malformed circuit text; carries a 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(CircuitError):
    """Raised when a structurally well-formed circuit breaks wire rules."""


# Operand modes: "live" uses a live wire, "kills" turns live into dead,
# "creates" turns dead into live.
_Q, _C = WireType.QUANTUM, WireType.CLASSICAL

GATE_SPECS: dict[str, tuple[tuple[WireType, str], ...]] = {
    "cnot": ((_Q, "live"), (_Q, "live")),
    "h": ((_Q, "live"),),
    "rz": ((_Q, "live"),),
    "rx": ((_Q, "live"),),
    "swap": ((_Q, "live"), (_Q, "live")),
    "swapc": ((_C, "live"), (_C, "live")),
    "not": ((_C, "live"),),
    "xor": ((_C, "live"), (_C, "live")),
    "fanout": ((_C, "live"), (_C, "creates")),
    "measure": ((_Q, "kills"), (_C, "creates")),
    "prepare": ((_C, "kills"), (_Q, "creates")),
    "ctrl_x": ((_C, "live"), (_Q, "live")),
    "ctrl_z": ((_C, "live"), (_Q, "live")),
    "cz": ((_Q, "live"), (_Q, "live")),
    "qinit": ((_Q, "creates"),),
    "qterm": ((_Q, "kills"),),
    "cterm": ((_C, "kills"),),
}

_PHASED = frozenset({"rz", "rx"})
# Gates whose two operands must be distinct wires.
_DISTINCT = frozenset({"cnot", "swap", "swapc", "xor", "fanout", "cz"})


@dataclass(frozen=True)
class Gate:
    """One gate application: a kind, operand wire indices, optional phase."""

    kind: str
    operands: tuple[int, ...]
    phase: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_SPECS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        if len(self.operands) != len(GATE_SPECS[self.kind]):
            raise ValidationError(
                f"gate {self.kind!r} takes {len(GATE_SPECS[self.kind])} operands,"
                f" got {len(self.operands)}"
            )
        if (self.phase is not None) != (self.kind in _PHASED):
            raise ValidationError(f"gate {self.kind!r} phase mismatch")
        if self.phase is not None:
            object.__setattr__(self, "phase", normalize_phase(self.phase))

    # Readable constructors for the kinds built programmatically.
    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("cnot", (control, target))

    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls("h", (q,))

    @classmethod
    def rz(cls, q: int, phase) -> "Gate":
        return cls("rz", (q,), normalize_phase(phase))

    @classmethod
    def rx(cls, q: int, phase) -> "Gate":
        return cls("rx", (q,), normalize_phase(phase))

    @classmethod
    def swap(cls, a: int, b: int) -> "Gate":
        return cls("swap", (a, b))

    @classmethod
    def swapc(cls, a: int, b: int) -> "Gate":
        return cls("swapc", (a, b))

    @classmethod
    def not_(cls, c: int) -> "Gate":
        return cls("not", (c,))

    @classmethod
    def xor(cls, src: int, tgt: int) -> "Gate":
        return cls("xor", (src, tgt))

    @classmethod
    def fanout(cls, src: int, new: int) -> "Gate":
        return cls("fanout", (src, new))

    @classmethod
    def measure(cls, q: int, c: int) -> "Gate":
        return cls("measure", (q, c))

    @classmethod
    def prepare(cls, c: int, q: int) -> "Gate":
        return cls("prepare", (c, q))

    @classmethod
    def ctrl_x(cls, c: int, q: int) -> "Gate":
        return cls("ctrl_x", (c, q))

    @classmethod
    def ctrl_z(cls, c: int, q: int) -> "Gate":
        return cls("ctrl_z", (c, q))

    @classmethod
    def cz(cls, a: int, b: int) -> "Gate":
        return cls("cz", (a, b))

    @classmethod
    def qinit(cls, q: int) -> "Gate":
        return cls("qinit", (q,))

    @classmethod
    def qterm(cls, q: int) -> "Gate":
        return cls("qterm", (q,))

    @classmethod
    def cterm(cls, c: int) -> "Gate":
        return cls("cterm", (c,))


@dataclass
class HybridCircuit:
    """An ordered wire list plus a gate list.

    ``wires`` must hold every quantum wire before every classical wire; the
    constructor rejects interleavings so text round-trips stay structural.
    """

    wires: list[WireType] = field(default_factory=list)
    gates: list[Gate] = field(default_factory=list)
    name: str = ""

    def __post_init__(self) -> None:
        seen_classical = False
        for w in self.wires:
            if w is WireType.CLASSICAL:
                seen_classical = True
            elif seen_classical:
                raise ValidationError("quantum wires must precede classical wires")

    @property
    def n_qubits(self) -> int:
        return sum(1 for w in self.wires if w is WireType.QUANTUM)

    @property
    def n_bits(self) -> int:
        return len(self.wires) - self.n_qubits

    def qubit(self, i: int) -> int:
        """Global index of quantum wire ``qI``."""
        if not 0 <= i < self.n_qubits:
            raise ValidationError(f"quantum wire q{i} out of range")
        return i

    def bit(self, j: int) -> int:
        """Global index of classical wire ``cJ``."""
        if not 0 <= j < self.n_bits:
            raise ValidationError(f"classical wire c{j} out of range")
        return self.n_qubits + j

    def wire_name(self, w: int) -> str:
        """Text-format name (``qI`` or ``cJ``) of global wire ``w``."""
        if self.wires[w] is WireType.QUANTUM:
            return f"q{w}"
        return f"c{w - self.n_qubits}"

    def add_bit(self) -> int:
        """Append a fresh classical wire, returning its global index."""
        self.wires.append(WireType.CLASSICAL)
        return len(self.wires) - 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HybridCircuit):
            return NotImplemented
        return self.wires == other.wires and self.gates == other.gates


def _initial_liveness(circuit: HybridCircuit) -> list[bool]:
    """Infer which wires are live before the first gate (first-touch rule)."""
    live = [True] * len(circuit.wires)
    seen: set[int] = set()
    for gate in circuit.gates:
        for w, (_, mode) in zip(gate.operands, GATE_SPECS[gate.kind]):
            if w not in seen:
                seen.add(w)
                if mode == "creates":
                    live[w] = False
    return live


def walk_liveness(circuit: HybridCircuit) -> Iterator[tuple[Gate, list[bool]]]:
    """Yield ``(gate, liveness_before_gate)`` while checking wire rules.

    Raises :class:`ValidationError` on out-of-range operands, wire-type
    mismatches, repeated operands where forbidden, or live/dead misuse.
    """
    live = _initial_liveness(circuit)
    for gate in circuit.gates:
        spec = GATE_SPECS[gate.kind]
        if gate.kind in _DISTINCT and gate.operands[0] == gate.operands[1]:
            raise ValidationError(f"gate {gate.kind!r} needs distinct wires")
        for w, (wtype, mode) in zip(gate.operands, spec):
            if not 0 <= w < len(circuit.wires):
                raise ValidationError(f"gate {gate.kind!r}: wire {w} out of range")
            if circuit.wires[w] is not wtype:
                raise ValidationError(
                    f"gate {gate.kind!r} expects a {wtype.value} wire,"
                    f" got {circuit.wire_name(w)}"
                )
            if mode == "creates":
                if live[w]:
                    raise ValidationError(
                        f"gate {gate.kind!r} writes to live wire {circuit.wire_name(w)}"
                    )
            elif not live[w]:
                raise ValidationError(
                    f"gate {gate.kind!r} uses dead wire {circuit.wire_name(w)}"
                )
        yield gate, list(live)
        for w, (_, mode) in zip(gate.operands, spec):
            if mode == "creates":
                live[w] = True
            elif mode == "kills":
                live[w] = False


def validate_circuit(circuit: HybridCircuit) -> tuple[list[bool], list[bool]]:
    """Check all wire rules; return (liveness at start, liveness at end)."""
    start = _initial_liveness(circuit)
    for _ in walk_liveness(circuit):
        pass
    return start, _final_liveness(circuit, start)


def _final_liveness(circuit: HybridCircuit, start: list[bool]) -> list[bool]:
    live = list(start)
    for gate in circuit.gates:
        for w, (_, mode) in zip(gate.operands, GATE_SPECS[gate.kind]):
            if mode == "creates":
                live[w] = True
            elif mode == "kills":
                live[w] = False
    return live


def circuit_inputs(circuit: HybridCircuit) -> list[int]:
    """Wires live before the first gate, in wire order."""
    start, _ = validate_circuit(circuit)
    return [w for w, alive in enumerate(start) if alive]


def circuit_outputs(circuit: HybridCircuit) -> list[int]:
    """Wires live after the last gate, in wire order."""
    _, final = validate_circuit(circuit)
    return [w for w, alive in enumerate(final) if alive]


# --- text format ---------------------------------------------------------

# kinds whose text mnemonic differs from the internal kind
_KIND_TO_MNEMONIC = {"ctrl_x": "cx", "ctrl_z": "cz"}


def serialize_circuit(circuit: HybridCircuit) -> str:
    """Render a circuit in the line-based text format."""
    lines = [f"qubits {circuit.n_qubits}"]
    if circuit.n_bits:
        lines.append(f"bits {circuit.n_bits}")
    for gate in circuit.gates:
        names = [circuit.wire_name(w) for w in gate.operands]
        mnemonic = _KIND_TO_MNEMONIC.get(gate.kind, gate.kind)
        if gate.kind in _PHASED:
            lines.append(f"{mnemonic} {format_phase(gate.phase)} {names[0]}")
        elif gate.kind in ("measure", "prepare"):
            lines.append(f"{mnemonic} {names[0]} -> {names[1]}")
        else:
            lines.append(f"{mnemonic} {' '.join(names)}")
    return "\n".join(lines) + "\n"


def _parse_wire(token: str, circuit: HybridCircuit, line_no: int) -> int:
    prefix, digits = token[:1], token[1:]
    if prefix not in ("q", "c") or not digits.isdigit():
        raise ParseError(f"bad wire name {token!r}", line_no)
    index = int(digits)
    try:
        return circuit.qubit(index) if prefix == "q" else circuit.bit(index)
    except ValidationError as exc:
        raise ParseError(str(exc), line_no) from None


def parse_circuit(text: str) -> HybridCircuit:
    """Parse the text format and validate the resulting circuit.

    Raises :class:`ParseError` with a line number on syntax problems and on
    quantum/classical operand mismatches.
    """
    circuit = HybridCircuit()
    n_qubits: Optional[int] = None
    n_bits: Optional[int] = None
    body_started = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head in ("qubits", "bits"):
            if body_started:
                raise ParseError("header after first gate", line_no)
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError(f"bad header {line!r}", line_no)
            if head == "qubits":
                if n_qubits is not None:
                    raise ParseError("duplicate qubits header", line_no)
                n_qubits = int(tokens[1])
            else:
                if n_bits is not None:
                    raise ParseError("duplicate bits header", line_no)
                n_bits = int(tokens[1])
            continue
        if n_qubits is None:
            raise ParseError("missing qubits header", line_no)
        if not body_started:
            circuit.wires = [WireType.QUANTUM] * n_qubits + [WireType.CLASSICAL] * (n_bits or 0)
            body_started = True
        circuit.gates.append(_parse_gate(tokens, circuit, line_no))
    if not body_started:
        if n_qubits is None:
            raise ParseError("missing qubits header", max(1, text.count("\n") + 1))
        circuit.wires = [WireType.QUANTUM] * n_qubits + [WireType.CLASSICAL] * (n_bits or 0)
    try:
        validate_circuit(circuit)
    except ValidationError as exc:
        raise CircuitError(f"invalid circuit: {exc}") from exc
    return circuit


def _parse_gate(tokens: list[str], circuit: HybridCircuit, line_no: int) -> Gate:
    mnemonic = tokens[0]
    args = tokens[1:]
    phase = None
    if mnemonic in _PHASED:
        if len(args) != 2:
            raise ParseError(f"{mnemonic} takes a phase and one wire", line_no)
        try:
            phase = parse_phase(args[0])
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from None
        args = args[1:]
    if mnemonic in ("measure", "prepare"):
        if len(args) != 3 or args[1] != "->":
            raise ParseError(f"{mnemonic} needs the form '{mnemonic} a -> b'", line_no)
        args = [args[0], args[2]]
    kind = mnemonic
    if mnemonic == "cx":
        kind = "ctrl_x"
    elif mnemonic == "cz":
        # classical-control vs quantum-quantum cz, told apart by prefixes
        kind = "ctrl_z" if args and args[0].startswith("c") else "cz"
    if kind not in GATE_SPECS:
        raise ParseError(f"unknown gate {mnemonic!r}", line_no)
    spec = GATE_SPECS[kind]
    if len(args) != len(spec):
        raise ParseError(f"{mnemonic} takes {len(spec)} wire operands", line_no)
    operands = []
    for token, (wtype, _) in zip(args, spec):
        w = _parse_wire(token, circuit, line_no)
        if circuit.wires[w] is not wtype:
            raise ParseError(
                f"gate {mnemonic!r} expects a {wtype.value} wire, got {token!r}",
                line_no,
            )
        operands.append(w)
    try:
        return Gate(kind, tuple(operands), phase)
    except ValidationError as exc:
        raise ParseError(str(exc), line_no) from None
