"""Random benchmark circuit generators.

Two families: Clifford+T circuits interleaved with measure-and-reinitialize
steps, and classical parity-logic circuits over NOT/XOR/FANOUT.  Both draw
from :class:`~zxgnd.rng.SplitMix64`, so a seed pins the exact circuit on
every platform.
"""

from __future__ import annotations

from fractions import Fraction

from .circuit import Gate, HybridCircuit, WireType
from .rng import SplitMix64

_CLIFFORD_KINDS = ("cnot", "s", "hsh", "t", "meas")
_PARITY_KINDS = ("not", "xor", "fanout")
_PARITY_WEIGHTS = (0.3, 0.3, 0.4)


def gen_clifford_t_meas(
    n_qubits: int,
    n_gates: int,
    p_t: float,
    p_meas: float,
    seed: int,
) -> HybridCircuit:
    """Generate a random Clifford+T circuit with measurement steps.

    Gate kinds are drawn i.i.d. with P(CNOT) = P(S) = P(HSH) = 0.2 and the
    remaining 0.4 split between T and Meas as ``p_t`` and ``p_meas``.  A
    Meas draw measures a random qubit onto a fresh classical wire and
    immediately reinitializes the qubit from it, i.e. a single
    measure-then-prepare dephasing step counting as one of ``n_gates``.
    """
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    if not (p_t >= 0 and p_meas >= 0 and abs(p_t + p_meas - 0.4) <= 1e-12):
        raise ValueError(f"p_t + p_meas must equal 0.4, got {p_t} + {p_meas}")
    weights = (0.2, 0.2, 0.2, p_t, p_meas)
    rng = SplitMix64(seed)
    circuit = HybridCircuit(wires=[WireType.QUANTUM] * n_qubits, name="clifford_t_meas")
    for _ in range(n_gates):
        kind = _CLIFFORD_KINDS[rng.weighted_index(weights)]
        if kind == "cnot":
            a = rng.rand_below(n_qubits)
            b = rng.rand_below(n_qubits - 1)
            if b >= a:
                b += 1
            circuit.gates.append(Gate.cnot(a, b))
        elif kind == "s":
            circuit.gates.append(Gate.rz(rng.rand_below(n_qubits), Fraction(1, 2)))
        elif kind == "hsh":
            circuit.gates.append(Gate.rx(rng.rand_below(n_qubits), Fraction(1, 2)))
        elif kind == "t":
            circuit.gates.append(Gate.rz(rng.rand_below(n_qubits), Fraction(1, 4)))
        else:
            q = rng.rand_below(n_qubits)
            c = circuit.add_bit()
            circuit.gates.append(Gate.measure(q, c))
            circuit.gates.append(Gate.prepare(c, q))
    return circuit


def gen_parity(n_bits: int, n_gates: int, seed: int) -> HybridCircuit:
    """Generate a random classical parity-logic circuit.

    Kinds NOT, XOR, FANOUT are drawn with probabilities 0.3, 0.3, 0.4;
    FANOUT copies onto a fresh classical wire, so the wire pool grows.
    """
    if n_bits < 2:
        raise ValueError("need at least 2 bits")
    rng = SplitMix64(seed)
    circuit = HybridCircuit(wires=[WireType.CLASSICAL] * n_bits, name="parity")
    n_wires = n_bits
    for _ in range(n_gates):
        kind = _PARITY_KINDS[rng.weighted_index(_PARITY_WEIGHTS)]
        if kind == "not":
            circuit.gates.append(Gate.not_(rng.rand_below(n_wires)))
        elif kind == "xor":
            a = rng.rand_below(n_wires)
            b = rng.rand_below(n_wires - 1)
            if b >= a:
                b += 1
            circuit.gates.append(Gate.xor(a, b))
        else:
            src = rng.rand_below(n_wires)
            new = circuit.add_bit()
            circuit.gates.append(Gate.fanout(src, new))
            n_wires += 1
    return circuit
