"""Dense superoperator semantics for circuits and diagrams.

This is the ground-truth oracle behind the soundness tests.  Mixed states
on ``n`` wires are density matrices vectorized row-major, so a channel is
a complex ``4^m x 4^n`` matrix; a Kraus set ``{K}`` becomes
``sum_k kron(K, conj(K))``.  Wire 0 is the most significant bit.  Classical
wires are modeled as qubits that only ever carry computational-basis
states: the circuit interpretation dephases classical wires at both
boundaries, which is what makes bit-valued wires and discard-based
diagrams comparable.

Diagrams are interpreted by doubling (the CPM construction): every leg
becomes a dimension-4 doubled leg indexed ``ket*2 + bra``, a grounded
spider becomes the tensor forcing all its doubled indices equal, and the
network is contracted greedily.  Scalars are not normalized here;
:func:`equiv_up_to_scalar` compares channels up to a positive factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .circuit import (
    GATE_SPECS,
    Gate,
    HybridCircuit,
    WireType,
    validate_circuit,
    walk_liveness,
)
from .diagram import Diagram
from .phase import phase_to_float

_HALF_SQRT2 = 1.0 / math.sqrt(2.0)
HADAMARD = np.array([[_HALF_SQRT2, _HALF_SQRT2], [_HALF_SQRT2, -_HALF_SQRT2]])
_H2 = np.kron(HADAMARD, HADAMARD)

# hard cap on intermediate tensors during diagram contraction (dim-4 legs)
_MAX_TENSOR_ENTRIES = 4**11


class SizeLimitError(Exception):
    """Raised when an oracle computation would exceed the size guard."""


class ZeroChannelError(Exception):
    """Raised when channel comparison meets an all-zero superoperator."""


@dataclass(eq=False)
class Superoperator:
    """A channel from ``n_in`` wires to ``n_out`` wires."""

    n_in: int
    n_out: int
    mat: np.ndarray

    def __post_init__(self) -> None:
        expected = (4**self.n_out, 4**self.n_in)
        if self.mat.shape != expected:
            raise ValueError(f"matrix shape {self.mat.shape}, expected {expected}")

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], n_in: int, n_out: int) -> "Superoperator":
        mat = np.zeros((4**n_out, 4**n_in), dtype=complex)
        for k in kraus:
            k = np.asarray(k, dtype=complex).reshape(2**n_out, 2**n_in)
            mat += np.kron(k, k.conj())
        return cls(n_in, n_out, mat)

    @classmethod
    def identity(cls, n: int) -> "Superoperator":
        return cls(n, n, np.eye(4**n, dtype=complex))

    def then(self, later: "Superoperator") -> "Superoperator":
        """Sequential composition: ``self`` first, then ``later``."""
        if later.n_in != self.n_out:
            raise ValueError("wire count mismatch in composition")
        return Superoperator(self.n_in, later.n_out, later.mat @ self.mat)

    def tensor(self, other: "Superoperator") -> "Superoperator":
        """Parallel composition, ``self``'s wires more significant."""
        m1, n1, m2, n2 = self.n_out, self.n_in, other.n_out, other.n_in
        big = np.kron(self.mat, other.mat)
        # kron groups indices as (i1 j1 i2 j2); regroup to (i1 i2 j1 j2)
        big = big.reshape(2**m1, 2**m1, 2**m2, 2**m2, 2**n1, 2**n1, 2**n2, 2**n2)
        big = big.transpose(0, 2, 1, 3, 4, 6, 5, 7)
        return Superoperator(n1 + n2, m1 + m2, big.reshape(4 ** (m1 + m2), 4 ** (n1 + n2)))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the channel to a density matrix."""
        rho = np.asarray(rho, dtype=complex).reshape(2**self.n_in, 2**self.n_in)
        out = self.mat @ rho.reshape(-1)
        return out.reshape(2**self.n_out, 2**self.n_out)

    def choi(self) -> np.ndarray:
        """The Choi matrix (positive semidefinite iff the map is CP)."""
        m, n = self.n_out, self.n_in
        t = self.mat.reshape(2**m, 2**m, 2**n, 2**n)
        return t.transpose(2, 0, 3, 1).reshape(2**n * 2**m, 2**n * 2**m)

    def is_completely_positive(self, tol: float = 1e-9) -> bool:
        j = self.choi()
        if not np.allclose(j, j.conj().T, atol=tol):
            return False
        return bool(np.linalg.eigvalsh(j).min() >= -tol)

    def is_trace_preserving(self, tol: float = 1e-12) -> bool:
        """True when the dual fixes the identity."""
        vec_out = np.eye(2**self.n_out, dtype=complex).reshape(-1)
        vec_in = np.eye(2**self.n_in, dtype=complex).reshape(-1)
        return bool(np.allclose(vec_out.conj() @ self.mat, vec_in.conj(), atol=tol))


def equiv_up_to_scalar(
    s1: Superoperator, s2: Superoperator, tol: float = 1e-9
) -> tuple[bool, complex]:
    """Compare two channels up to a positive real scalar.

    Returns ``(equivalent, scale)`` where ``scale * s1`` best approximates
    ``s2`` in Frobenius norm.  Equivalent means the scale is real positive
    (within ``tol`` relative imaginary part) and the relative residual
    ``norm(scale*s1 - s2)/norm(s2)`` is at most ``tol``.
    """
    if s1.mat.shape != s2.mat.shape:
        raise ValueError("superoperator shapes differ")
    norm1 = np.linalg.norm(s1.mat)
    norm2 = np.linalg.norm(s2.mat)
    if norm1 == 0 or norm2 == 0:
        raise ZeroChannelError("cannot compare an all-zero channel up to scale")
    scale = complex(np.vdot(s1.mat, s2.mat) / np.vdot(s1.mat, s1.mat))
    residual = np.linalg.norm(scale * s1.mat - s2.mat) / norm2
    ok = residual <= tol and scale.real > 0 and abs(scale.imag) <= tol * abs(scale)
    return bool(ok), scale


# --- circuit interpretation -------------------------------------------------


def _rz_matrix(phase: Fraction) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phase_to_float(phase))])


_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_E0 = np.array([[1, 0], [0, 0]], dtype=complex)
_E1 = np.array([[0, 0], [0, 1]], dtype=complex)
# copy a bit onto a fresh wire: |x> -> |x,x>
_FANOUT = np.zeros((4, 2), dtype=complex)
_FANOUT[0b00, 0] = 1
_FANOUT[0b11, 1] = 1


def gate_channel(gate: Gate) -> Superoperator:
    """The local channel of a gate on its own operand wires.

    Input wires are the gate's live and killed operands in operand order;
    output wires are the live and created operands in operand order.
    """
    kind, phase = gate.kind, gate.phase
    if kind in ("cnot", "xor", "ctrl_x"):
        return Superoperator.from_kraus([_CNOT], 2, 2)
    if kind == "h":
        return Superoperator.from_kraus([HADAMARD], 1, 1)
    if kind == "rz":
        return Superoperator.from_kraus([_rz_matrix(phase)], 1, 1)
    if kind == "rx":
        return Superoperator.from_kraus([HADAMARD @ _rz_matrix(phase) @ HADAMARD], 1, 1)
    if kind in ("swap", "swapc"):
        return Superoperator.from_kraus([_SWAP], 2, 2)
    if kind == "not":
        return Superoperator.from_kraus([_X], 1, 1)
    if kind == "fanout":
        return Superoperator.from_kraus([_FANOUT], 1, 2)
    if kind in ("measure", "prepare"):
        # dephase and hand the value to the other wire
        return Superoperator.from_kraus([_E0, _E1], 1, 1)
    if kind in ("ctrl_z", "cz"):
        return Superoperator.from_kraus([_CZ], 2, 2)
    if kind == "qinit":
        return Superoperator.from_kraus([np.array([[1.0], [0.0]])], 0, 1)
    if kind in ("qterm", "cterm"):
        return Superoperator.from_kraus([_E0[0:1, :], _E1[1:2, :]], 1, 0)
    raise ValueError(f"no channel for gate kind {kind!r}")


def _permutation_unitary(sources: Sequence[int]) -> np.ndarray:
    """Unitary sending wire ``sources[k]`` of the input to position ``k``."""
    n = len(sources)
    u = np.zeros((2**n, 2**n), dtype=complex)
    for x in range(2**n):
        bits = [(x >> (n - 1 - i)) & 1 for i in range(n)]
        y = 0
        for k, src in enumerate(sources):
            y = (y << 1) | bits[src]
        u[y, x] = 1
    return u


def _permutation_channel(sources: Sequence[int]) -> Superoperator:
    u = _permutation_unitary(sources)
    return Superoperator.from_kraus([u], len(sources), len(sources))


def _dephasing_channel() -> Superoperator:
    return Superoperator.from_kraus([_E0, _E1], 1, 1)


def _dephase_wires(n: int, positions: Iterable[int]) -> Superoperator:
    s = Superoperator.identity(0)
    deph = _dephasing_channel()
    ident = Superoperator.identity(1)
    for k in range(n):
        s = s.tensor(deph if k in set(positions) else ident)
    return s


def _hoist_kills(circuit: HybridCircuit) -> HybridCircuit:
    """Reorder kill-only gates to just after the last use of their wires.

    A gate all of whose operands are killed commutes backward past gates
    on disjoint wires, so this only changes evaluation order.  It keeps
    the peak live count low when bit terminations pile up at circuit end.
    """
    gates: list[Gate] = []
    for gate in circuit.gates:
        if all(mode == "kills" for _, mode in GATE_SPECS[gate.kind]):
            wires = set(gate.operands)
            pos = 0
            for i in range(len(gates) - 1, -1, -1):
                if wires & set(gates[i].operands):
                    pos = i + 1
                    break
            gates.insert(pos, gate)
        else:
            gates.append(gate)
    return HybridCircuit(circuit.wires, gates, name=circuit.name)


def circuit_superoperator(
    circuit: HybridCircuit, max_live: int = 6
) -> Superoperator:
    """Interpret a circuit as a channel from its live inputs to its outputs.

    Input wires are the wires live before the first gate, in wire order;
    output wires those live after the last gate.  Classical wires are
    dephased at both boundaries (they carry bits, not superpositions).
    Evaluation reorders kill-only gates up to their wires' last use, which
    lowers the peak live count without changing the channel.

    Raises :class:`SizeLimitError` when more than ``max_live`` wires are
    simultaneously live.
    """
    circuit = _hoist_kills(circuit)
    live: list[int] = [
        w for w, alive in enumerate(_start_liveness(circuit)) if alive
    ]
    if len(live) > max_live:
        raise SizeLimitError(f"{len(live)} live wires exceeds limit {max_live}")
    total = _dephase_wires(
        len(live),
        [k for k, w in enumerate(live) if circuit.wires[w] is WireType.CLASSICAL],
    )
    for gate, _ in walk_liveness(circuit):
        spec = GATE_SPECS[gate.kind]
        ins = [w for w, (_, mode) in zip(gate.operands, spec) if mode != "creates"]
        outs = [w for w, (_, mode) in zip(gate.operands, spec) if mode != "kills"]
        keep = [w for w in live if w not in ins]
        # route the gate's input wires to the least significant positions
        order = keep + ins
        perm = _permutation_channel([live.index(w) for w in order])
        local = gate_channel(gate)
        assert local.n_in == len(ins) and local.n_out == len(outs)
        step = Superoperator.identity(len(keep)).tensor(local)
        after_unsorted = keep + outs
        live = sorted(set(keep) | set(outs))
        if len(live) > max_live:
            raise SizeLimitError(f"{len(live)} live wires exceeds limit {max_live}")
        unperm = _permutation_channel([after_unsorted.index(w) for w in live])
        total = total.then(perm).then(step).then(unperm)
    total = total.then(
        _dephase_wires(
            len(live),
            [k for k, w in enumerate(live) if circuit.wires[w] is WireType.CLASSICAL],
        )
    )
    return total


def _start_liveness(circuit: HybridCircuit) -> list[bool]:
    start, _ = validate_circuit(circuit)
    return start


# --- diagram interpretation --------------------------------------------------


# the doubled ground effect: sum_b |b><b| doubled is the vector (1,0,0,1)
_GROUND_VEC = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)


def _doubled_spider(degree: int, phase: Fraction, grounded: bool) -> np.ndarray:
    """The doubled tensor of a spider, one dimension-4 axis per leg.

    A grounded spider is the plain spider with one extra leg contracted
    against the doubled ground effect; the spider phase cancels between
    the ket and bra copies, which is the phase-irrelevance of grounds.
    """
    if grounded:
        t = _doubled_spider(degree + 1, phase, False)
        return np.tensordot(t, _GROUND_VEC, axes=([degree], [0]))
    t = np.zeros((4,) * degree, dtype=complex)
    angle = phase_to_float(phase)
    for x in (0, 1):
        for y in (0, 1):
            t[(2 * x + y,) * degree] += np.exp(1j * angle * (x - y))
    return t


def _absorb_hadamard(t: np.ndarray, axis: int) -> np.ndarray:
    t = np.tensordot(t, _H2, axes=([axis], [0]))
    return np.moveaxis(t, -1, axis)


def diagram_superoperator(
    d: Diagram, max_in: int = 5, max_out: int = 5
) -> Superoperator:
    """Interpret a diagram as a channel from its inputs to its outputs.

    The diagram is doubled into a tensor network with dimension-4 legs and
    contracted greedily, always merging the connected pair that minimizes
    the resulting open-leg count.

    Raises :class:`SizeLimitError` when the boundary exceeds
    ``max_in``/``max_out`` wires or an intermediate tensor would grow past
    the internal cap.
    """
    if len(d.inputs) > max_in or len(d.outputs) > max_out:
        raise SizeLimitError(
            f"{len(d.inputs)} inputs / {len(d.outputs)} outputs exceed the"
            f" {max_in}+{max_out} limit"
        )
    # open legs: boundary vertex id -> label
    leg_of_boundary: dict[int, tuple[str, int]] = {}
    for kind_label, bounds in (("in", d.inputs), ("out", d.outputs)):
        for pos, b in enumerate(bounds):
            if b in leg_of_boundary:
                raise ValueError(f"boundary vertex {b} listed twice")
            leg_of_boundary[b] = (kind_label, pos)

    tensors: dict[int, tuple[np.ndarray, list]] = {}
    next_tid = 0

    def add_tensor(arr: np.ndarray, legs: list) -> None:
        nonlocal next_tid
        tensors[next_tid] = (arr, legs)
        next_tid += 1

    spider_ids = d.spiders()
    spider_legs: dict[int, list] = {v: [] for v in spider_ids}
    spider_hadamard: dict[int, list[int]] = {v: [] for v in spider_ids}
    for a, b, kind in d.edges():
        a_bound, b_bound = d.is_boundary(a), d.is_boundary(b)
        if a_bound and b_bound:
            arr = _H2 if kind == "h" else np.eye(4, dtype=complex)
            add_tensor(arr, [leg_of_boundary[a], leg_of_boundary[b]])
        elif a_bound or b_bound:
            bnd, spi = (a, b) if a_bound else (b, a)
            if kind == "h":
                spider_hadamard[spi].append(len(spider_legs[spi]))
            spider_legs[spi].append(leg_of_boundary[bnd])
        else:
            label = ("edge", a, b)
            if kind == "h":
                # absorb into the lower endpoint only
                spider_hadamard[a].append(len(spider_legs[a]))
            spider_legs[a].append(label)
            spider_legs[b].append(label)

    for v in spider_ids:
        legs = spider_legs[v]
        arr = _doubled_spider(len(legs), d.phase(v), d.is_grounded(v))
        for axis in spider_hadamard[v]:
            arr = _absorb_hadamard(arr, axis)
        add_tensor(arr, legs)

    _contract_network(tensors)

    # multiply the remaining disconnected pieces together
    result = np.ones((), dtype=complex)
    legs: list = []
    for arr, arr_legs in tensors.values():
        result = np.multiply.outer(result, arr)
        legs.extend(arr_legs)
    m, n = len(d.outputs), len(d.inputs)
    order = [legs.index(("out", k)) for k in range(m)]
    order += [legs.index(("in", k)) for k in range(n)]
    result = result.transpose(order)
    # split each doubled leg into ket and bra, then group kets before bras
    result = result.reshape((2,) * (2 * (m + n)))
    perm = [2 * k for k in range(m)] + [2 * k + 1 for k in range(m)]
    perm += [2 * m + 2 * k for k in range(n)] + [2 * m + 2 * k + 1 for k in range(n)]
    result = result.transpose(perm)
    return Superoperator(n, m, result.reshape(4**m, 4**n))


def _contract_network(tensors: dict[int, tuple[np.ndarray, list]]) -> None:
    """Greedily contract all shared legs between tensors, in place."""
    while True:
        by_leg: dict = {}
        for tid, (_, legs) in tensors.items():
            for leg in legs:
                by_leg.setdefault(leg, []).append(tid)
        candidates = set()
        for leg, tids in by_leg.items():
            unique = sorted(set(tids))
            if len(unique) == 2:
                candidates.add((unique[0], unique[1]))
        if not candidates:
            return
        best = None
        for t1, t2 in sorted(candidates):
            legs1 = tensors[t1][1]
            legs2 = tensors[t2][1]
            shared = set(legs1) & set(legs2)
            open_count = len(legs1) + len(legs2) - 2 * len(shared)
            if best is None or open_count < best[0]:
                best = (open_count, t1, t2, shared)
        open_count, t1, t2, shared = best
        if 4**open_count > _MAX_TENSOR_ENTRIES:
            raise SizeLimitError(
                f"contraction would create a tensor with {open_count} open legs"
            )
        arr1, legs1 = tensors.pop(t1)
        arr2, legs2 = tensors.pop(t2)
        ax1 = [legs1.index(leg) for leg in sorted(shared, key=repr)]
        ax2 = [legs2.index(leg) for leg in sorted(shared, key=repr)]
        arr = np.tensordot(arr1, arr2, axes=(ax1, ax2))
        new_legs = [leg for i, leg in enumerate(legs1) if i not in set(ax1)]
        new_legs += [leg for i, leg in enumerate(legs2) if i not in set(ax2)]
        tensors[t1] = (arr, new_legs)
