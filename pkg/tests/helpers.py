"""Shared helpers for building and comparing diagrams in tests."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from zxgnd.diagram import Diagram, VertexKind
from zxgnd.rng import SplitMix64
from zxgnd.semantics import Superoperator, equiv_up_to_scalar


def channels_agree(s1: Superoperator, s2: Superoperator, tol: float = 1e-9) -> bool:
    """Channel equality up to positive scalar, treating zero-zero as equal.

    Sound rewrites scale by a positive factor, so an exactly-zero channel
    (a diagram containing the zero scalar) must stay exactly zero.
    """
    n1, n2 = np.linalg.norm(s1.mat), np.linalg.norm(s2.mat)
    if n1 <= tol and n2 <= tol:
        return True
    if n1 <= tol or n2 <= tol:
        return False
    ok, _ = equiv_up_to_scalar(s1, s2, tol)
    return ok


def random_diagram(
    seed: int,
    n_in: int = 2,
    n_out: int = 2,
    n_spiders: int = 5,
    n_edges: int = 6,
    p_ground: float = 0.2,
    plain_edges: bool = True,
) -> Diagram:
    """A random valid diagram: spiders, mixed edges, attached boundaries."""
    rng = SplitMix64(seed)
    d = Diagram(name=f"random-{seed}")
    spiders = [
        d.add_spider(Fraction(rng.rand_below(8), 4)) for _ in range(n_spiders)
    ]
    for s in spiders:
        if rng.rand_float() < p_ground:
            d.set_grounded(s)
    for _ in range(n_edges):
        a = rng.choice(spiders)
        b = rng.choice(spiders)
        if a == b or d.has_edge(a, b):
            continue
        kind = "p" if plain_edges and rng.rand_float() < 0.4 else "h"
        d.add_edge(a, b, kind)
    for _ in range(n_in):
        b = d.add_boundary()
        d.add_edge(b, rng.choice(spiders), "h" if rng.rand_float() < 0.3 else "p")
        d.inputs.append(b)
    for _ in range(n_out):
        b = d.add_boundary()
        d.add_edge(b, rng.choice(spiders), "h" if rng.rand_float() < 0.3 else "p")
        d.outputs.append(b)
    return d


def diagrams_equal(d1: Diagram, d2: Diagram) -> bool:
    """Structural equality: same ids, data, edges and boundary lists."""
    if sorted(d1._vdata) != sorted(d2._vdata):
        return False
    for v in d1._vdata:
        a, b = d1._vdata[v], d2._vdata[v]
        if (a.kind, a.phase, a.grounded, a.classical) != (
            b.kind,
            b.phase,
            b.grounded,
            b.classical,
        ):
            return False
    return (
        d1.edges() == d2.edges()
        and d1.inputs == d2.inputs
        and d1.outputs == d2.outputs
    )


def _graft(target: Diagram, source: Diagram) -> dict[int, int]:
    """Copy ``source`` into ``target`` with fresh ids; return the id map."""
    id_map: dict[int, int] = {}
    for v in source.vertices():
        if source.is_boundary(v):
            id_map[v] = target.add_boundary(source.is_classical(v))
        else:
            id_map[v] = target.add_spider(source.phase(v), source.is_grounded(v))
    for a, b, kind in source.edges():
        target.add_edge(id_map[a], id_map[b], kind)
    return id_map


def compose_diagrams(first: Diagram, second: Diagram) -> Diagram:
    """Plug ``first``'s outputs into ``second``'s inputs.

    The glued boundary vertices become phase-0 pass-through spiders joined
    by a plain edge, which leaves the channel untouched.
    """
    if len(first.outputs) != len(second.inputs):
        raise ValueError("boundary arity mismatch")
    d = first.copy()
    id_map = _graft(d, second)
    for out_b, in_b in zip(d.outputs, [id_map[b] for b in second.inputs]):
        d._vdata[out_b].kind = VertexKind.Z
        d._vdata[out_b].classical = False
        d._vdata[in_b].kind = VertexKind.Z
        d._vdata[in_b].classical = False
        d.add_edge(out_b, in_b, "p")
    d.outputs = [id_map[b] for b in second.outputs]
    return d


def tensor_diagrams(top: Diagram, bottom: Diagram) -> Diagram:
    """Stack two diagrams; ``top``'s wires are the more significant ones."""
    d = top.copy()
    id_map = _graft(d, bottom)
    d.inputs = d.inputs + [id_map[b] for b in bottom.inputs]
    d.outputs = d.outputs + [id_map[b] for b in bottom.outputs]
    return d
