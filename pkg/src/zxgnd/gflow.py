"""Focused gFlow construction and verification on open graphs.

A focused gFlow assigns to every non-sink vertex ``u`` a correction set
``g(u)`` of non-source vertices whose odd neighborhood meets the non-sinks
exactly at ``u``, together with an order placing every member of ``g(u)``
strictly after ``u``.  Its existence licenses circuit extraction and is the
invariant guarded across the whole pipeline: it holds after translation and
is preserved by every rewrite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .diagram import OpenGraph
from .gf2 import Gf2Matrix, solve_many

# Exhaustive search over correction functions explodes with the number of
# constrained vertices; callers wanting ground truth beyond this bound are
# holding the oracle wrong.
BRUTE_FORCE_LIMIT = 12


@dataclass(frozen=True)
class FocusedGflow:
    """A correction-set function with a level witness for its order.

    Parameters
    ----------
    g:
        Correction sets, one entry per non-sink vertex.
    order:
        Level number per vertex.  Any linear extension of the underlying
        partial order works: members of ``g[u]`` must carry levels
        strictly above ``order[u]``.
    """

    g: Mapping[int, frozenset[int]]
    order: Mapping[int, int]


def odd_neighborhood(og: OpenGraph, subset: Iterable[int]) -> frozenset[int]:
    """Return the vertices with an odd number of neighbors in ``subset``."""
    sub = frozenset(subset)
    return frozenset(v for v in og.vertices if len(og.adjacency[v] & sub) & 1)


def find_focused_gflow(og: OpenGraph) -> FocusedGflow | None:
    """Construct a focused gFlow, or return ``None`` when none exists.

    Peels the graph backwards from the sinks: each round solves one GF(2)
    system per remaining vertex, asking for a correction set drawn from
    the already-placed non-sources whose odd neighborhood avoids every
    other non-sink.  Vertices placed in a later round sit strictly below
    their correction sets, so the round index doubles as the level
    witness.  Placing a vertex early never hurts later rounds (the
    focusing constraint does not mention the order), hence a round that
    places nothing proves no focused gFlow exists.
    """
    nonsinks = sorted(og.vertices - og.sinks)
    nonsources = sorted(og.vertices - og.sources)
    row_of = {u: i for i, u in enumerate(nonsinks)}
    g: dict[int, frozenset[int]] = {}
    round_of: dict[int, int] = {}
    placed = set(og.sinks)
    pending = list(nonsinks)
    rounds = 0
    while pending:
        cols = [v for v in nonsources if v in placed]
        mat = Gf2Matrix(
            [
                sum(1 << j for j, c in enumerate(cols) if c in og.adjacency[u])
                for u in nonsinks
            ],
            len(cols),
        )
        sols = solve_many(mat, [1 << row_of[u] for u in pending])
        placed_now = [u for u, x in zip(pending, sols) if x is not None]
        if not placed_now:
            return None
        rounds += 1
        for u, x in zip(pending, sols):
            if x is None:
                continue
            g[u] = frozenset(c for j, c in enumerate(cols) if (x >> j) & 1)
            round_of[u] = rounds
        placed.update(placed_now)
        pending = [u for u in pending if u not in placed]
    # Sinks sit at the top level; round k landed k steps below it.
    order = {v: rounds - round_of.get(v, 0) for v in og.vertices}
    return FocusedGflow(g, order)


def verify_focused_gflow(og: OpenGraph, f: FocusedGflow) -> bool:
    """Check the three focused-gFlow clauses for every non-sink vertex.

    True iff the correction map is defined exactly on the non-sinks and,
    for each one, its correction set avoids the sources, its odd
    neighborhood meets the non-sinks exactly at the vertex itself, and
    every correction-set member sits strictly later in the order.
    Missing order entries count as failures, never as errors.
    """
    nonsinks = og.vertices - og.sinks
    nonsources = og.vertices - og.sources
    if set(f.g) != nonsinks:
        return False
    for u, correction in f.g.items():
        if not set(correction) <= nonsources:
            return False
        if odd_neighborhood(og, correction) & nonsinks != {u}:
            return False
        level_u = f.order.get(u)
        if level_u is None:
            return False
        for v in correction:
            level_v = f.order.get(v)
            if level_v is None or level_v <= level_u:
                return False
    return True


def brute_force_gflow_exists(og: OpenGraph) -> bool:
    """Decide focused-gFlow existence by exhaustive search.

    Enumerates, per non-sink vertex, every correction set over the useful
    pool (non-sources with at least one non-sink neighbor; other vertices
    cannot change the constrained part of the odd neighborhood), then
    searches for one choice per vertex whose dependency relation
    ``v in g(u)`` is acyclic.  A focused gFlow exists exactly when such a
    choice does: any acyclic relation extends to a witnessing partial
    order, and any witness restricts to such a choice.

    Raises
    ------
    ValueError
        When the graph has more than ``BRUTE_FORCE_LIMIT`` non-sink
        vertices.
    """
    nonsinks = sorted(og.vertices - og.sinks)
    if len(nonsinks) > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_LIMIT} non-sink vertices, "
            f"got {len(nonsinks)}"
        )
    nonsink_set = frozenset(nonsinks)
    nonsources = og.vertices - og.sources
    pool_all = sorted(v for v in nonsources if og.adjacency[v] & nonsink_set)
    families: dict[int, list[frozenset[int]]] = {}
    for u in nonsinks:
        # u itself never qualifies: the order clause is strict.
        pool = [v for v in pool_all if v != u]
        fam = []
        for bits in range(1 << len(pool)):
            correction = frozenset(
                v for j, v in enumerate(pool) if (bits >> j) & 1
            )
            if odd_neighborhood(og, correction) & nonsink_set == {u}:
                fam.append(correction)
        if not fam:
            return False
        families[u] = fam

    deps: dict[int, frozenset[int]] = {}

    def reaches(start: Iterable[int], target: int) -> bool:
        stack = list(start)
        seen: set[int] = set()
        while stack:
            w = stack.pop()
            if w == target:
                return True
            if w in seen:
                continue
            seen.add(w)
            stack.extend(deps.get(w, ()))
        return False

    def assign(i: int) -> bool:
        if i == len(nonsinks):
            return True
        u = nonsinks[i]
        for correction in families[u]:
            targets = correction & nonsink_set
            # Every cycle closes on the vertex assigned last, so checking
            # reachability back to u at assignment time catches them all.
            if reaches(targets, u):
                continue
            deps[u] = targets
            if assign(i + 1):
                return True
            del deps[u]
        return False

    return assign(0)
