"""Tests for focused gFlow construction, verification and the oracle."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from zxgnd.diagram import OpenGraph
from zxgnd.gflow import (
    BRUTE_FORCE_LIMIT,
    FocusedGflow,
    brute_force_gflow_exists,
    find_focused_gflow,
    odd_neighborhood,
    verify_focused_gflow,
)
from zxgnd.rng import SplitMix64


def make_og(n, edges, sources=(), sinks=()):
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return OpenGraph(
        vertices=frozenset(range(n)),
        adjacency={v: frozenset(ws) for v, ws in adj.items()},
        sources=frozenset(sources),
        sinks=frozenset(sinks),
    )


def og_from_masks(n, edge_bits, source_bits, sink_bits):
    pairs = list(itertools.combinations(range(n), 2))
    edges = [p for j, p in enumerate(pairs) if (edge_bits >> j) & 1]
    sources = [v for v in range(n) if (source_bits >> v) & 1]
    sinks = [v for v in range(n) if (sink_bits >> v) & 1]
    return make_og(n, edges, sources, sinks)


@st.composite
def open_graphs(draw, max_n=7):
    n = draw(st.integers(min_value=0, max_value=max_n))
    n_pairs = n * (n - 1) // 2
    edge_bits = draw(st.integers(min_value=0, max_value=(1 << n_pairs) - 1))
    source_bits = draw(st.integers(min_value=0, max_value=(1 << n) - 1)) if n else 0
    sink_bits = draw(st.integers(min_value=0, max_value=(1 << n) - 1)) if n else 0
    return og_from_masks(n, edge_bits, source_bits, sink_bits)


# --- frozen examples --------------------------------------------------------


def test_path_graph_witness():
    # i(0) -- v(1) -- o(2) with source i and sink o: the only witness
    # corrects v through o and i through v.
    og = make_og(3, [(0, 1), (1, 2)], sources=[0], sinks=[2])
    f = find_focused_gflow(og)
    assert f is not None
    assert f.g == {1: frozenset({2}), 0: frozenset({1})}
    assert f.order[0] < f.order[1] < f.order[2]
    assert verify_focused_gflow(og, f)
    assert brute_force_gflow_exists(og)


def test_all_boundary_graph_is_trivial():
    og = make_og(3, [(0, 1), (1, 2)], sources=range(3), sinks=range(3))
    f = find_focused_gflow(og)
    assert f is not None
    assert f.g == {}
    assert verify_focused_gflow(og, f)
    assert brute_force_gflow_exists(og)


def test_four_cycle_opposite_boundaries_has_no_gflow():
    og = make_og(4, [(0, 1), (1, 2), (2, 3), (3, 0)], sources=[0], sinks=[2])
    assert find_focused_gflow(og) is None
    assert not brute_force_gflow_exists(og)


def test_empty_graph():
    og = make_og(0, [])
    f = find_focused_gflow(og)
    assert f is not None
    assert f.g == {} and f.order == {}
    assert verify_focused_gflow(og, f)
    assert brute_force_gflow_exists(og)


def test_single_isolated_internal_vertex():
    # Odd(g(u)) can never be {u} when u has no neighbors.
    og = make_og(1, [])
    assert find_focused_gflow(og) is None
    assert not brute_force_gflow_exists(og)


def test_multi_element_correction_set():
    # u(0) -- a(2), w(1) -- a(2), w(1) -- b(3); sinks a, b.  No single
    # vertex corrects u: it takes Odd({a, b}) = N(a) xor N(b) = {u}.
    og = make_og(4, [(0, 2), (1, 2), (1, 3)], sinks=[2, 3])
    f = find_focused_gflow(og)
    assert f is not None
    assert f.g[0] == frozenset({2, 3})
    assert f.g[1] == frozenset({3})
    assert verify_focused_gflow(og, f)
    assert brute_force_gflow_exists(og)


def test_longer_path_levels_are_monotone():
    og = make_og(4, [(0, 1), (1, 2), (2, 3)], sources=[0], sinks=[3])
    f = find_focused_gflow(og)
    assert f is not None
    assert f.order[0] < f.order[1] < f.order[2] < f.order[3]
    assert verify_focused_gflow(og, f)


# --- verifier rejections ----------------------------------------------------


def path_witness():
    og = make_og(3, [(0, 1), (1, 2)], sources=[0], sinks=[2])
    f = find_focused_gflow(og)
    assert f is not None
    return og, f


def test_verify_rejects_emptied_correction_set():
    og, f = path_witness()
    g = dict(f.g)
    g[1] = frozenset()
    assert not verify_focused_gflow(og, FocusedGflow(g, f.order))


def test_verify_rejects_flat_order():
    og, f = path_witness()
    flat = {v: 0 for v in og.vertices}
    assert not verify_focused_gflow(og, FocusedGflow(f.g, flat))


def test_verify_rejects_source_in_correction_set():
    # 1's neighbors are the source 0 and the sink 2; swapping the
    # correction onto the source keeps Odd right but breaks the domain.
    og = make_og(3, [(0, 1), (1, 2)], sources=[0], sinks=[1, 2])
    g = {0: frozenset({1})}
    order = {0: 0, 1: 1, 2: 1}
    assert verify_focused_gflow(og, FocusedGflow(g, order))
    og_flipped = make_og(3, [(0, 1), (1, 2)], sources=[0, 2], sinks=[1, 2])
    assert not verify_focused_gflow(
        og_flipped, FocusedGflow({0: frozenset({2})}, {0: 0, 1: 1, 2: 1})
    )


def test_verify_rejects_wrong_domain():
    og, f = path_witness()
    missing = dict(f.g)
    del missing[0]
    assert not verify_focused_gflow(og, FocusedGflow(missing, f.order))
    extra = dict(f.g)
    extra[2] = frozenset()
    assert not verify_focused_gflow(og, FocusedGflow(extra, f.order))


def test_verify_rejects_missing_order_entry():
    og, f = path_witness()
    partial = {v: lvl for v, lvl in f.order.items() if v != 2}
    assert not verify_focused_gflow(og, FocusedGflow(f.g, partial))


def test_verify_rejects_unfocused_correction_set():
    # Correcting 0 through the shared sink 3 also flips non-sink 1.
    og = make_og(4, [(0, 3), (1, 3), (1, 2)], sinks=[2, 3])
    g = {0: frozenset({3}), 1: frozenset({2})}
    order = {0: 0, 1: 0, 2: 1, 3: 1}
    assert not verify_focused_gflow(og, FocusedGflow(g, order))


# --- brute force guard ------------------------------------------------------


def test_brute_force_size_guard():
    og = make_og(BRUTE_FORCE_LIMIT + 1, [])
    with pytest.raises(ValueError):
        brute_force_gflow_exists(og)


# --- agreement with the oracle ---------------------------------------------


def test_exhaustive_agreement_up_to_four_vertices():
    checked = 0
    for n in range(5):
        n_pairs = n * (n - 1) // 2
        for edge_bits in range(1 << n_pairs):
            for source_bits in range(1 << n):
                for sink_bits in range(1 << n):
                    og = og_from_masks(n, edge_bits, source_bits, sink_bits)
                    f = find_focused_gflow(og)
                    assert (f is not None) == brute_force_gflow_exists(og)
                    if f is not None:
                        assert verify_focused_gflow(og, f)
                    checked += 1
    assert checked > 2000


def test_sampled_agreement_five_vertices():
    rng = SplitMix64(20260815)
    for _ in range(1500):
        og = og_from_masks(
            5, rng.rand_below(1 << 10), rng.rand_below(32), rng.rand_below(32)
        )
        f = find_focused_gflow(og)
        assert (f is not None) == brute_force_gflow_exists(og)
        if f is not None:
            assert verify_focused_gflow(og, f)


# --- properties -------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(open_graphs())
def test_found_witness_always_verifies(og):
    f = find_focused_gflow(og)
    if f is not None:
        assert verify_focused_gflow(og, f)
        assert set(f.order) == set(og.vertices)


@settings(max_examples=100, deadline=None)
@given(open_graphs(max_n=6))
def test_agreement_on_random_graphs(og):
    assert (find_focused_gflow(og) is not None) == brute_force_gflow_exists(og)


@settings(max_examples=100, deadline=None)
@given(open_graphs(max_n=6))
def test_grounding_a_vertex_preserves_existence(og):
    # Moving any vertex into the sinks only shrinks the constraint set, so
    # gFlow existence survives grounding a spider.
    if find_focused_gflow(og) is None:
        return
    for v in og.vertices:
        bigger = OpenGraph(
            og.vertices, og.adjacency, og.sources, og.sinks | {v}
        )
        f = find_focused_gflow(bigger)
        assert f is not None
        assert verify_focused_gflow(bigger, f)


@settings(max_examples=150, deadline=None)
@given(open_graphs(), st.integers(min_value=0, max_value=(1 << 7) - 1))
def test_odd_neighborhood_is_linear(og, mask):
    verts = sorted(og.vertices)
    a = {v for j, v in enumerate(verts) if (mask >> j) & 1}
    b = {v for j, v in enumerate(verts) if (mask >> (j + 1)) & 1}
    lhs = odd_neighborhood(og, a ^ b)
    rhs = odd_neighborhood(og, a) ^ odd_neighborhood(og, b)
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(open_graphs())
def test_find_is_deterministic(og):
    assert find_focused_gflow(og) == find_focused_gflow(og)
