"""ZX diagrams with discarding (grounded) spiders.

Only Z-spiders are stored; X-spiders are turned into Z-spiders with
Hadamard-tagged legs on ingestion.  Edges are unordered pairs tagged plain
or Hadamard, with at most one edge per vertex pair and no self-loops; the
parallel-edge and self-loop bookkeeping of spider fusion is applied on the
fly, so those transient states never materialize.  A grounded spider
discards its value: the ground is a vertex flag, which also makes the
"merge duplicate grounds" rule automatic.

Vertex ids are stable and never reused within a diagram's lifetime, so
rewrite traces and flow witnesses stay valid across steps.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .phase import format_phase, normalize_phase, parse_phase


class VertexKind(enum.Enum):
    BOUNDARY = "boundary"
    Z = "z_spider"


@dataclass
class VertexData:
    kind: VertexKind
    phase: Fraction = Fraction(0)
    grounded: bool = False
    # boundary vertices only: True when the wire carries a bit
    classical: bool = False


@dataclass(frozen=True)
class OpenGraph:
    """The graph underlying a graph-like diagram, with flow endpoints.

    ``sources`` are the spiders attached to inputs; ``sinks`` are the
    spiders attached to outputs plus every grounded spider.
    """

    vertices: frozenset[int]
    adjacency: dict[int, frozenset[int]]
    sources: frozenset[int]
    sinks: frozenset[int]

    @property
    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for v, nbrs in self.adjacency.items():
            for w in nbrs:
                if v < w:
                    out.add((v, w))
        return out


class Diagram:
    """A ZX diagram with grounds, Hadamard edge tags and typed boundaries."""

    def __init__(self, name: str = ""):
        self.name = name
        self._vdata: dict[int, VertexData] = {}
        self._adj: dict[int, dict[int, str]] = {}
        self.inputs: list[int] = []
        self.outputs: list[int] = []
        self._next_id = 0

    # --- vertices ---------------------------------------------------------

    def add_spider(self, phase=Fraction(0), grounded: bool = False) -> int:
        v = self._next_id
        self._next_id += 1
        self._vdata[v] = VertexData(VertexKind.Z, normalize_phase(phase), grounded)
        self._adj[v] = {}
        return v

    def add_boundary(self, classical: bool = False) -> int:
        v = self._next_id
        self._next_id += 1
        self._vdata[v] = VertexData(VertexKind.BOUNDARY, Fraction(0), False, classical)
        self._adj[v] = {}
        return v

    def remove_vertex(self, v: int) -> None:
        for w in list(self._adj[v]):
            del self._adj[w][v]
        del self._adj[v]
        del self._vdata[v]

    def vertices(self) -> list[int]:
        return sorted(self._vdata)

    def has_vertex(self, v: int) -> bool:
        return v in self._vdata

    def spiders(self) -> list[int]:
        return sorted(v for v, d in self._vdata.items() if d.kind is VertexKind.Z)

    def spider_count(self) -> int:
        return sum(1 for d in self._vdata.values() if d.kind is VertexKind.Z)

    def is_boundary(self, v: int) -> bool:
        return self._vdata[v].kind is VertexKind.BOUNDARY

    def is_classical(self, v: int) -> bool:
        return self._vdata[v].classical

    def phase(self, v: int) -> Fraction:
        return self._vdata[v].phase

    def set_phase(self, v: int, phase) -> None:
        self._vdata[v].phase = normalize_phase(phase)

    def add_phase(self, v: int, phase) -> None:
        self.set_phase(v, self._vdata[v].phase + normalize_phase(phase))

    def is_grounded(self, v: int) -> bool:
        return self._vdata[v].grounded

    def set_grounded(self, v: int, grounded: bool = True) -> None:
        self._vdata[v].grounded = grounded

    def set_classical(self, v: int, classical: bool = True) -> None:
        if self._vdata[v].kind is not VertexKind.BOUNDARY:
            raise ValueError(f"vertex {v} is not a boundary")
        self._vdata[v].classical = classical

    def grounded_spiders(self) -> list[int]:
        return sorted(v for v, d in self._vdata.items() if d.grounded)

    # --- edges ------------------------------------------------------------

    def add_edge(self, a: int, b: int, kind: str = "h") -> None:
        if a == b:
            raise ValueError("self-loops are not representable")
        if kind not in ("h", "p"):
            raise ValueError(f"bad edge kind {kind!r}")
        if b in self._adj[a]:
            raise ValueError(f"edge {a}-{b} already present")
        self._adj[a][b] = kind
        self._adj[b][a] = kind

    def remove_edge(self, a: int, b: int) -> None:
        del self._adj[a][b]
        del self._adj[b][a]

    def edge_kind(self, a: int, b: int) -> Optional[str]:
        return self._adj[a].get(b)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj[a]

    def toggle_edge(self, a: int, b: int) -> None:
        """Toggle the Hadamard edge between two spiders (complementation)."""
        if b in self._adj[a]:
            if self._adj[a][b] != "h":
                raise ValueError("cannot toggle a plain edge")
            self.remove_edge(a, b)
        else:
            self.add_edge(a, b, "h")

    def neighbors(self, v: int) -> list[int]:
        return sorted(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def edges(self) -> list[tuple[int, int, str]]:
        out = []
        for a, nbrs in self._adj.items():
            for b, kind in nbrs.items():
                if a < b:
                    out.append((a, b, kind))
        return sorted(out)

    # --- derived views ----------------------------------------------------

    def boundary_neighbors(self, v: int) -> list[int]:
        return [w for w in self.neighbors(v) if self.is_boundary(w)]

    def attachment_count(self, v: int) -> int:
        """Inputs + outputs + grounds attached to spider ``v``."""
        return len(self.boundary_neighbors(v)) + (1 if self.is_grounded(v) else 0)

    def is_internal(self, v: int) -> bool:
        """A spider with no boundary neighbor (grounds do not count)."""
        return not self.is_boundary(v) and not self.boundary_neighbors(v)

    def copy(self) -> "Diagram":
        d = Diagram(self.name)
        d._vdata = {
            v: VertexData(dat.kind, dat.phase, dat.grounded, dat.classical)
            for v, dat in self._vdata.items()
        }
        d._adj = {v: dict(nbrs) for v, nbrs in self._adj.items()}
        d.inputs = list(self.inputs)
        d.outputs = list(self.outputs)
        d._next_id = self._next_id
        return d

    def stats(self) -> str:
        return (
            f"{self.spider_count()} spiders, {len(self.edges())} edges,"
            f" {len(self.grounded_spiders())} grounds,"
            f" {len(self.inputs)}+{len(self.outputs)} boundaries"
        )

    # --- graph-like checks --------------------------------------------------

    def check_graph_like(self, strict: bool = False) -> list[str]:
        """Return the list of graph-like form violations (empty when ok).

        Weak form: Z-spiders only, Hadamard spider-spider edges, no
        parallel edges or self-loops, no adjacent ground-spiders, every
        boundary and ground attached to a spider, grounded spiders carry
        phase 0, and each spider holds at most one input (grounds are at
        most one by representation); outputs are unbounded and may share
        a spider with an input and a ground.  Strict form also bounds
        outputs by one per spider, forbids a ground-spider from touching
        any boundary, and requires plain boundary edges.
        """
        issues = []
        for v in self.vertices():
            dat = self._vdata[v]
            if dat.kind is VertexKind.BOUNDARY:
                if self.degree(v) != 1:
                    issues.append(f"boundary {v} has degree {self.degree(v)}")
                if dat.phase != 0 or dat.grounded:
                    issues.append(f"boundary {v} carries phase or ground")
                if v not in self.inputs and v not in self.outputs:
                    issues.append(f"boundary {v} is neither input nor output")
                for w in self.neighbors(v):
                    if self.is_boundary(w):
                        issues.append(f"boundary {v} wired to boundary {w}")
                continue
            if v in self._adj[v]:
                issues.append(f"self-loop at {v}")
            if dat.grounded and dat.phase != 0:
                issues.append(f"ground-spider {v} has phase {dat.phase}")
            for w in self.neighbors(v):
                if self.is_boundary(w):
                    if strict and self.edge_kind(v, w) != "p":
                        issues.append(f"boundary edge {v}-{w} is not plain")
                    continue
                if self.edge_kind(v, w) != "h":
                    issues.append(f"spider edge {v}-{w} is not Hadamard")
                if dat.grounded and self.is_grounded(w) and v < w:
                    issues.append(f"connected ground-spiders {v}-{w}")
            boundary = self.boundary_neighbors(v)
            n_in = sum(1 for w in boundary if w in self.inputs)
            n_out = sum(1 for w in boundary if w in self.outputs)
            if n_in > 1:
                issues.append(f"spider {v} has {n_in} inputs")
            if strict and n_out > 1:
                issues.append(f"spider {v} has {n_out} outputs")
            if strict and dat.grounded and boundary:
                issues.append(f"ground-spider {v} touches a boundary")
        for b in self.inputs + self.outputs:
            if self._vdata[b].kind is not VertexKind.BOUNDARY:
                issues.append(f"listed boundary {b} is not a boundary vertex")
            elif self.degree(b) == 1 and self.is_boundary(self.neighbors(b)[0]):
                pass  # already reported as boundary-to-boundary wire
            elif self.degree(b) == 0:
                issues.append(f"boundary {b} is detached")
        return issues

    def is_graph_like(self, strict: bool = False) -> bool:
        return not self.check_graph_like(strict)

    def underlying_open_graph(self) -> OpenGraph:
        """Project a graph-like diagram onto its open graph."""
        spiders = frozenset(self.spiders())
        adjacency = {
            v: frozenset(w for w in self.neighbors(v) if not self.is_boundary(w))
            for v in spiders
        }
        sources = frozenset(
            v
            for v in spiders
            if any(w in self.inputs for w in self.boundary_neighbors(v))
        )
        sinks = frozenset(
            v
            for v in spiders
            if self.is_grounded(v)
            or any(w in self.outputs for w in self.boundary_neighbors(v))
        )
        return OpenGraph(spiders, adjacency, sources, sinks)


# --- normalization ---------------------------------------------------------


def _merge_edge(d: Diagram, u: int, w: int, incoming: str) -> None:
    """Land an edge on (u, w) where one may already exist.

    Parallel-pair calculus: plain + plain keeps one plain; Hadamard +
    Hadamard cancels both (duplicate Hadamard wires erase); plain +
    Hadamard keeps the plain edge and adds a pi phase (the Hadamard
    becomes a self-loop when the plain edge later fuses).
    """
    existing = d.edge_kind(u, w)
    if existing is None:
        d.add_edge(u, w, incoming)
    elif existing == "h" and incoming == "h":
        d.remove_edge(u, w)
    elif existing == "p" and incoming == "p":
        pass
    else:
        if existing == "h":
            d.remove_edge(u, w)
            d.add_edge(u, w, "p")
        d.add_phase(u, 1)


def _fuse(d: Diagram, u: int, v: int) -> None:
    """Fuse spider ``v`` into spider ``u`` across their plain edge."""
    d.remove_edge(u, v)
    d.add_phase(u, d.phase(v))
    if d.is_grounded(v):
        d.set_grounded(u)
    for w in list(d.neighbors(v)):
        kind = d.edge_kind(v, w)
        d.remove_edge(v, w)
        _merge_edge(d, u, w, kind)
    d.remove_vertex(v)


def normalize(d: Diagram) -> Diagram:
    """Fuse plain edges and clean up grounds, in place.

    Fixpoint of: spider fusion over plain spider-spider edges (phases add,
    ground flags combine); duplicate Hadamard edge pairs cancel; a Hadamard
    self-loop created by fusion adds pi to the spider's phase and vanishes;
    edges between two ground-spiders are removed; grounded spiders' phases
    are reset to 0.  The result is weakly graph-like provided every
    boundary ends up next to a spider.
    """
    work = [
        (a, b)
        for a, b, kind in d.edges()
        if kind == "p" and not d.is_boundary(a) and not d.is_boundary(b)
    ]
    while work:
        u, v = work.pop()
        if u not in d._vdata or v not in d._vdata or d.edge_kind(u, v) != "p":
            continue
        u, v = min(u, v), max(u, v)
        _fuse(d, u, v)
        for w in d.neighbors(u):
            if d.edge_kind(u, w) == "p" and not d.is_boundary(w):
                work.append((u, w))
    for v in d.grounded_spiders():
        d.set_phase(v, 0)
        for w in d.neighbors(v):
            if not d.is_boundary(w) and d.is_grounded(w) and d.edge_kind(v, w) == "h":
                d.remove_edge(v, w)
    return d


def _reroute_boundary(d: Diagram, v: int, b: int) -> None:
    """Replace the edge v-b with v -H- w1 -H- w2 -plain- b.

    A Hadamard tag on the original boundary edge is absorbed by an Euler
    decomposition: the two fresh spiders get phase pi/2 each and v gains
    pi/2, so the chain equals a Hadamard followed by the plain wire.
    """
    kind = d.edge_kind(v, b)
    d.remove_edge(v, b)
    if kind == "h":
        w1 = d.add_spider(Fraction(1, 2))
        w2 = d.add_spider(Fraction(1, 2))
        if not d.is_grounded(v):
            d.add_phase(v, Fraction(1, 2))
    else:
        w1 = d.add_spider()
        w2 = d.add_spider()
    d.add_edge(v, w1, "h")
    d.add_edge(w1, w2, "h")
    d.add_edge(w2, b, "p")


def to_strict_graph_like(d: Diagram) -> Diagram:
    """Make a weakly graph-like diagram strictly graph-like, in place.

    Bare boundary-to-boundary wires get a fresh pass-through spider plus
    a two-spider double-Hadamard identity chain on one side.  Then
    every spider that breaks the strict multiplicity rule (two or more
    inputs, two or more outputs, or a ground sharing the spider with any
    boundary) has each attached input and output re-routed through a
    chain of two fresh spiders joined by Hadamard edges.  Hadamard-tagged
    boundary edges are re-routed the same way regardless, absorbing the
    Hadamard into the chain, so all boundary edges end up plain.
    """
    for a, b, kind in d.edges():
        if d.is_boundary(a) and d.is_boundary(b):
            d.remove_edge(a, b)
            s = d.add_spider()
            d.add_edge(a, s, kind)
            d.add_edge(s, b, "p")
            _reroute_boundary(d, s, a)
    for v in d.spiders():
        boundary = d.boundary_neighbors(v)
        n_in = sum(1 for b in boundary if b in d.inputs)
        n_out = len(boundary) - n_in
        if n_in > 1 or n_out > 1 or (d.is_grounded(v) and boundary):
            reroute = boundary
        else:
            reroute = [b for b in boundary if d.edge_kind(v, b) == "h"]
        for b in reroute:
            _reroute_boundary(d, v, b)
    return d


# --- JSON ------------------------------------------------------------------


def diagram_to_json(d: Diagram) -> str:
    """Serialize a diagram to the JSON interchange format."""
    doc = {
        "vertices": [
            {
                "id": v,
                "kind": d._vdata[v].kind.value,
                "phase": format_phase(d._vdata[v].phase),
                "ground": d._vdata[v].grounded,
            }
            for v in d.vertices()
        ],
        "edges": [[a, b, kind] for a, b, kind in d.edges()],
        "inputs": [{"id": b, "classical": d.is_classical(b)} for b in d.inputs],
        "outputs": [{"id": b, "classical": d.is_classical(b)} for b in d.outputs],
    }
    return json.dumps(doc, indent=2)


def diagram_from_json(text: str) -> Diagram:
    """Parse the JSON interchange format back into a diagram."""
    doc = json.loads(text)
    d = Diagram()
    kinds = {k.value: k for k in VertexKind}
    for vdoc in doc["vertices"]:
        v = int(vdoc["id"])
        kind = kinds[vdoc["kind"]]
        dat = VertexData(
            kind,
            parse_phase(str(vdoc.get("phase", "0"))),
            bool(vdoc.get("ground", False)),
        )
        if v in d._vdata:
            raise ValueError(f"duplicate vertex id {v}")
        d._vdata[v] = dat
        d._adj[v] = {}
        d._next_id = max(d._next_id, v + 1)
    for a, b, kind in doc["edges"]:
        d.add_edge(int(a), int(b), kind)
    for key, target in (("inputs", d.inputs), ("outputs", d.outputs)):
        for bdoc in doc.get(key, []):
            b = int(bdoc["id"])
            d._vdata[b].classical = bool(bdoc.get("classical", False))
            target.append(b)
    return d
