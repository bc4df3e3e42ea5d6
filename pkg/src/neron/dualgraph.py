"""Dual graphs of nodal curves: vertices are components, edges are double points.

Each edge carries a thickness e >= 1 (the exponent in uv = pi^e), an
orientation tail -> head, and optionally the coordinates of its two branches
on the normalised components together with the glueing scalar c relative to
those coordinates.  Coordinates are field elements or the marker ``INF``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Union

from .ff import GF, FieldElement

__all__ = [
    "INF",
    "Coordinate",
    "Vertex",
    "Edge",
    "DualGraph",
    "Cycle",
    "GraphError",
    "make_edge",
    "validate",
    "resolve",
    "bridges",
    "cycle_basis",
    "load_graph",
    "graph_from_dict",
    "graph_to_dict",
    "dump_graph",
]


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Coordinate = Union[FieldElement, _Infinity]


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int = 0
    name: str = ""

    @property
    def label(self) -> str:
        return self.name or self.id


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    e: int = 1
    tail_coord: Coordinate | None = None
    head_coord: Coordinate | None = None
    c: FieldElement | None = None

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    @property
    def has_branch(self) -> bool:
        return self.tail_coord is not None and self.head_coord is not None

    def other(self, v: str) -> str:
        return self.head if v == self.tail else self.tail

    def coord_at(self, v: str, side: str | None = None) -> Coordinate | None:
        """Branch coordinate on vertex v; ``side`` disambiguates self-loops."""
        if side == "head" or (side is None and v == self.head and v != self.tail):
            return self.head_coord
        return self.tail_coord


def make_edge(id: str, a: str, b: str, e: int = 1, **kw) -> Edge:
    """Edge between a and b with the default orientation (smaller id is the tail)."""
    tail, head = (a, b) if a <= b else (b, a)
    return Edge(id, tail, head, e, **kw)


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    p: int | None = None
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(
            self,
            "_index",
            {
                "v": {v.id: k for k, v in enumerate(self.vertices)},
                "e": {x.id: k for k, x in enumerate(self.edges)},
            },
        )

    # -- lookup --------------------------------------------------------------

    @property
    def vertex_ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    @property
    def edge_ids(self) -> list[str]:
        return [x.id for x in self.edges]

    def vertex(self, vid: str) -> Vertex:
        return self.vertices[self._index["v"][vid]]

    def edge(self, eid: str) -> Edge:
        return self.edges[self._index["e"][eid]]

    def vindex(self, vid: str) -> int:
        return self._index["v"][vid]

    def eindex(self, eid: str) -> int:
        return self._index["e"][eid]

    def incident(self, vid: str) -> list[Edge]:
        return [x for x in self.edges if vid in (x.tail, x.head)]

    def has_vertex(self, vid: str) -> bool:
        return vid in self._index["v"]

    @property
    def betti(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def field(self) -> GF | None:
        return GF(self.p, 2) if self.p else None

    # -- linear algebra --------------------------------------------------------

    def coboundary(self) -> list[list[int]]:
        """d^*: Z^{S0} -> Z^{S1}, (d^* a)(x) = a(head x) - a(tail x)."""
        out = []
        for x in self.edges:
            row = [0] * len(self.vertices)
            if not x.is_loop:
                row[self.vindex(x.head)] += 1
                row[self.vindex(x.tail)] -= 1
            out.append(row)
        return out

    def boundary(self) -> list[list[int]]:
        """d_*: Z^{S1} -> Z^{S0}, the transpose of d^*."""
        cob = self.coboundary()
        return [list(col) for col in zip(*cob)] if cob else [[] for _ in self.vertices]

    def laplacian(self) -> list[list[int]]:
        """d_* d^* on vertices (degree minus adjacency; loops contribute nothing)."""
        n = len(self.vertices)
        L = [[0] * n for _ in range(n)]
        for x in self.edges:
            if x.is_loop:
                continue
            a, b = self.vindex(x.tail), self.vindex(x.head)
            L[a][a] += 1
            L[b][b] += 1
            L[a][b] -= 1
            L[b][a] -= 1
        return L

    def with_all_thickness_one(self) -> "DualGraph":
        return replace(self, edges=tuple(replace(x, e=1) for x in self.edges))


# ---------------------------------------------------------------------------


def _components(vertex_ids: Iterable[str], edges: Iterable[Edge]) -> list[set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in vertex_ids}
    for x in edges:
        adj[x.tail].add(x.head)
        adj[x.head].add(x.tail)
    seen: set[str] = set()
    comps = []
    for v in adj:
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        while queue:
            w = queue.popleft()
            for u in adj[w]:
                if u not in comp:
                    comp.add(u)
                    queue.append(u)
        seen |= comp
        comps.append(comp)
    return comps


def validate(g: DualGraph) -> DualGraph:
    """Check ids, endpoints, thickness and connectivity; return the graph.

    Storage order is the insertion order, which is already deterministic, so
    the returned graph is ``g`` itself.
    """
    ids = [v.id for v in g.vertices]
    if len(set(ids)) != len(ids):
        raise GraphError("duplicate vertex id")
    eids = [x.id for x in g.edges]
    if len(set(eids)) != len(eids):
        raise GraphError("duplicate edge id")
    if not ids:
        raise GraphError("graph has no vertices")
    for v in g.vertices:
        if v.genus < 0:
            raise GraphError(f"vertex {v.id} has negative genus")
    known = set(ids)
    for x in g.edges:
        if x.tail not in known or x.head not in known:
            raise GraphError(f"edge {x.id} has a dangling endpoint")
        if not isinstance(x.e, int) or x.e < 1:
            raise GraphError(f"edge {x.id} has nonpositive thickness {x.e}")
    if len(_components(ids, g.edges)) != 1:
        raise GraphError("graph is disconnected")
    return g


def resolve(
    g: DualGraph,
    only: Iterable[str] | None = None,
    rename: Mapping[str, str] | None = None,
) -> tuple[DualGraph, dict[str, tuple[str, int]]]:
    """Replace each edge of thickness e by a chain of e edges of thickness 1.

    ``only`` restricts the blow-up to the listed edges; ``rename`` gives
    chosen ids to some of the new vertices (keys are the default ids).

    The chain for edge x runs tail -> x#1 -> ... -> x#(e-1) -> head through
    new genus-0 vertices; its edges are x@1, ..., x@e, and the provenance map
    sends x@i to (x, i).  Edges with e = 1 keep their id.

    Branch data follows the chain expansion: component x#i has a coordinate
    z with the previous double point at z = 0 and the next one at z = INF.
    The first link inherits the tail coordinate and the glueing scalar of x;
    the others get scalar 1.
    """
    vertices = list(g.vertices)
    edges: list[Edge] = []
    prov: dict[str, tuple[str, int]] = {}
    F = g.field
    zero = F.zero if F else None
    one = F.one if F else None
    selected = None if only is None else set(only)
    for x in g.edges:
        if x.e == 1 or (selected is not None and x.id not in selected):
            edges.append(x)
            prov[x.id] = (x.id, 1)
            continue
        rename = rename or {}
        inner = [f"{x.id}#{i}" for i in range(1, x.e)]
        chain = [x.tail] + [rename.get(v, v) for v in inner] + [x.head]
        for i in range(1, x.e):
            vertices.append(Vertex(chain[i], 0, chain[i]))
        for i in range(1, x.e + 1):
            tc = x.tail_coord if i == 1 else (INF if x.has_branch else None)
            hc = x.head_coord if i == x.e else (zero if x.has_branch else None)
            c = None
            if x.c is not None:
                c = x.c if i == 1 else one
            eid = f"{x.id}@{i}"
            edges.append(Edge(eid, chain[i - 1], chain[i], 1, tc, hc, c))
            prov[eid] = (x.id, i)
    return DualGraph(tuple(vertices), tuple(edges), g.p), prov


def bridges(g: DualGraph) -> set[str]:
    """Edges whose removal disconnects the graph (iterative low-link search)."""
    adj: dict[str, list[tuple[str, str]]] = {v.id: [] for v in g.vertices}
    for x in g.edges:
        if x.is_loop:
            continue
        adj[x.tail].append((x.head, x.id))
        adj[x.head].append((x.tail, x.id))
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    out: set[str] = set()
    clock = 0
    for root in adj:
        if root in disc:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == via:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = clock
                    clock += 1
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[v])
                if low[v] > disc[parent]:
                    out.add(via)
    return out


@dataclass(frozen=True)
class Cycle:
    """A closed walk C_0, x_0, C_1, ..., x_{m-1}, C_m = C_0.

    ``steps`` holds (C_i, edge id, sign, C_{i+1}) with sign +1 when the edge
    is traversed from tail to head.
    """

    steps: tuple[tuple[str, str, int, str], ...]

    @property
    def vertices(self) -> list[str]:
        return [s[0] for s in self.steps] + ([self.steps[0][0]] if self.steps else [])

    @property
    def edge_ids(self) -> list[str]:
        return [s[1] for s in self.steps]

    def edge_vector(self, g: DualGraph) -> list[int]:
        vec = [0] * len(g.edges)
        for _, eid, sign, _ in self.steps:
            vec[g.eindex(eid)] += sign
        return vec

    @classmethod
    def from_walk(cls, g: DualGraph, start: str, edge_ids: Iterable[str]) -> "Cycle":
        """Build a cycle by following the given edges from ``start``."""
        steps = []
        here = start
        for eid in edge_ids:
            x = g.edge(eid)
            if x.tail == here:
                steps.append((here, eid, 1, x.head))
                here = x.head
            elif x.head == here:
                steps.append((here, eid, -1, x.tail))
                here = x.tail
            else:
                raise GraphError(f"edge {eid} does not meet {here}")
        if here != start:
            raise GraphError("walk is not closed")
        return cls(tuple(steps))


def _spanning_tree(g: DualGraph, root: str | None = None, order: list[str] | None = None):
    """BFS tree: parent pointers (vertex -> (parent, edge id)) and depths."""
    root = root or g.vertices[0].id
    edge_order = order or [x.id for x in g.edges]
    adj: dict[str, list[Edge]] = {v.id: [] for v in g.vertices}
    for eid in edge_order:
        x = g.edge(eid)
        if x.is_loop:
            continue
        adj[x.tail].append(x)
        adj[x.head].append(x)
    parent: dict[str, tuple[str, str] | None] = {root: None}
    depth = {root: 0}
    tree_edges: set[str] = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for x in adj[v]:
            w = x.other(v)
            if w not in parent:
                parent[w] = (v, x.id)
                depth[w] = depth[v] + 1
                tree_edges.add(x.id)
                queue.append(w)
    return parent, depth, tree_edges


def _tree_path(parent, depth, a: str, b: str) -> list[tuple[str, str]]:
    """Tree path from a to b as (vertex, edge id to next vertex) pairs."""
    up_a, up_b = [], []
    while depth[a] > depth[b]:
        up_a.append((a, parent[a][1]))
        a = parent[a][0]
    while depth[b] > depth[a]:
        up_b.append((parent[b][0], parent[b][1], b))
        b = parent[b][0]
    while a != b:
        up_a.append((a, parent[a][1]))
        up_b.append((parent[b][0], parent[b][1], b))
        a, b = parent[a][0], parent[b][0]
    return up_a + [(v, eid) for v, eid, _ in reversed(up_b)]


def cycle_basis(g: DualGraph, root: str | None = None, edge_order: list[str] | None = None) -> list[Cycle]:
    """Fundamental cycles of a BFS spanning tree, one per non-tree edge.

    Each cycle starts at the tail of its non-tree edge, crosses it, and
    returns along the tree.  ``root`` and ``edge_order`` select a different
    (still deterministic) tree.
    """
    parent, depth, tree = _spanning_tree(g, root, edge_order)
    cycles = []
    for x in g.edges:
        if x.id in tree:
            continue
        steps = [(x.tail, x.id, 1, x.head)]
        for v, eid in _tree_path(parent, depth, x.head, x.tail):
            y = g.edge(eid)
            if y.tail == v:
                steps.append((v, eid, 1, y.head))
            else:
                steps.append((v, eid, -1, y.tail))
        cycles.append(Cycle(tuple(steps)))
    return cycles


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _coord_to_text(c: Coordinate) -> str:
    return str(c)


def _coord_from_text(s: str, F: GF) -> Coordinate:
    return INF if s.strip().lower() in ("inf", "infinity", "∞") else F.parse(s)


def graph_from_dict(data: Mapping[str, Any]) -> DualGraph:
    p = data.get("p")
    F = GF(p, 2) if p else None
    vertices = [Vertex(str(v["id"]), int(v.get("genus", 0)), str(v.get("name", ""))) for v in data["vertices"]]
    edges = []
    for x in data["edges"]:
        tc = hc = c = None
        if x.get("branch") is not None or x.get("c") is not None:
            if F is None:
                raise GraphError("branch coordinates and c values need the prime 'p'")
        if x.get("branch") is not None:
            tc = _coord_from_text(x["branch"]["tail_coord"], F)
            hc = _coord_from_text(x["branch"]["head_coord"], F)
        if x.get("c") is not None:
            c = F.parse(x["c"])
        edges.append(Edge(str(x["id"]), str(x["tail"]), str(x["head"]), int(x.get("e", 1)), tc, hc, c))
    return validate(DualGraph(tuple(vertices), tuple(edges), p))


def graph_to_dict(g: DualGraph) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if g.p:
        out["p"] = g.p
    out["vertices"] = [{"id": v.id, "genus": v.genus, "name": v.name} for v in g.vertices]
    out["edges"] = []
    for x in g.edges:
        d: dict[str, Any] = {"id": x.id, "tail": x.tail, "head": x.head, "e": x.e}
        if x.has_branch:
            d["branch"] = {"tail_coord": _coord_to_text(x.tail_coord), "head_coord": _coord_to_text(x.head_coord)}
        if x.c is not None:
            d["c"] = str(x.c)
        out["edges"].append(d)
    return out


def load_graph(path: str | Path) -> DualGraph:
    return graph_from_dict(json.loads(Path(path).read_text()))


def dump_graph(g: DualGraph, path: str | Path | None = None) -> str:
    text = json.dumps(graph_to_dict(g), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
