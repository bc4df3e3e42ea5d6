"""Shared helpers for the test suite: random dual graphs and small oracles."""

from __future__ import annotations

import random
from itertools import combinations

from sympy import divisors

from neron.divisors import DivisorSpec, analyse_divisor, cycle_product
from neron.dualgraph import INF, DualGraph, Edge, Vertex, cycle_basis, validate
from neron.ff import GF
from neron.snf import bareiss_det
from neron.x0p import X_INF, X_ZERO, cusp_divisor


def random_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 12, max_e: int = 6) -> DualGraph:
    """A connected multigraph: a random spanning tree plus extra edges (loops allowed)."""
    nv = rng.randint(1, max_vertices)
    vertices = [Vertex(f"C{i}", rng.choice([0, 0, 1]), f"C{i}") for i in range(nv)]
    edges = []
    for i in range(1, nv):
        j = rng.randrange(i)
        edges.append(Edge(f"x{len(edges)}", f"C{j}", f"C{i}", rng.randint(1, max_e)))
    while len(edges) < max_edges and rng.random() < 0.75:
        a, b = rng.randrange(nv), rng.randrange(nv)
        edges.append(Edge(f"x{len(edges)}", f"C{min(a, b)}", f"C{max(a, b)}", rng.randint(1, max_e)))
    return validate(DualGraph(tuple(vertices), tuple(edges)))


def connected_without(g: DualGraph, skip: str) -> bool:
    """Whether g stays connected after deleting the edge ``skip`` (plain search)."""
    ids = g.vertex_ids
    seen = {ids[0]}
    stack = [ids[0]]
    while stack:
        v = stack.pop()
        for x in g.edges:
            if x.id == skip:
                continue
            for a, b in ((x.tail, x.head), (x.head, x.tail)):
                if a == v and b not in seen:
                    seen.add(b)
                    stack.append(b)
    return len(seen) == len(ids)


def bridge_oracle(g: DualGraph) -> set[str]:
    return {x.id for x in g.edges if not x.is_loop and not connected_without(g, x.id)}


def spanning_tree_count(g: DualGraph) -> int:
    """Kirchhoff: any cofactor of the Laplacian."""
    L = g.laplacian()
    if len(L) == 1:
        return 1
    return bareiss_det([row[1:] for row in L[1:]])


def spanning_tree_count_brute(g: DualGraph) -> int:
    """Count edge subsets of size |V|-1 that form a tree (tiny graphs only)."""
    ids = g.vertex_ids
    n = len(ids)
    edges = [x for x in g.edges if not x.is_loop]
    count = 0
    for subset in combinations(edges, n - 1):
        parent = {v: v for v in ids}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        ok = True
        for x in subset:
            a, b = find(x.tail), find(x.head)
            if a == b:
                ok = False
                break
            parent[a] = b
        count += ok
    return count


def inverse_by_euclid(a: int, p: int) -> int:
    r0, r1, s0, s1 = p, a % p, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    assert r0 == 1
    return s0 % p


def two_vertex_graph(*thicknesses: int, genus: tuple[int, int] = (0, 0)) -> DualGraph:
    vertices = (Vertex("A", genus[0], "A"), Vertex("B", genus[1], "B"))
    edges = tuple(Edge(f"x{i}", "A", "B", e) for i, e in enumerate(thicknesses))
    return validate(DualGraph(vertices, edges))


def graph_of(vertices, edges, genus=0) -> DualGraph:
    """Build from vertex ids and (id, tail, head, e) tuples."""
    vs = tuple(Vertex(v, genus, v) for v in vertices)
    es = tuple(Edge(i, t, h, e) for i, t, h, e in edges)
    return validate(DualGraph(vs, es))


def random_x0p_divisor(model, rng, n_points=3):
    """Degree zero on each component, plus a multiple of n(0 - inf)."""
    p = model.p
    F = GF(p, 2)
    bad = set(model.locus.j_values())
    terms = []
    for C in (X_INF, X_ZERO):
        pts = []
        while len(pts) < n_points:
            x = F(rng.randrange(p), rng.randrange(p))
            if x not in bad and x.frobenius() not in bad and x not in pts:
                pts.append(x)
        mults = [rng.randint(-3, 3) for _ in pts]
        mults.append(-sum(mults))
        terms += [(C, x, m) for x, m in zip(pts + [INF], mults)]
    k = rng.randint(-2, 2)
    return DivisorSpec.of(*terms) + cusp_divisor(k * model.n, -k * model.n)


def cycle_scalars(g, E):
    """The cycle products of E over the default cycle basis."""
    rep = analyse_divisor(g, E, cycles=[])
    return [cycle_product(g, None, rep.a, rep.functions, c) for c in cycle_basis(g)]


def multiplicative_order(x):
    """Order of x in the multiplicative group of F_{p^2}."""
    q = x.field.p ** 2 - 1
    return next(d for d in divisors(q) if x**d == 1)
