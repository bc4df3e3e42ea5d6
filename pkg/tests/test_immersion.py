from __future__ import annotations

import pytest
from sympy import primefactors

from _support import bridge_oracle, connected_without, graph_of, random_graph, two_vertex_graph
from neron.compgroup import component_group, original_vertex_subgroup_order, phi_quotient, vertex_difference
from neron.dualgraph import DualGraph, Edge, Vertex, validate
from neron.immersion import (
    bridge_path,
    closed_immersion,
    extendable_locus,
    injectivity_condition,
    injectivity_of_factor,
    lemma964_image,
    properness_condition,
)
from neron.x0p import build_x0p_model


@pytest.fixture(scope="module")
def x23():
    return build_x0p_model(23)


def _theta():
    return graph_of("AB", [("x", "A", "B", 1), ("y", "A", "B", 1), ("z", "A", "B", 1)])


def _leaf_off_cycle():
    return graph_of("ABL", [("x", "A", "B", 1), ("y", "A", "B", 1), ("b", "B", "L", 1)])


def _valuation(n, q):
    k = 0
    while n % q == 0:
        n, k = n // q, k + 1
    return k


def _properness_oracle(g):
    """Each non-bridge x lies on a loop of edges y with v_q(e(y)) >= v_q(e(x)), for every q."""
    br = bridge_oracle(g)
    for x in g.edges:
        if x.id in br or x.is_loop:
            continue
        for q in primefactors(x.e):
            k = _valuation(x.e, q)
            sub = DualGraph(g.vertices, tuple(y for y in g.edges if _valuation(y.e, q) >= k), g.p)
            # x is on a cycle of sub iff its endpoints stay joined once x is removed
            reach = {x.tail}
            stack = [x.tail]
            while stack:
                v = stack.pop()
                for y in sub.edges:
                    if y.id == x.id:
                        continue
                    for a, b in ((y.tail, y.head), (y.head, y.tail)):
                        if a == v and b not in reach:
                            reach.add(b)
                            stack.append(b)
            if x.head not in reach:
                return False
    return True


def test_extendable_locus_examples(x23):
    path = graph_of("ABC", [("x", "A", "B", 2), ("y", "B", "C", 1)])
    assert extendable_locus(path) == {"x", "y"}
    assert extendable_locus(_theta()) == set()
    assert extendable_locus(x23.graph) == set()


def test_injectivity_examples(x23):
    assert injectivity_condition(two_vertex_graph(1, 1)) == (True, None)
    assert injectivity_condition(_leaf_off_cycle()) == (False, "L")
    assert injectivity_condition(x23.resolved) == (True, None)


def test_injectivity_genus_and_loops():
    g = graph_of("AB", [("x", "A", "B", 1)])
    assert injectivity_condition(g) == (False, "A")
    g = validate(DualGraph((Vertex("A", 1, ""), Vertex("B", 1, "")), (Edge("x", "A", "B", 1),)))
    assert injectivity_condition(g) == (True, None)
    g = graph_of("AB", [("x", "A", "B", 1), ("l", "A", "A", 1), ("m", "B", "B", 1)])
    assert injectivity_condition(g) == (True, None)


def test_properness_examples(x23):
    assert properness_condition(two_vertex_graph(2, 2)) == (True, None)
    assert properness_condition(two_vertex_graph(2, 1)) == (False, ("x0", 2))
    assert properness_condition(_theta()) == (True, None)
    assert properness_condition(x23.graph) == (False, ("x_0", 3))


def test_properness_p23_fails_at_both_thick_edges(x23):
    failing = {d.edge: d.failing_prime for d in closed_immersion(x23.graph).edges if d.failing_prime}
    assert failing == {"x_0": 3, "x_3": 2}


def test_self_loops_pass_properness():
    g = graph_of("AB", [("x", "A", "B", 1), ("y", "A", "B", 1), ("l", "A", "A", 4)])
    assert properness_condition(g) == (True, None)


def test_factor_image_examples():
    g = two_vertex_graph(1, 1, 1)
    assert phi_quotient(g).order == 1
    assert all(lemma964_image(g, x, 1) == () for x in g.edge_ids)

    g = two_vertex_graph(2, 2)
    assert phi_quotient(g).order == 2
    assert injectivity_of_factor(g, "x0") and injectivity_of_factor(g, "x1")
    assert lemma964_image(g, "x0", 1) != lemma964_image(g, "x0", 2)

    g = two_vertex_graph(2, 1)
    q = phi_quotient(g)
    assert q.element_order(lemma964_image(g, "x0", 1)) == 1
    assert not injectivity_of_factor(g, "x0")


def test_factor_image_position_range():
    g = two_vertex_graph(3, 1)
    with pytest.raises(ValueError):
        lemma964_image(g, "x0", 0)
    with pytest.raises(ValueError):
        lemma964_image(g, "x0", 4)


def test_factor_images_are_multiples():
    g = two_vertex_graph(4, 6, 2)
    q = phi_quotient(g)
    one = lemma964_image(g, "x1", 1, q)
    for i in range(1, 7):
        assert lemma964_image(g, "x1", i, q) == q.scale(i, one)


def test_closed_immersion_report(x23):
    g = validate(
        DualGraph(
            (Vertex("A", 1, ""), Vertex("B", 2, "")),
            (Edge("x", "A", "B", 1), Edge("y", "A", "B", 1)),
        )
    )
    rep = closed_immersion(g)
    assert rep.closed_immersion and rep.regular_case and rep.smooth_locus_closed_immersion

    rep = closed_immersion(_leaf_off_cycle())
    assert not rep.closed_immersion
    assert rep.bridges == ("b",) and rep.smooth_locus_closed_immersion is False

    rep = closed_immersion(x23.graph)
    assert not rep.closed_immersion and rep.injectivity_ok and not rep.properness_ok
    assert rep.properness_counterexample == ("x_0", 3)
    assert rep.smooth_locus_closed_immersion is None
    assert rep.to_dict()["properness_counterexample"] == ["x_0", 3]

    rep = closed_immersion(x23.resolved)
    assert rep.closed_immersion and rep.regular_case


def test_properness_matches_factor_injectivity(rng):
    for _ in range(500):
        g = random_graph(rng)
        br = bridge_oracle(g)
        q = phi_quotient(g)
        factors = all(injectivity_of_factor(g, x.id, q) for x in g.edges if x.id not in br)
        assert properness_condition(g)[0] == factors


def test_properness_matches_loop_oracle(rng):
    for _ in range(300):
        g = random_graph(rng)
        assert properness_condition(g)[0] == _properness_oracle(g)


def test_injectivity_matches_oracle(rng):
    for _ in range(300):
        g = random_graph(rng)
        br = bridge_oracle(g)
        expected = all(
            g.vertex(v).genus > 0
            or any(x.is_loop for x in g.incident(v))
            or any(x.id not in br for x in g.incident(v))
            for v in g.vertex_ids
        )
        assert injectivity_condition(g)[0] == expected


def test_trivial_class_implies_bridge_path(rng):
    for _ in range(500):
        g = random_graph(rng)
        phi = component_group(g)
        ids = g.vertex_ids
        for c1 in ids:
            for c2 in ids:
                if c1 == c2 or any(phi.project(vertex_difference(c1, c2))):
                    continue
                path = bridge_path(g, c1, c2)
                assert path is not None
                for eid in path:
                    assert not connected_without(g, eid)


def test_bridge_path_walks():
    g = graph_of("ABCD", [("x", "A", "B", 1), ("y", "B", "C", 2), ("z", "C", "D", 1), ("w", "C", "D", 1)])
    assert bridge_path(g, "A", "C") == ["x", "y"]
    assert bridge_path(g, "A", "D") is None
    assert bridge_path(g, "B", "B") == []


def test_index_relation(rng):
    for _ in range(500):
        g = random_graph(rng)
        total = component_group(g).order
        assert total == original_vertex_subgroup_order(g) * phi_quotient(g).order
