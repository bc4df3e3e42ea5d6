"""Acceptance criteria, one test per criterion (criterion 1 is split per prime).

Each test records a PASS/FAIL line that is printed in the terminal summary
and echoed with ``-s``.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from fractions import Fraction
from math import lcm

import pytest
from sympy import primerange

import conftest
from _support import (
    bridge_oracle,
    cycle_scalars,
    multiplicative_order,
    random_graph,
    random_x0p_divisor,
    spanning_tree_count,
)
from neron.compgroup import component_group, original_vertex_subgroup_order, phi_quotient, vertex_difference
from neron.cx import propagate_cx, scalar_between, t2_neighbors, theorem76_alpha, transport_cx
from neron.divisors import Decision, is_trivial
from neron.dualgraph import resolve
from neron.ff import GF
from neron.immersion import bridge_path, injectivity_of_factor, properness_condition
from neron.ssgraph import mass_check, supersingular_j_invariants, supersingular_oracle_table
from neron.x0p import build_x0p_model, cuspidal_order, cusp_divisor, f_check, verify_theorem82


def _record(name: str, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE_RESULTS.append((name, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@contextmanager
def criterion(name: str, limit: float | None = None):
    """Time the block, record the outcome, and fail on a time overrun."""
    notes: list[str] = []
    start = time.perf_counter()
    try:
        yield notes
    except AssertionError as exc:
        _record(name, False, f"{time.perf_counter() - start:.2f}s  {exc}".splitlines()[0])
        raise
    elapsed = time.perf_counter() - start
    ok = limit is None or elapsed < limit
    _record(name, ok, " ".join([f"{elapsed:.2f}s"] + notes))
    assert ok, f"{name}: {elapsed:.2f}s exceeds {limit}s"


# -- 1. case table -------------------------------------------------------------

# p: (base, pair, {j: c(j)}, factors, product)
CASES = {
    31: (2, (2, 4), {4: -6}, (9, -4), -5),
    47: (9, (9, 10), {10: 3}, (15, -11), 23),
    59: (15, (15, 28), {28: 21}, (35, 10), -4),
    71: (-31, (-31, -23), {-23: -13}, (49, 38), 16),
    23: (-4, (0, -4), {0: -3}, (13, -5), 4),
}


def _case_mismatches(p: int) -> list[str]:
    base, pair, cvals, factors, product = CASES[p]
    F = GF(p, 2)
    bad = []

    def check(label, got, want):
        if got != F(want):
            bad.append(f"{label}: got {got.signed()}, expected {want}")

    model = build_x0p_model(p, "printed", base=base)
    for j, c in cvals.items():
        check(f"c(x_{j})", model.cx[j], c)
    if p == 23:
        (nb,) = [n for n in t2_neighbors(-4, 23) if n.u == F(-3)]
        details: dict = {}
        transport_cx((F(-4), F(1), 1), nb, 3, 1, "printed", details)
        check("beta", details["beta"], 6)
        check("alpha", details["alpha"], 13)
        check("gamma", details["gamma"], F(1) / 7)
    chk = f_check(model, pair)
    for (edge, got), want in zip(chk.factors, factors):
        check(f"factor {edge}", got, want)
    check("product", chk.product, product)
    if chk.product == 1:
        bad.append("product is 1")
    return bad


@pytest.mark.parametrize("p", [31, 47, 59, 71, 23])
def test_criterion_1_case_table(p):
    with criterion(f"1 case table p={p}"):
        bad = _case_mismatches(p)
        assert not bad, "; ".join(bad)


def test_criterion_1_runtime():
    with criterion("1 case table runtime < 1 s", 1.0) as notes:
        start = time.perf_counter()
        for p in CASES:
            _case_mismatches(p)
        notes.append(f"(all five primes, {time.perf_counter() - start:.2f}s)")


# -- 2. supersingular lists ------------------------------------------------------

LISTS = {
    23: [0, 3, -4],
    31: [-8, 2, 4],
    47: [0, -11, 9, 10, -3],
    59: [0, 17, 15, 28, -12, -11],
    71: [0, 24, 17, -31, -30, -23, -5],
}


def test_criterion_2_supersingular_lists():
    with criterion("2 supersingular lists and oracle p <= 300", 60.0) as notes:
        for p, js in LISTS.items():
            F = GF(p, 2)
            assert set(supersingular_j_invariants(p).j_values()) == {F(j) for j in js}, p
        count = 0
        for p in primerange(5, 301):
            p = int(p)
            table = supersingular_oracle_table(p)
            found = {(int(b), int(a)) for b, a in zip(*table.nonzero())}
            expected = {(j.b, j.a) for j in supersingular_j_invariants(p).j_values()}
            assert found == expected, f"oracle disagrees at p={p}"
            count += 1
        notes.append(f"({count} primes)")


# -- 3. mass formula -------------------------------------------------------------


def test_criterion_3_mass_formula():
    with criterion("3 mass formula 5 <= p < 1000", 60.0) as notes:
        count = 0
        for p in primerange(5, 1000):
            got = mass_check(supersingular_j_invariants(int(p)))
            assert got == Fraction(p - 1, 12), f"p={p}: {got}"
            count += 1
        notes.append(f"({count} primes)")


# -- 4. component group ---------------------------------------------------------


def test_criterion_4_phi_order():
    with criterion("4 Phi cyclic of order n for 23 <= p < 500", 60.0) as notes:
        count = 0
        for p in primerange(23, 500):
            p = int(p)
            model = build_x0p_model(p)
            phi = component_group(model.graph)
            n = cuspidal_order(p)
            assert phi.is_cyclic and phi.order == n, f"p={p}: {phi.invariant_factors}"
            assert spanning_tree_count(model.resolved) == n, f"p={p}: tree count"
            count += 1
        notes.append(f"({count} primes)")


# -- 5. Mazur order --------------------------------------------------------------


def test_criterion_5_mazur_order():
    with criterion("5 m(0 - inf) trivial iff n | m, 23 <= p < 200", 120.0) as notes:
        cases = 0
        for p in primerange(23, 200):
            p = int(p)
            model = build_x0p_model(p)
            n = model.n
            for m in range(1, 2 * n + 1):
                zero = is_trivial(model.graph, None, cusp_divisor(m, -m)) == Decision.ZERO
                assert zero == (m % n == 0), f"p={p} m={m}"
                cases += 1
        notes.append(f"({cases} cases)")


# -- 6. constancy and path independence -------------------------------------------


def test_criterion_6_alpha_constancy():
    with criterion("6 alpha constant in F_p^*, two bases agree, 23 <= p < 200", 60.0) as notes:
        count = 0
        for p in primerange(23, 200):
            p = int(p)
            locus = supersingular_j_invariants(p)
            thin = [pt.j for pt in locus if pt.e == 1]
            t1 = propagate_cx(p, base=thin[0], locus=locus)
            alpha = theorem76_alpha(t1)
            assert alpha and alpha.is_rational(), f"p={p}: alpha={alpha}"
            t2 = propagate_cx(p, base=thin[-1], locus=locus)
            assert scalar_between(t1, t2) is not None, f"p={p}: tables differ by more than a scalar"
            count += 1
        notes.append(f"({count} primes)")


# -- 7. sweep --------------------------------------------------------------------


def test_criterion_7_cuspidal_sweep():
    with criterion("7 cuspidal verdicts 23 <= p < 200", 120.0) as notes:
        by_cycle = []
        for p in primerange(23, 200):
            report = verify_theorem82(int(p))
            assert report.proved, f"p={p}: {report.verdicts}"
            if report.overall.value == "ProvedByCycleComputation":
                by_cycle.append(int(p))
        notes.append(f"(cycle computation at {by_cycle})")


# -- 8. graph property suites ------------------------------------------------------

N_GRAPHS = 500


def test_criterion_8a_phi_matches_tree_count(rng):
    with criterion("8a |Phi| = spanning-tree count"):
        for _ in range(N_GRAPHS):
            g = random_graph(rng)
            resolved, _ = resolve(g)
            assert component_group(g).order == spanning_tree_count(resolved)


def test_criterion_8b_properness_equivalence(rng):
    with criterion("8b properness iff factor injectivity"):
        for _ in range(N_GRAPHS):
            g = random_graph(rng)
            q = phi_quotient(g)
            br = bridge_oracle(g)
            factors = all(injectivity_of_factor(g, x.id, q) for x in g.edges if x.id not in br)
            assert properness_condition(g)[0] == factors


def test_criterion_8c_bridge_paths(rng):
    with criterion("8c trivial class implies bridge path") as notes:
        hits = 0
        for _ in range(N_GRAPHS):
            g = random_graph(rng)
            phi = component_group(g)
            br = bridge_oracle(g)
            for c1 in g.vertex_ids:
                for c2 in g.vertex_ids:
                    if c1 != c2 and not any(phi.project(vertex_difference(c1, c2))):
                        path = bridge_path(g, c1, c2)
                        assert path is not None and set(path) <= br
                        hits += 1
        notes.append(f"({hits} trivial pairs)")


def test_criterion_8d_index_relation(rng):
    with criterion("8d |Phi~| = |Phi| |Phi~/Phi|"):
        for _ in range(N_GRAPHS):
            g = random_graph(rng)
            assert component_group(g).order == original_vertex_subgroup_order(g) * phi_quotient(g).order


def test_criterion_8e_kernel_subgroup(rng):
    with criterion("8e divisor kernel closed under sums on X0(23)"):
        model = build_x0p_model(23)
        g = model.graph
        for _ in range(100):
            E1, E2 = random_x0p_divisor(model, rng), random_x0p_divisor(model, rng)
            Z1 = lcm(*(multiplicative_order(s) for s in cycle_scalars(g, E1))) * E1
            Z2 = lcm(*(multiplicative_order(s) for s in cycle_scalars(g, E2))) * E2
            assert is_trivial(g, None, Z1) == Decision.ZERO
            assert is_trivial(g, None, Z2) == Decision.ZERO
            assert is_trivial(g, None, Z1 + Z2) == Decision.ZERO
            assert is_trivial(g, None, Z1 - Z2) == Decision.ZERO


# -- 9. integer identity and irrational points ------------------------------------------


def test_criterion_9_identity_and_irrational_points():
    with criterion("9 integer identity and irrational supersingular j for 71 < p < 500"):
        assert 2**3 * 3**3 * 11**3 - 1728 == 2**3 * 3**6 * 7**2
        for p in primerange(72, 500):
            assert any(not pt.rational for pt in supersingular_j_invariants(int(p))), f"p={p}"
