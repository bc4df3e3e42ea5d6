"""The special fibre of X0(p) at p and the cuspidal-intersection check.

X0(p) mod p is two copies of the j-line, X_inf (carrying the cusp inf) and
X_0 (carrying the cusp 0), crossing at the supersingular points.  The edge
for j has thickness e(j), branch coordinates j on X_inf and j^p on X_0, and
glueing scalar taken from the propagated c-table.  Resolving the thick
edges adds F (at 1728, p = 3 mod 4) and G, H (at 0, p = 2 mod 3), with G
next to X_inf.

The check asks whether any smooth point of the special fibre outside the
cusps maps into the cuspidal subgroup under P -> class(P - inf).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .compgroup import ComponentGroup, component_group, vertex_difference
from .cx import CxTable, propagate_cx
from .divisors import DivisorSpec, analyse_divisor, cycle_product
from .dualgraph import INF, Cycle, DualGraph, Edge, Vertex, resolve, validate
from .ff import GF, FieldElement
from .ssgraph import SupersingularLocus, supersingular_j_invariants

__all__ = [
    "X_INF",
    "X_ZERO",
    "Verdict",
    "X0pModel",
    "Theorem82Report",
    "build_x0p_model",
    "component_images",
    "cuspidal_order",
    "cusp_divisor",
    "verify_theorem82",
    "f_check",
]

X_INF = "X_inf"
X_ZERO = "X_0"


class Verdict(str, enum.Enum):
    PROVED = "Proved"
    PROVED_BY_CYCLE = "ProvedByCycleComputation"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


def cuspidal_order(p: int) -> int:
    """n = numerator((p - 1)/12)."""
    return Fraction(p - 1, 12).numerator


def edge_id(j: FieldElement) -> str:
    return f"x_{j}"


@dataclass
class X0pModel:
    p: int
    locus: SupersingularLocus
    graph: DualGraph
    resolved: DualGraph
    n: int
    phi: ComponentGroup
    cx: CxTable

    def edge_for(self, j) -> Edge:
        return self.graph.edge(edge_id(GF(self.p, 2)(j)))

    @property
    def components(self) -> list[str]:
        return self.resolved.vertex_ids


def _chain_names(locus: SupersingularLocus) -> dict[str, str]:
    F = locus.field
    names = {}
    for pt in locus:
        if pt.e == 2 and pt.j == F(1728):
            names[f"{edge_id(pt.j)}#1"] = "F"
        if pt.e == 3 and pt.j == F(0):
            names[f"{edge_id(pt.j)}#1"] = "G"
            names[f"{edge_id(pt.j)}#2"] = "H"
    return names


def build_x0p_model(p: int, convention: str = "derived", base=None) -> X0pModel:
    if p < 23:
        raise ValueError("X0(p) has genus < 2 for p < 23")
    locus = supersingular_j_invariants(p)
    table = propagate_cx(p, base=base, convention=convention, locus=locus)
    vertices = (Vertex(X_INF, 0, "X_inf"), Vertex(X_ZERO, 0, "X_0"))
    edges = tuple(
        Edge(edge_id(pt.j), X_INF, X_ZERO, pt.e, pt.j, pt.j.frobenius(), table[pt.j]) for pt in locus
    )
    graph = validate(DualGraph(vertices, edges, p))
    resolved, _ = resolve(graph, rename=_chain_names(locus))
    phi = component_group(resolved)
    n = cuspidal_order(p)
    if phi.invariant_factors != ((n,) if n > 1 else ()):
        raise AssertionError(f"p={p}: component group {phi.invariant_factors}, expected Z/{n}")
    return X0pModel(p, locus, graph, resolved, n, phi, table)


def component_images(model: X0pModel) -> dict[str, int]:
    """k with class(C - X_inf) = k * class(X_0 - X_inf), for each resolved component."""
    phi = model.phi
    gen = phi.project(vertex_difference(X_ZERO, X_INF))
    out = {}
    for C in model.resolved.vertex_ids:
        k = phi.solve(gen, phi.project(vertex_difference(C, X_INF)))
        if k is None:
            raise AssertionError(f"{C} does not map into the cuspidal subgroup")
        out[C] = k
    return out


def cusp_divisor(m_zero: int, m_inf: int) -> DivisorSpec:
    """m_zero * (cusp 0) + m_inf * (cusp inf); both cusps sit at j = INF."""
    return DivisorSpec.of((X_ZERO, INF, m_zero), (X_INF, INF, m_inf))


# ---------------------------------------------------------------------------


@dataclass
class FCheck:
    verdict: Verdict
    m: int
    pair: tuple[FieldElement, FieldElement] | None = None
    a: dict[str, int] | None = None
    factors: list[tuple[str, FieldElement]] = field(default_factory=list)
    product: FieldElement | None = None
    f_inf: Any = None
    f_zero: Any = None
    note: str = ""


def _f_graph(model: X0pModel) -> DualGraph:
    """The model blown up at 1728 only (the F component)."""
    F = GF(model.p, 2)
    if model.locus.e(1728) != 2:
        return model.graph
    g, _ = resolve(model.graph, only=[edge_id(F(1728))], rename=_chain_names(model.locus))
    return g


def _f_divisor(p: int, m: int) -> DivisorSpec:
    F = GF(p, 2)
    return DivisorSpec.of((X_ZERO, INF, m), (X_INF, INF, -(m - 1)), ("F", F(1), -1))


def _f_cycle(g: DualGraph, E: DivisorSpec, report, ja, jb) -> tuple[list, FieldElement, Cycle]:
    cycle = Cycle.from_walk(g, X_INF, [edge_id(ja), edge_id(jb)])
    factors: list = []
    product = cycle_product(g, None, report.a, report.functions, cycle, factors)
    return factors, product, cycle


def f_check(model: X0pModel, pair=None) -> FCheck:
    """The cycle computation ruling out points of F mapping into the cuspidal group.

    Any such P has class(P - inf) = m * class(0 - inf) with 2m = 1 mod n, so
    E = m*0 - (m-1)*inf - P would be trivial.  Stage (i) succeeds by
    construction; the verdict rests on a cycle (X_inf, x_a, X_0, x_b, X_inf)
    through two F_p-rational supersingular points other than 1728.  With no
    ``pair`` given, pairs are tried in order until one gives a product != 1.
    """
    p, n = model.p, model.n
    F = GF(p, 2)
    m = pow(2, -1, n)
    g = _f_graph(model)
    E = _f_divisor(p, m)
    report = analyse_divisor(g, E, cycles=[])
    if report.a is None:
        raise AssertionError(f"p={p}: stage (i) failed for the F-divisor")
    if pair is not None:
        pairs = [(F(pair[0]), F(pair[1]))]
    else:
        rational = [pt.j for pt in model.locus if pt.rational and pt.j != F(1728)]
        pairs = [(a, b) for i, a in enumerate(rational) for b in rational[i + 1 :]]
        if not pairs:
            return FCheck(Verdict.INCONCLUSIVE, m, a=report.a, note="fewer than two rational points besides 1728")
    for ja, jb in pairs:
        factors, product, _ = _f_cycle(g, E, report, ja, jb)
        if product != 1:
            break
    verdict = Verdict.PROVED_BY_CYCLE if product != 1 else Verdict.INCONCLUSIVE
    return FCheck(
        verdict,
        m,
        (ja, jb),
        report.a,
        factors,
        product,
        report.functions[X_INF],
        report.functions[X_ZERO],
        note=f"{len(pairs)} pair(s) available",
    )


@dataclass
class Theorem82Report:
    p: int
    verdicts: dict[str, Verdict]
    witnesses: dict[str, Any]
    convention: str = "derived"

    @property
    def overall(self) -> Verdict:
        if any(v == Verdict.INCONCLUSIVE for v in self.verdicts.values()):
            return Verdict.INCONCLUSIVE
        if any(v == Verdict.PROVED_BY_CYCLE for v in self.verdicts.values()):
            return Verdict.PROVED_BY_CYCLE
        return Verdict.PROVED

    @property
    def proved(self) -> bool:
        return self.overall != Verdict.INCONCLUSIVE


def verify_theorem82(p: int, convention: str = "derived", pair=None, base=None) -> Theorem82Report:
    """Per-component verdicts that only the cusps map into the cuspidal subgroup."""
    model = build_x0p_model(p, convention, base)
    F = GF(p, 2)
    pts = model.locus
    verdicts: dict[str, Verdict] = {}
    wit: dict[str, Any] = {"n": model.n, "images": component_images(model)}

    two = len(pts) >= 2
    verdicts[X_INF] = verdicts[X_ZERO] = Verdict.PROVED if two else Verdict.INCONCLUSIVE
    wit["supersingular_count"] = len(pts)

    if p % 3 == 2:
        nonzero = [pt.j for pt in pts if pt.j != 0]
        powers = {j ** (p - 2) for j in nonzero}
        ok = len(powers) >= 2
        verdicts["G"] = verdicts["H"] = Verdict.PROVED if ok else Verdict.INCONCLUSIVE
        wit["GH_distinct_powers"] = len(powers)

    if p % 4 == 3:
        rational = any(pt.rational and pt.j != F(1728) for pt in pts)
        irrational = any(not pt.rational for pt in pts)
        if rational and irrational:
            verdicts["F"] = Verdict.PROVED
            wit["F"] = "rational and non-rational supersingular points both exist"
        else:
            chk = f_check(model, pair)
            verdicts["F"] = chk.verdict
            wit["F"] = chk
    return Theorem82Report(p, verdicts, wit, convention)
