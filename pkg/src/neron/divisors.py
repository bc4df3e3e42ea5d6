"""Deciding whether a degree-zero divisor on the special fibre is trivial in J_k.

Works for dual graphs whose components are all rational curves with a
chosen coordinate.  The test has three stages:

1. the multidegree of E must be that of a Cartier vertical divisor a;
2. on each component C the divisor E|_C - sum_x (a(C'_x) - a(C))/e(x) x must
   be principal (automatic on P^1 once its degree is 0), giving f_C;
3. around every cycle C_0, x_0, C_1, ..., C_m = C_0 the product of
   f_{C_i}(x_i') f_{C_{i+1}}(x_i'')^-1 c(x_i)^((a(C_{i+1}) - a(C_i))/e(x_i))
   of leading coefficients must be 1.

Leading terms at the point INF of a line use the coordinate 1/j.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .compgroup import multidegree_of, vertical_divisor_for
from .dualgraph import INF, Coordinate, Cycle, DualGraph, cycle_basis
from .ff import GF, FieldElement

__all__ = [
    "Decision",
    "DivisorSpec",
    "RationalFunctionOnLine",
    "LeadingTerm",
    "DivisorReport",
    "required_divisor",
    "leading_term",
    "cycle_product",
    "analyse_divisor",
    "is_trivial",
    "load_divisor",
]


class Decision(str, enum.Enum):
    ZERO = "Zero"
    NONZERO_COMPONENT_CLASS = "NonzeroComponentClass"
    NONZERO_CYCLE_OBSTRUCTION = "NonzeroCycleObstruction"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DivisorSpec:
    """A formal sum of (vertex, point, multiplicity) with points off the double points."""

    terms: tuple[tuple[str, Coordinate, int], ...] = ()

    @classmethod
    def of(cls, *terms: tuple[str, Coordinate, int]) -> "DivisorSpec":
        return cls(tuple(terms)).normalized()

    def normalized(self) -> "DivisorSpec":
        acc: dict[tuple[str, Any], int] = {}
        order: list[tuple[str, Any]] = []
        for v, pt, m in self.terms:
            key = (v, pt)
            if key not in acc:
                order.append(key)
                acc[key] = 0
            acc[key] += m
        return DivisorSpec(tuple((v, pt, acc[(v, pt)]) for v, pt in order if acc[(v, pt)]))

    def __add__(self, other: "DivisorSpec") -> "DivisorSpec":
        return DivisorSpec(self.terms + other.terms).normalized()

    def __neg__(self) -> "DivisorSpec":
        return DivisorSpec(tuple((v, pt, -m) for v, pt, m in self.terms))

    def __sub__(self, other: "DivisorSpec") -> "DivisorSpec":
        return self + (-other)

    def __rmul__(self, k: int) -> "DivisorSpec":
        return DivisorSpec(tuple((v, pt, k * m) for v, pt, m in self.terms)).normalized()

    @property
    def degree(self) -> int:
        return sum(m for _, _, m in self.terms)

    def restrict(self, vertex: str) -> dict[Coordinate, int]:
        out: dict[Coordinate, int] = {}
        for v, pt, m in self.terms:
            if v == vertex:
                out[pt] = out.get(pt, 0) + m
        return {pt: m for pt, m in out.items() if m}

    def multidegree(self, g: DualGraph) -> dict[str, int]:
        deg = {v: 0 for v in g.vertex_ids}
        for v, _, m in self.terms:
            if v not in deg:
                raise KeyError(f"unknown vertex {v!r}")
            deg[v] += m
        return deg

    def check_support(self, g: DualGraph) -> None:
        """Points must avoid the branch coordinates of double points on their component."""
        for v, pt, _ in self.terms:
            for x in g.incident(v):
                sides = []
                if x.tail == v:
                    sides.append(x.tail_coord)
                if x.head == v:
                    sides.append(x.head_coord)
                if pt in sides:
                    raise ValueError(f"point {pt} on {v} is the double point {x.id}")

    def to_dict(self) -> dict[str, Any]:
        return {"terms": [{"vertex": v, "point": str(pt), "mult": m} for v, pt, m in self.terms]}


def _parse_point(s: str, F: GF | None) -> Coordinate:
    if str(s).strip().lower() in ("inf", "infinity", "∞"):
        return INF
    if F is None:
        raise ValueError("finite points need the prime 'p'")
    return F.parse(str(s))


def load_divisor(source: str | Path | Mapping[str, Any], p: int | None = None) -> DivisorSpec:
    data = json.loads(Path(source).read_text()) if not isinstance(source, Mapping) else source
    p = data.get("p", p)
    F = GF(p, 2) if p else None
    return DivisorSpec(
        tuple((str(t["vertex"]), _parse_point(t["point"], F), int(t["mult"])) for t in data["terms"])
    ).normalized()


@dataclass(frozen=True)
class LeadingTerm:
    coeff: FieldElement
    order: int


@dataclass(frozen=True)
class RationalFunctionOnLine:
    """lambda * prod (j - r_i)^(m_i) over finite r_i; the order at INF is -sum m_i."""

    scalar: FieldElement
    zeros_poles: tuple[tuple[FieldElement, int], ...] = ()

    @classmethod
    def from_divisor(cls, div: Mapping[Coordinate, int], field: GF, scalar=1) -> "RationalFunctionOnLine":
        total = sum(div.values())
        if total:
            raise ValueError(f"divisor of degree {total} is not principal on a line")
        finite = tuple(sorted(((r, m) for r, m in div.items() if r is not INF and m), key=lambda t: t[0].sort_key()))
        return cls(field(scalar), finite)

    def divisor(self) -> dict[Coordinate, int]:
        out: dict[Coordinate, int] = {r: m for r, m in self.zeros_poles}
        inf = -sum(m for _, m in self.zeros_poles)
        if inf:
            out[INF] = inf
        return out

    def order_at(self, x: Coordinate) -> int:
        if x is INF:
            return -sum(m for _, m in self.zeros_poles)
        return sum(m for r, m in self.zeros_poles if r == x)

    def __call__(self, x: FieldElement) -> FieldElement:
        val = self.scalar
        for r, m in self.zeros_poles:
            val = val * (x - r) ** m
        return val


def leading_term(f: RationalFunctionOnLine, x: Coordinate) -> LeadingTerm:
    if x is INF:
        return LeadingTerm(f.scalar, f.order_at(INF))
    coeff = f.scalar
    for r, m in f.zeros_poles:
        if r != x:
            coeff = coeff * (x - r) ** m
    return LeadingTerm(coeff, f.order_at(x))


def required_divisor(g: DualGraph, a: Mapping[str, int], E: DivisorSpec, C: str) -> dict[Coordinate, int]:
    """E|_C minus the double points on C weighted by (a(C') - a(C))/e(x)."""
    if multidegree_of(g, a) != E.multidegree(g):
        raise ValueError("vertical divisor and E have different multidegrees")
    div = E.restrict(C)
    for x in g.edges:
        if x.is_loop or C not in (x.tail, x.head):
            continue
        if not x.has_branch:
            raise ValueError(f"edge {x.id} has no branch coordinates")
        here = x.tail_coord if x.tail == C else x.head_coord
        k = (a.get(x.other(C), 0) - a.get(C, 0)) // x.e
        div[here] = div.get(here, 0) - k
    div = {pt: m for pt, m in div.items() if m}
    assert sum(div.values()) == 0, "required divisor has nonzero degree"
    return div


def _edge_c(g: DualGraph, cx: Mapping[str, FieldElement] | None, eid: str) -> FieldElement:
    if cx is not None and eid in cx:
        return cx[eid]
    c = g.edge(eid).c
    if c is None:
        raise ValueError(f"edge {eid} carries no glueing scalar")
    return c


def cycle_product(
    g: DualGraph,
    cx: Mapping[str, FieldElement] | None,
    a: Mapping[str, int],
    functions: Mapping[str, RationalFunctionOnLine],
    cycle: Cycle,
    factors: list | None = None,
) -> FieldElement:
    """Product of the per-edge compatibility factors around ``cycle``.

    ``cx`` maps edge ids to glueing scalars (relative to the edge's tail and
    head coordinates); edges missing from it use their own ``c``.  If
    ``factors`` is a list, the per-edge factors are appended to it.
    """
    F = g.field
    total = F.one
    for c_here, eid, sign, c_next in cycle.steps:
        x = g.edge(eid)
        x1, x2 = (x.tail_coord, x.head_coord) if sign > 0 else (x.head_coord, x.tail_coord)
        diff = a.get(c_next, 0) - a.get(c_here, 0)
        if diff % x.e:
            raise ValueError(f"non-integral exponent at {eid}")
        k = diff // x.e
        t1 = leading_term(functions[c_here], x1)
        t2 = leading_term(functions[c_next], x2)
        if t1.order != -k or t2.order != k:
            raise ValueError(f"tensor orders do not cancel at {eid}: {t1.order}, {t2.order}, {k}")
        factor = t1.coeff / t2.coeff * _edge_c(g, cx, eid) ** k
        if factors is not None:
            factors.append((eid, factor))
        total = total * factor
    return total


@dataclass
class DivisorReport:
    decision: Decision
    multidegree: dict[str, int]
    a: dict[str, int] | None = None
    functions: dict[str, RationalFunctionOnLine] = field(default_factory=dict)
    cycle: Cycle | None = None
    scalar: FieldElement | None = None


def analyse_divisor(
    g: DualGraph,
    E: DivisorSpec,
    cx: Mapping[str, FieldElement] | None = None,
    cycles: Iterable[Cycle] | None = None,
) -> DivisorReport:
    if E.degree != 0:
        raise ValueError(f"divisor has degree {E.degree}, expected 0")
    for v in g.vertices:
        if v.genus != 0:
            raise NotImplementedError(f"component {v.id} has genus {v.genus}; only rational components are supported")
    E.check_support(g)
    mdeg = E.multidegree(g)
    a = vertical_divisor_for(g, mdeg)
    if a is None:
        return DivisorReport(Decision.NONZERO_COMPONENT_CLASS, mdeg)
    F = g.field
    functions = {C: RationalFunctionOnLine.from_divisor(required_divisor(g, a, E, C), F) for C in g.vertex_ids}
    for cyc in cycle_basis(g) if cycles is None else cycles:
        value = cycle_product(g, cx, a, functions, cyc)
        if value != 1:
            return DivisorReport(Decision.NONZERO_CYCLE_OBSTRUCTION, mdeg, a, functions, cyc, value)
    return DivisorReport(Decision.ZERO, mdeg, a, functions)


def is_trivial(
    g: DualGraph,
    cx: Mapping[str, FieldElement] | None,
    E: DivisorSpec,
) -> Decision:
    return analyse_divisor(g, E, cx).decision
