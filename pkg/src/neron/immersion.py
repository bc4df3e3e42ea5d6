"""Where the Abel-Jacobi map extends to the Néron model, and when it is a closed immersion.

Everything here is a question about the dual graph:

* the map extends over exactly the disconnecting double points (bridges);
* it is injective on the special fibre iff every component that is a P^1
  (genus 0, no self-loop) meets a non-bridge edge;
* it is proper iff, for every prime q, each non-bridge x lies on a loop all
  of whose edges y have v_q(e(y)) >= v_q(e(x)).

The properness condition is also available in its group-theoretic form:
the factor Z/e(y) of (⊕ Z/e(x)) / d^* Z^{S0} injects for every non-bridge y.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from sympy import primefactors

from .compgroup import ComponentGroup, phi_quotient
from .dualgraph import DualGraph, bridges

__all__ = [
    "EdgeDiagnostic",
    "ImmersionReport",
    "extendable_locus",
    "injectivity_condition",
    "properness_condition",
    "lemma964_image",
    "injectivity_of_factor",
    "bridge_path",
    "closed_immersion",
]


def _valuation(n: int, q: int) -> int:
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k


def extendable_locus(g: DualGraph) -> set[str]:
    """Edge ids of the double points the map extends over: the bridges."""
    return bridges(g)


def _is_projective_line(g: DualGraph, vid: str) -> bool:
    if g.vertex(vid).genus != 0:
        return False
    return not any(x.is_loop for x in g.incident(vid))


def injectivity_condition(g: DualGraph) -> tuple[bool, str | None]:
    """(ok, counterexample): every P^1 component must meet a non-bridge edge."""
    br = bridges(g)
    for v in g.vertex_ids:
        if not _is_projective_line(g, v):
            continue
        if not any(x.id not in br for x in g.incident(v)):
            return False, v
    return True, None


def _loop_failures(g: DualGraph) -> dict[str, int]:
    """Non-bridge edge id -> least prime q at which it has no admissible loop."""
    br = bridges(g)
    primes = sorted({q for x in g.edges for q in primefactors(x.e)})
    out: dict[str, int] = {}
    for q in primes:
        vals = {x.id: _valuation(x.e, q) for x in g.edges}
        for k in sorted({v for v in vals.values() if v > 0}):
            sub = DualGraph(g.vertices, tuple(x for x in g.edges if vals[x.id] >= k), g.p)
            sub_br = bridges(sub)
            for x in g.edges:
                if x.id in br or x.is_loop or vals[x.id] != k or x.id in out:
                    continue
                if x.id in sub_br:
                    out[x.id] = q
    return out


def properness_condition(g: DualGraph) -> tuple[bool, tuple[str, int] | None]:
    """(ok, (edge id, prime)) for the loop-valuation condition on non-bridge edges."""
    failures = _loop_failures(g)
    for x in g.edges:
        if x.id in failures:
            return False, (x.id, failures[x.id])
    return True, None


def lemma964_image(g: DualGraph, y: str, i: int, quotient: ComponentGroup | None = None) -> tuple[int, ...]:
    """The class of i in the y-factor of (⊕_x Z/e(x)) / d^* Z^{S0}."""
    e = g.edge(y).e
    if not 1 <= i <= e:
        raise ValueError(f"position {i} outside 1..{e}")
    quotient = quotient or phi_quotient(g)
    return quotient.project({y: i})


def injectivity_of_factor(g: DualGraph, y: str, quotient: ComponentGroup | None = None) -> bool:
    """Whether Z/e(y) -> Phi~/Phi is injective, i.e. the image of 1 has order e(y)."""
    quotient = quotient or phi_quotient(g)
    return quotient.element_order(quotient.project({y: 1})) == g.edge(y).e


def bridge_path(g: DualGraph, c1: str, c2: str) -> list[str] | None:
    """Edge ids of a path from c1 to c2 using bridges only, or None."""
    br = bridges(g)
    prev: dict[str, tuple[str, str] | None] = {c1: None}
    queue = deque([c1])
    while queue:
        v = queue.popleft()
        if v == c2:
            path = []
            while prev[v] is not None:
                v, eid = prev[v]
                path.append(eid)
            return path[::-1]
        for x in g.incident(v):
            if x.id not in br:
                continue
            w = x.other(v)
            if w not in prev:
                prev[w] = (v, x.id)
                queue.append(w)
    return None


@dataclass(frozen=True)
class EdgeDiagnostic:
    edge: str
    e: int
    bridge: bool
    failing_prime: int | None = None
    factor_injective: bool | None = None

    def to_dict(self) -> dict:
        return {
            "edge": self.edge,
            "e": self.e,
            "bridge": self.bridge,
            "failing_prime": self.failing_prime,
            "factor_injective": self.factor_injective,
        }


@dataclass(frozen=True)
class ImmersionReport:
    injectivity_ok: bool
    properness_ok: bool
    regular_case: bool
    bridges: tuple[str, ...]
    injectivity_counterexample: str | None = None
    properness_counterexample: tuple[str, int] | None = None
    edges: tuple[EdgeDiagnostic, ...] = field(default_factory=tuple)

    @property
    def closed_immersion(self) -> bool:
        return self.injectivity_ok and self.properness_ok

    @property
    def smooth_locus_closed_immersion(self) -> bool | None:
        """For regular models: the map from the smooth locus is a closed immersion iff there are no bridges."""
        return not self.bridges if self.regular_case else None

    def to_dict(self) -> dict:
        return {
            "closed_immersion": self.closed_immersion,
            "injectivity_ok": self.injectivity_ok,
            "properness_ok": self.properness_ok,
            "regular_case": self.regular_case,
            "smooth_locus_closed_immersion": self.smooth_locus_closed_immersion,
            "bridges": list(self.bridges),
            "injectivity_counterexample": self.injectivity_counterexample,
            "properness_counterexample": list(self.properness_counterexample)
            if self.properness_counterexample
            else None,
            "edges": [d.to_dict() for d in self.edges],
        }


def closed_immersion(g: DualGraph) -> ImmersionReport:
    br = bridges(g)
    inj_ok, inj_cx = injectivity_condition(g)
    failures = _loop_failures(g)
    quotient = phi_quotient(g)
    diags = tuple(
        EdgeDiagnostic(
            x.id,
            x.e,
            x.id in br,
            failures.get(x.id),
            None if x.id in br else injectivity_of_factor(g, x.id, quotient),
        )
        for x in g.edges
    )
    prop_ok, prop_cx = properness_condition(g)
    return ImmersionReport(
        injectivity_ok=inj_ok,
        properness_ok=prop_ok,
        regular_case=all(x.e == 1 for x in g.edges),
        bridges=tuple(x.id for x in g.edges if x.id in br),
        injectivity_counterexample=inj_cx,
        properness_counterexample=prop_cx,
        edges=diags,
    )
