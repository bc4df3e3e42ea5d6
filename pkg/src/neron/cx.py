"""Glueing invariants c(x) at the supersingular points of X0(p), up to a common scalar.

An entry delta at x means c(x) = delta * dj ⊗ dj, where the two dj are taken
relative to the parameters j - j(x) on X_inf and j - j(x)^p on X_0.  Values
are propagated along the Hecke correspondence T_2 in Mestre's model
uv = 2^12, s^*j = (u+16)^3/u, t^*j = (v+16)^3/v.

Two transport conventions are offered.  ``"derived"`` follows the pullback
rule c(y) -> c(x)^n on both branches of y, including the change of variable
dv = -(v/u) du on each branch; it is the default, and the tables it produces
satisfy the global constancy test and the cuspidal-order test.  ``"printed"``
reproduces the closed formulas usually quoted for this computation: for
e(x) = e(x') = 1 the ratio of derivatives raised to p+1, otherwise the
factor (-alpha u/v) raised to e(x')/e(y) only once.  It differs from
``"derived"`` by inverting the ratio in the first case.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import lcm
from typing import Mapping

from .ff import GF, FieldElement, find_roots
from .ssgraph import SupersingularLocus, supersingular_j_invariants

__all__ = [
    "CONVENTIONS",
    "T2Neighbor",
    "CxTable",
    "TransportError",
    "t2_neighbors",
    "transport_cx",
    "propagate_cx",
    "theorem76_ratios",
    "theorem76_alpha",
    "scalar_between",
]

CONVENTIONS = ("derived", "printed")


class TransportError(ValueError):
    pass


@dataclass(frozen=True)
class T2Neighbor:
    """A point y of X0(2) over j_source, with u(y) v(y) = 2^12.

    ``mult_u`` and ``mult_v`` are the multiplicities of u as a root of
    (T+16)^3 - j_source T and of v as a root of (T+16)^3 - j_target T.
    """

    u: FieldElement
    v: FieldElement
    j_source: FieldElement
    j_target: FieldElement
    mult_u: int = 1
    mult_v: int = 1


def _mestre_cubic(j: FieldElement) -> list[FieldElement]:
    F = j.field
    return [F(4096), F(768) - j, F(48), F.one]


def _divide_out(coeffs: list[FieldElement], root: FieldElement) -> tuple[list[FieldElement], bool]:
    """Synthetic division by (T - root); returns quotient and whether it was exact."""
    out = []
    acc = root.field.zero
    for c in reversed(coeffs):
        acc = acc * root + c
        out.append(acc)
    remainder = out.pop()
    return list(reversed(out)), not remainder


def _multiplicity(coeffs: list[FieldElement], root: FieldElement) -> int:
    m = 0
    while True:
        q, exact = _divide_out(coeffs, root)
        if not exact:
            return m
        coeffs, m = q, m + 1


def _leading_coefficient(j: FieldElement, w: FieldElement, order: int) -> FieldElement:
    """Coefficient of (T - w)^order in (T+16)^3/T - j at T = w."""
    coeffs = _mestre_cubic(j)
    for _ in range(order):
        coeffs, exact = _divide_out(coeffs, w)
        if not exact:
            raise TransportError(f"(T+16)^3 - {j} T does not vanish to order {order} at {w}")
    value = sum((c * w**i for i, c in enumerate(coeffs)), j.field.zero)
    if not value:
        raise TransportError(f"vanishing leading coefficient at {w}")
    return value / w


def t2_neighbors(j, p: int, locus: SupersingularLocus | None = None) -> list[T2Neighbor]:
    """One neighbour per root u of (T+16)^3 - jT in F_{p^2}, with multiplicity."""
    F = GF(p, 2)
    j = F(j)
    locus = locus or supersingular_j_invariants(p)
    if j not in locus:
        raise ValueError(f"{j} is not supersingular mod {p}")
    cubic = _mestre_cubic(j)
    roots = find_roots(cubic, F)
    out = []
    for u in roots:
        v = F(4096) / u
        jt = (v + 16) ** 3 / v
        out.append(T2Neighbor(u, v, j, jt, roots.count(u), _multiplicity(_mestre_cubic(jt), v)))
    return out


def transport_cx(
    source: tuple[FieldElement, FieldElement, int],
    neighbor: T2Neighbor,
    e_target: int,
    e_y: int,
    convention: str = "derived",
    details: dict | None = None,
) -> FieldElement:
    """The coefficient at t(y) given the coefficient delta at s(y).

    ``source`` is (j, delta, e_source).  With n = e_source/e_y and
    n' = e_target/e_y, the leading coefficients beta, gamma of s^*(j - j(x))
    and t^*(j - j(x')) at y determine alpha via delta = alpha^n beta^-(p+1).
    If ``details`` is a dict it receives beta, alpha, gamma.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    j, delta, e_source = source
    F = j.field
    delta = F(delta)
    if not delta:
        raise TransportError("source coefficient is zero")
    if e_source % e_y or e_target % e_y:
        raise TransportError(f"e(y) = {e_y} must divide {e_source} and {e_target}")
    n, n2 = e_source // e_y, e_target // e_y
    p1 = F.p + 1
    u, v = neighbor.u, neighbor.v
    beta = _leading_coefficient(j, u, n)
    gamma = _leading_coefficient(neighbor.j_target, v, n2)
    if n != 1:
        raise TransportError("transport is only defined from a simple root u (alpha is an n-th root)")
    alpha = delta * beta**p1
    if details is not None:
        details.update(beta=beta, alpha=alpha, gamma=gamma, n=n, n_target=n2)
    if convention == "derived":
        return alpha**n2 * gamma ** (-p1) * (-u / v) ** (p1 * n2)
    if e_source == 1 and e_target == 1:
        ratio = (neighbor.j_target - 3 * (v + 16) ** 2) / (3 * (u + 16) ** 2 - j)
        return ratio**p1 * delta
    return (-alpha * u / v) ** n2 * gamma ** (-p1)


@dataclass(frozen=True)
class CxTable:
    p: int
    entries: Mapping[FieldElement, FieldElement]
    base_point: FieldElement
    locus: SupersingularLocus = field(repr=False)
    convention: str = "derived"

    def __getitem__(self, j) -> FieldElement:
        return self.entries[GF(self.p, 2)(j)]

    def e(self, j) -> int:
        return self.locus.e(j)

    def items(self):
        return [(pt.j, self.entries[pt.j]) for pt in self.locus]

    def rescaled(self, lam) -> "CxTable":
        """Multiply every entry by lam^e(x), as a change of uniformiser does."""
        F = GF(self.p, 2)
        lam = F(lam)
        new = {j: d * lam ** self.e(j) for j, d in self.entries.items()}
        return CxTable(self.p, new, self.base_point, self.locus, self.convention)


def propagate_cx(
    p: int,
    base=None,
    convention: str = "derived",
    locus: SupersingularLocus | None = None,
) -> CxTable:
    """Breadth-first transport from ``base`` (entry 1) along T_2.

    Only points with e = 1 act as sources, so every transport uses a simple
    root u.  A point reached twice must receive the same value.
    """
    if p < 23:
        raise ValueError("the glueing table is only computed for p >= 23")
    locus = locus or supersingular_j_invariants(p)
    F = GF(p, 2)
    if base is None:
        candidates = [pt.j for pt in locus if pt.rational and pt.e == 1]
        if not candidates:
            raise ValueError(f"no F_{p}-rational supersingular point with e = 1")
        base = candidates[0]
    base = F(base)
    if base not in locus or locus.e(base) != 1:
        raise ValueError(f"base point {base} must be supersingular with e = 1")
    entries: dict[FieldElement, FieldElement] = {base: F.one}
    queue = deque([base])
    while queue:
        j = queue.popleft()
        for nb in t2_neighbors(j, p, locus):
            e_t = locus.e(nb.j_target)
            value = transport_cx((j, entries[j], 1), nb, e_t, 1, convention)
            known = entries.get(nb.j_target)
            if known is None:
                entries[nb.j_target] = value
                if e_t == 1:
                    queue.append(nb.j_target)
            elif known != value:
                raise TransportError(
                    f"p={p}: two transports to {nb.j_target} disagree ({known} vs {value})"
                )
    missing = [pt.j for pt in locus if pt.j not in entries]
    if missing:
        raise TransportError(f"p={p}: points not reached from {base}: {', '.join(map(str, missing))}")
    return CxTable(p, entries, base, locus, convention)


def theorem76_ratios(table: CxTable) -> dict[FieldElement, FieldElement]:
    """c(x)^(e/e(x)) / prod_{y != x} (j(y) - j(x))^((p+1) e/e(y)) for each x."""
    p = table.p
    pts = list(table.locus)
    e = lcm(*(pt.e for pt in pts))
    out = {}
    for x in pts:
        num = table.entries[x.j] ** (e // x.e)
        den = x.j.field.one
        for y in pts:
            if y.j != x.j:
                den = den * (y.j - x.j) ** ((p + 1) * e // y.e)
        out[x.j] = num / den
    return out


def theorem76_alpha(table: CxTable) -> FieldElement:
    """The common value of the ratios; raises if they differ or leave F_p."""
    ratios = theorem76_ratios(table)
    values = set(ratios.values())
    if len(values) != 1:
        raise TransportError(
            f"p={table.p}: ratios are not constant: "
            + ", ".join(f"{j}->{r}" for j, r in ratios.items())
        )
    alpha = values.pop()
    if not alpha.is_rational() or not alpha:
        raise TransportError(f"p={table.p}: common ratio {alpha} is not in F_p^*")
    return alpha


def scalar_between(t1: CxTable, t2: CxTable) -> FieldElement | None:
    """mu with t2[x] = mu^e(x) t1[x] for every x, or None if there is none."""
    F = GF(t1.p, 2)
    mu = None
    for pt in t1.locus:
        if pt.e == 1:
            mu = t2.entries[pt.j] / t1.entries[pt.j]
            break
    if mu is None:
        return None
    for pt in t1.locus:
        if t2.entries[pt.j] != mu**pt.e * t1.entries[pt.j]:
            return None
    return F(mu)
