"""Component groups of Néron models of jacobians, from the dual graph.

For a dual graph G with thicknesses, the component group is the torsion of
the cokernel of the Laplacian of the resolved graph (all thicknesses 1).
Vertical divisors a in Z^{S0} are Cartier when a(C) = a(C') mod e(x) at
every double point x joining C and C', and then have multidegree

    deg_C(a) = sum over edge ends at C of (a(C') - a(C)) / e(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd, lcm, prod
from typing import Iterable, Mapping, Sequence

from .dualgraph import DualGraph, resolve
from .snf import SmithForm, smith_normal_form, solve_integer

__all__ = [
    "ComponentGroup",
    "NotLocallyPrincipal",
    "is_locally_principal",
    "multidegree_of",
    "component_group",
    "class_of_multidegree",
    "phi_quotient",
    "vertical_divisor_for",
    "vertex_difference",
    "original_vertex_subgroup_order",
]


class NotLocallyPrincipal(ValueError):
    pass


def is_locally_principal(g: DualGraph, a: Mapping[str, int]) -> bool:
    """a(tail) = a(head) mod e(x) for every edge x (loops impose nothing)."""
    return all((a.get(x.head, 0) - a.get(x.tail, 0)) % x.e == 0 for x in g.edges if not x.is_loop)


def multidegree_of(g: DualGraph, a: Mapping[str, int]) -> dict[str, int]:
    if not is_locally_principal(g, a):
        raise NotLocallyPrincipal("vertical divisor is not Cartier")
    deg = {v.id: 0 for v in g.vertices}
    for x in g.edges:
        if x.is_loop:
            continue
        k = (a.get(x.head, 0) - a.get(x.tail, 0)) // x.e
        deg[x.tail] += k
        deg[x.head] -= k
    return deg


def vertex_difference(c1: str, c2: str) -> dict[str, int]:
    """The multidegree of C1 - C2 as a formal difference of components."""
    out = {c1: 1}
    out[c2] = out.get(c2, 0) - 1
    return out


@dataclass(frozen=True)
class ComponentGroup:
    """A finite abelian group ⊕ Z/d_i with a projection from labelled integer vectors.

    ``labels`` index the source lattice; ``rows`` are the rows of U used for
    the projection, one per invariant factor.
    """

    invariant_factors: tuple[int, ...]
    labels: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]
    graph: DualGraph | None = None
    provenance: Mapping[str, tuple[str, int]] | None = None

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) <= 1

    @property
    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.invariant_factors)

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {lab: k for k, lab in enumerate(self.labels)}

    def vector(self, m: Mapping[str, int]) -> list[int]:
        vec = [0] * len(self.labels)
        for lab, v in m.items():
            if lab not in self._label_index:
                raise KeyError(f"unknown label {lab!r}")
            vec[self._label_index[lab]] += v
        return vec

    def project(self, m: Mapping[str, int] | Sequence[int]) -> tuple[int, ...]:
        vec = self.vector(m) if isinstance(m, Mapping) else list(m)
        return tuple(sum(u * v for u, v in zip(row, vec)) % d for row, d in zip(self.rows, self.invariant_factors))

    def add(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def scale(self, k: int, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(k * a % d for a, d in zip(x, self.invariant_factors))

    def element_order(self, x: Sequence[int]) -> int:
        return lcm(1, *(d // gcd(a, d) for a, d in zip(x, self.invariant_factors)))

    def solve(self, target: Sequence[int], given: Sequence[int]) -> int | None:
        """Least k >= 0 with k * target = given, or None."""
        n = self.element_order(target)
        for k in range(n):
            if self.scale(k, target) == tuple(given):
                return k
        return None

    def subgroup_order(self, gens: Iterable[Sequence[int]]) -> int:
        """Order of the subgroup generated by ``gens``."""
        gens = [list(x) for x in gens]
        r = len(self.invariant_factors)
        if r == 0:
            return 1
        # quotient (⊕ Z/d_i) / <gens> is the cokernel of [gens | diag(d)]
        cols = gens + [[d if i == k else 0 for i in range(r)] for k, d in enumerate(self.invariant_factors)]
        M = [[c[i] for c in cols] for i in range(r)]
        quotient = prod(smith_normal_form(M).diagonal)
        return self.order // quotient


def _group_from_snf(snf: SmithForm, labels, graph=None, provenance=None) -> ComponentGroup:
    tors = snf.torsion()
    return ComponentGroup(
        invariant_factors=tuple(d for _, d in tors),
        labels=tuple(labels),
        rows=tuple(tuple(snf.U[i]) for i, _ in tors),
        graph=graph,
        provenance=provenance,
    )


def component_group(g: DualGraph) -> ComponentGroup:
    """The component group, as the torsion of coker of the resolved Laplacian.

    Projections accept multidegrees on the resolved graph; the original
    vertices keep their ids there, so a multidegree on ``g`` projects as is.
    """
    res, prov = resolve(g)
    snf = smith_normal_form(res.laplacian())
    return _group_from_snf(snf, res.vertex_ids, res, prov)


def class_of_multidegree(phi: ComponentGroup, m: Mapping[str, int]) -> tuple[int, ...]:
    if sum(m.values()) != 0:
        raise ValueError("multidegree has nonzero total degree")
    return phi.project(m)


def phi_quotient(g: DualGraph) -> ComponentGroup:
    """(⊕_x Z/e(x)) modulo the image of d^*, with labels the edge ids."""
    cob = g.coboundary()
    M = [row + [x.e if k == i else 0 for k, x in enumerate(g.edges)] for i, row in enumerate(cob)]
    snf = smith_normal_form(M)
    return _group_from_snf(snf, g.edge_ids, g)


def original_vertex_subgroup_order(g: DualGraph, phi: ComponentGroup | None = None) -> int:
    """Order of the image of Z^{S0}[+] (differences of the original components) in the resolved group."""
    phi = phi or component_group(g)
    ids = g.vertex_ids
    return phi.subgroup_order(phi.project(vertex_difference(c, ids[0])) for c in ids[1:])


def vertical_divisor_for(g: DualGraph, multidegree: Mapping[str, int]) -> dict[str, int] | None:
    """A Cartier vertical divisor a with the given multidegree, or None.

    Solves d^* a = diag(e) k and -d_* k = multidegree over the integers with
    unknowns a (per vertex) and k (per non-loop edge), then normalises so that
    a vanishes on the first vertex.
    """
    verts = g.vertex_ids
    nonloop = [x for x in g.edges if not x.is_loop]
    nv, ne = len(verts), len(nonloop)
    rows = []
    rhs = []
    for k, x in enumerate(nonloop):
        row = [0] * (nv + ne)
        row[g.vindex(x.head)] += 1
        row[g.vindex(x.tail)] -= 1
        row[nv + k] = -x.e
        rows.append(row)
        rhs.append(0)
    for c in verts:
        row = [0] * (nv + ne)
        for k, x in enumerate(nonloop):
            if x.tail == c:
                row[nv + k] += 1
            if x.head == c:
                row[nv + k] -= 1
        rows.append(row)
        rhs.append(multidegree.get(c, 0))
    sol = solve_integer(rows, rhs)
    if sol is None:
        return None
    base = sol[0]
    a = {c: sol[i] - base for i, c in enumerate(verts)}
    assert multidegree_of(g, a) == {c: multidegree.get(c, 0) for c in verts}
    return a

