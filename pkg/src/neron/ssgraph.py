"""The supersingular locus in characteristic p.

Enumeration walks the 2-isogeny graph in Mestre's model: a supersingular j
has its neighbours j' = (v+16)^3/v where u runs over the roots of
(T+16)^3 - jT and uv = 2^12.  The walk starts at a known supersingular value
and the mass formula certifies that nothing was missed (the graph is
connected, but we do not rely on that).

Two point-counting oracles are provided for cross-checking: one per j, and a
batch version that decides every j in F_{p^2} at once via an FFT correlation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable

import numpy as np

from .ff import GF, FieldElement, find_roots, is_probable_prime

__all__ = [
    "SupersingularPoint",
    "SupersingularLocus",
    "thickness",
    "mestre_neighbours",
    "supersingular_j_invariants",
    "is_supersingular_oracle",
    "supersingular_oracle_table",
    "hasse_invariant_vanishes",
    "mass_check",
]

# Class-number-one discriminants D with their j-invariants, used to seed the
# walk when p = 1 mod 12: j(D) is supersingular iff p is inert in Q(sqrt D).
_CM_SEEDS = (
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-19, -884736),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
)


@dataclass(frozen=True)
class SupersingularPoint:
    j: FieldElement
    e: int
    rational: bool

    def __str__(self) -> str:
        return f"j={self.j} e={self.e} rational={str(self.rational).lower()}"


@dataclass(frozen=True)
class SupersingularLocus:
    p: int
    points: tuple[SupersingularPoint, ...]

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, j) -> bool:
        return self.point(j) is not None

    @property
    def field(self) -> GF:
        return GF(self.p, 2)

    def j_values(self) -> list[FieldElement]:
        return [pt.j for pt in self.points]

    def point(self, j) -> SupersingularPoint | None:
        j = self.field(j) if not isinstance(j, FieldElement) else self.field(j)
        for pt in self.points:
            if pt.j == j:
                return pt
        return None

    def e(self, j) -> int:
        pt = self.point(j)
        if pt is None:
            raise KeyError(f"{j} is not supersingular mod {self.p}")
        return pt.e

    def rational_points(self) -> list[SupersingularPoint]:
        return [pt for pt in self.points if pt.rational]


def thickness(j: FieldElement) -> int:
    """Half the number of automorphisms of a supersingular curve with invariant j."""
    p = j.field.p
    if j == 0 and p % 3 == 2:
        return 3
    if j == 1728 and p % 4 == 3:
        return 2
    return 1


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or p < 5 or not is_probable_prime(p):
        raise ValueError(f"expected a prime p >= 5, got {p!r}")


def mestre_neighbours(j: FieldElement) -> list[tuple[FieldElement, FieldElement, FieldElement]]:
    """Triples (u, v, j') over F_{p^2}, one per root u of (T+16)^3 - jT with multiplicity."""
    F = j.field
    coeffs = [F(4096), F(768) - j, F(48), F.one]
    out = []
    for u in find_roots(coeffs, F):
        v = F(4096) / u
        out.append((u, v, (v + 16) ** 3 / v))
    return out


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _weierstrass(j: int, p: int) -> tuple[int, int]:
    """(A, B) with y^2 = x^3 + Ax + B of invariant j, for j in F_p."""
    j %= p
    if j == 0:
        return 0, 1
    if j == 1728 % p:
        return 1, 0
    k = j * (1728 - j)
    return 3 * k % p, 2 * k * (1728 - j) % p


def hasse_invariant_vanishes(j: int, p: int) -> bool:
    """True iff the curve of invariant j in F_p is supersingular.

    Computes the coefficient of x^(p-1) in (x^3 + Ax + B)^((p-1)/2) with the
    power recurrence for polynomials, in O(p) operations.
    """
    A, B = _weierstrass(j, p)
    f = [B, A, 0, 1]
    n = (p - 1) // 2
    # g = f^n satisfies f g' = n f' g; solve for coefficients of g in turn
    target = p - 1
    if B == 0:
        # f = x (x^2 + A): the coefficient of x^(p-1) in x^n (x^2+A)^n
        k = target - n
        if k % 2:
            return True
        i = k // 2
        return comb(n, i) * pow(A, n - i, p) % p == 0
    g = [pow(B, n, p)] + [0] * target
    inv_b = pow(B, -1, p)
    inverses = [0] + [pow(k, -1, p) for k in range(1, target + 1)]
    for k in range(1, target + 1):
        acc = 0
        for i in range(1, 4):
            if k - i < 0 or not f[i]:
                continue
            acc += f[i] * g[k - i] * (n * i - (k - i))
        g[k] = acc * inv_b * inverses[k] % p
    return g[target] == 0


def _seed(p: int) -> int:
    if p % 4 == 3:
        return 1728 % p
    if p % 3 == 2:
        return 0
    for d, j in _CM_SEEDS:
        if _legendre(d, p) == -1:
            return j % p
    for j in range(p):
        if hasse_invariant_vanishes(j, p):
            return j
    raise AssertionError(f"no F_{p}-rational supersingular j found")


def supersingular_j_invariants(p: int) -> SupersingularLocus:
    """All supersingular j-invariants in F_{p^2}, rational ones first."""
    _check_prime(p)
    F = GF(p, 2)
    start = F(_seed(p))
    seen = {start}
    queue = deque([start])
    while queue:
        j = queue.popleft()
        for _, _, target in mestre_neighbours(j):
            if target not in seen:
                seen.add(target)
                queue.append(target)
    points = tuple(
        SupersingularPoint(j, thickness(j), j.is_rational())
        for j in sorted(seen, key=FieldElement.sort_key)
    )
    locus = SupersingularLocus(p, points)
    if mass_check(locus) != Fraction(p - 1, 12):
        raise RuntimeError(f"2-isogeny walk mod {p} missed supersingular points")
    return locus


def mass_check(locus: SupersingularLocus | Iterable[SupersingularPoint]) -> Fraction:
    """Sum of 1/e(x) over the locus, as an exact rational."""
    return sum((Fraction(1, pt.e) for pt in locus), Fraction(0))


# ---------------------------------------------------------------------------
# point-counting oracles
# ---------------------------------------------------------------------------


class _Fp2Arrays:
    """Vectorised F_{p^2} arithmetic on pairs of integer arrays."""

    def __init__(self, p: int):
        self.p = p
        self.r = GF(p, 2).r
        self.inv = np.array([0] + [pow(k, -1, p) for k in range(1, p)], dtype=np.int64)
        chi = np.ones(p, dtype=np.int64) * -1
        chi[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
        chi[0] = 0
        self.chi_table = chi

    def all_elements(self):
        p = self.p
        b, a = np.divmod(np.arange(p * p, dtype=np.int64), p)
        return a, b

    def mul(self, x, y):
        p, r = self.p, self.r
        a, b = x
        c, d = y
        return (a * c + r * (b * d % p)) % p, (a * d + b * c) % p

    def add(self, x, y):
        return (x[0] + y[0]) % self.p, (x[1] + y[1]) % self.p

    def inverse(self, x):
        a, b = x
        p = self.p
        n_inv = self.inv[(a * a - self.r * (b * b % p)) % p]
        return a * n_inv % p, -b * n_inv % p

    def chi(self, x):
        a, b = x
        p = self.p
        return self.chi_table[(a * a - self.r * (b * b % p)) % p]


def is_supersingular_oracle(j, p: int) -> bool:
    """Decide supersingularity by counting points over F_{p^2}.

    Uses y^2 = x^3 + 3j(1728-j)x + 2j(1728-j)^2, with y^2 = x^3 + 1 at j = 0
    and y^2 = x^3 + x at j = 1728.  With S the character sum of the right-hand
    side, #E = p^2 + 1 + S, so E is supersingular iff p divides S.
    """
    _check_prime(p)
    F = GF(p, 2)
    j = F(j) if not isinstance(j, FieldElement) else F(j)
    if j == 0:
        A, B = F(0), F(1)
    elif j == 1728:
        A, B = F(1), F(0)
    else:
        k = j * (1728 - j)
        A, B = 3 * k, 2 * k * (1728 - j)
    ar = _Fp2Arrays(p)
    x = ar.all_elements()
    x3 = ar.mul(ar.mul(x, x), x)
    ax = ar.mul((np.full_like(x[0], A.a), np.full_like(x[0], A.b)), x)
    rhs = ar.add(ar.add(x3, ax), (B.a, B.b))
    s = int(ar.chi(rhs).sum())
    return s % p == 0


def supersingular_oracle_table(p: int) -> np.ndarray:
    """Boolean array over all j = a + b t in F_{p^2}, indexed [b, a].

    Every j outside {0, 1728} is a twist of y^2 = x^3 + cx + c with
    c = 27j / (4(1728 - j)).  Writing x^3 + c(x+1) = (x+1)(w + c) with
    w = x^3/(x+1), the character sum becomes a correlation of the fibre weights
    of w against the quadratic character, computed once for all c by FFT.
    """
    _check_prime(p)
    F = GF(p, 2)
    ar = _Fp2Arrays(p)
    a, b = ar.all_elements()
    x1 = ((a + 1) % p, b)
    ok = (x1[0] != 0) | (x1[1] != 0)
    xs = (a[ok], b[ok])
    x1 = (x1[0][ok], x1[1][ok])
    w = ar.mul(ar.mul(ar.mul(xs, xs), xs), ar.inverse(x1))
    weights = np.zeros((p, p), dtype=np.float64)
    np.add.at(weights, (w[1], w[0]), ar.chi(x1).astype(np.float64))
    chi_grid = ar.chi((a, b)).reshape(p, p).astype(np.float64)
    corr = np.fft.ifft2(np.conj(np.fft.fft2(weights)) * np.fft.fft2(chi_grid)).real
    # S(c) = chi(-1) + sum_w G(w) chi(w + c); -1 is a square in F_{p^2}
    sums = np.rint(corr).astype(np.int64) + 1

    # translate c back to j: j = 1728 * 4c / (4c + 27)
    four_c = ((4 * a) % p, (4 * b) % p)
    denom = ((four_c[0] + 27) % p, four_c[1])
    valid = ((a != 0) | (b != 0)) & ((denom[0] != 0) | (denom[1] != 0))
    num = ((1728 * four_c[0]) % p, (1728 * four_c[1]) % p)
    jv = ar.mul((num[0][valid], num[1][valid]), ar.inverse((denom[0][valid], denom[1][valid])))
    table = np.zeros((p, p), dtype=bool)
    table[jv[1], jv[0]] = (sums.reshape(-1)[valid] % p) == 0
    for special in (F(0), F(1728)):
        table[special.b, special.a] = is_supersingular_oracle(special, p)
    return table
