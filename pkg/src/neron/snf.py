"""Smith normal form over Z with transforms, integer solving, and an exact determinant.

Matrices are lists of rows of Python ints.  The elimination works on sparse
rows and always pivots on an entry of least absolute value, which keeps the
chains of a resolved dual graph (all unit entries) cheap to clear.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = ["SmithForm", "smith_normal_form", "solve_integer", "bareiss_det", "matmul", "matvec"]

Matrix = list[list[int]]


@dataclass(frozen=True)
class SmithForm:
    """U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... | d_r."""

    U: Matrix
    V: Matrix
    diagonal: tuple[int, ...]  # the nonzero d_i, in order
    shape: tuple[int, int]

    @property
    def rank(self) -> int:
        return len(self.diagonal)

    def D(self) -> Matrix:
        m, n = self.shape
        out = [[0] * n for _ in range(m)]
        for i, d in enumerate(self.diagonal):
            out[i][i] = d
        return out

    def torsion(self) -> list[tuple[int, int]]:
        """(row index, d) for every d > 1: the cyclic factors of the torsion of coker A."""
        return [(i, d) for i, d in enumerate(self.diagonal) if d > 1]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Matrix, x: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithForm:
    m = len(A)
    n = len(A[0]) if m else 0
    rows: list[dict[int, int]] = [{j: v for j, v in enumerate(r) if v} for r in A]
    cols: list[set[int]] = [set() for _ in range(n)]
    for i, r in enumerate(rows):
        for j in r:
            cols[j].add(i)
    U = _identity(m)
    # V is kept transposed so that column operations are row operations
    Vt = _identity(n)

    def row_axpy(k: int, i: int, q: int) -> None:
        """row_k -= q * row_i (in the working matrix and in U)."""
        rk, ri = rows[k], rows[i]
        for j, v in ri.items():
            w = rk.get(j, 0) - q * v
            if w:
                if j not in rk:
                    cols[j].add(k)
                rk[j] = w
            elif j in rk:
                del rk[j]
                cols[j].discard(k)
        Uk, Ui = U[k], U[i]
        for c in range(m):
            if Ui[c]:
                Uk[c] -= q * Ui[c]

    def col_axpy(l: int, j: int, q: int) -> None:
        """col_l -= q * col_j (in the working matrix and in V)."""
        for i in list(cols[j]):
            r = rows[i]
            w = r.get(l, 0) - q * r[j]
            if w:
                if l not in r:
                    cols[l].add(i)
                r[l] = w
            elif l in r:
                del r[l]
                cols[l].discard(i)
        Vl, Vj = Vt[l], Vt[j]
        for c in range(n):
            if Vj[c]:
                Vl[c] -= q * Vj[c]

    active_rows = set(range(m))
    active_cols = set(range(n))
    pivots: list[tuple[int, int]] = []
    diag: list[int] = []

    def best_pivot() -> tuple[int, int] | None:
        best = None
        for i in sorted(active_rows):
            r = rows[i]
            for j, v in r.items():
                key = (abs(v), len(r) + len(cols[j]), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
            if best is not None and best[0][0] == 1 and best[0][1] <= 2:
                break
        return None if best is None else (best[1], best[2])

    while True:
        pv = best_pivot()
        if pv is None:
            break
        i, j = pv
        while True:
            moved = False
            p = rows[i][j]
            for k in sorted(cols[j] - {i}):
                q = rows[k][j] // p
                row_axpy(k, i, q)
                if rows[k].get(j):
                    # remainder smaller than the pivot: swap roles
                    i, moved = k, True
                    break
            if moved:
                continue
            p = rows[i][j]
            for l in sorted(set(rows[i]) - {j}):
                q = rows[i][l] // p
                col_axpy(l, j, q)
                if rows[i].get(l):
                    j, moved = l, True
                    break
            if not moved:
                break
        pivots.append((i, j))
        diag.append(rows[i].pop(j))
        cols[j].discard(i)
        active_rows.discard(i)
        active_cols.discard(j)

    row_order = [i for i, _ in pivots] + sorted(active_rows)
    col_order = [j for _, j in pivots] + sorted(active_cols)
    U = [U[i] for i in row_order]
    Vt = [Vt[j] for j in col_order]

    for k, d in enumerate(diag):
        if d < 0:
            diag[k] = -d
            U[k] = [-x for x in U[k]]

    # enforce divisibility d_k | d_l by the gcd/lcm exchange
    r = len(diag)
    for k in range(r):
        for l in range(k + 1, r):
            a, b = diag[k], diag[l]
            if b % a == 0:
                continue
            g, s, t = _xgcd(a, b)
            alpha, beta = a // g, b // g
            Uk, Ul = U[k], U[l]
            U[k] = [s * x + t * y for x, y in zip(Uk, Ul)]
            U[l] = [-beta * x + alpha * y for x, y in zip(Uk, Ul)]
            Vk, Vl = Vt[k], Vt[l]
            Vt[k] = [x + y for x, y in zip(Vk, Vl)]
            Vt[l] = [-t * beta * x + s * alpha * y for x, y in zip(Vk, Vl)]
            diag[k], diag[l] = g, a * b // g

    V = [list(col) for col in zip(*Vt)] if n else []
    return SmithForm(U=U, V=V, diagonal=tuple(diag), shape=(m, n))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with g = gcd(a, b) = s a + t b and g > 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int], snf: SmithForm | None = None) -> list[int] | None:
    """Some integer x with A x = b, or None if no integer solution exists."""
    snf = snf or smith_normal_form(A)
    m, n = snf.shape
    c = matvec(snf.U, b)
    y = [0] * n
    for i in range(m):
        if i < snf.rank:
            q, rem = divmod(c[i], snf.diagonal[i])
            if rem:
                return None
            y[i] = q
        elif c[i]:
            return None
    return matvec(snf.V, y)


def bareiss_det(A: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free elimination."""
    M = [list(r) for r in A]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]
