"""Exact arithmetic in F_p and F_{p^2}, plus root finding for small polynomials.

F_{p^2} is modelled as F_p[t]/(t^2 - r) where r is the least positive
quadratic non-residue mod p.  Elements are immutable; equality is structural.
"""

from __future__ import annotations

import re
from itertools import count
from typing import Iterator, Sequence, Union

from sympy import isprime

__all__ = [
    "GF",
    "FieldElement",
    "FieldMismatch",
    "find_roots",
    "frobenius",
    "poly_eval",
    "is_probable_prime",
]


class FieldMismatch(ValueError):
    """Raised when operands live in different ambient fields."""


def is_probable_prime(n: int) -> bool:
    """Deterministic primality test (exact for every n < 2**64)."""
    return bool(isprime(n))


def _least_nonresidue(p: int) -> int:
    for r in count(2):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise AssertionError("unreachable")


class GF:
    """The field F_p (degree 1) or F_{p^2} (degree 2).

    Instances are cached, so ``GF(31, 2) is GF(31, 2)``.
    """

    _cache: dict[tuple[int, int], "GF"] = {}

    def __new__(cls, p: int, degree: int = 1) -> "GF":
        key = (p, degree)
        if key in cls._cache:
            return cls._cache[key]
        if degree not in (1, 2):
            raise ValueError(f"only F_p and F_p^2 are supported, got degree {degree}")
        if p < 3 or not is_probable_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        self = super().__new__(cls)
        self.p = p
        self.degree = degree
        self.r = _least_nonresidue(p) if degree == 2 else 0
        self.order = p**degree
        cls._cache[key] = self
        return self

    def __getnewargs__(self):
        return (self.p, self.degree)

    def __repr__(self) -> str:
        return f"GF({self.p})" if self.degree == 1 else f"GF({self.p}^2)"

    def __call__(self, a: Union[int, "FieldElement"] = 0, b: int = 0) -> "FieldElement":
        if isinstance(a, FieldElement):
            if a.field is self:
                return a
            if a.field.p != self.p:
                raise FieldMismatch(f"cannot coerce {a!r} into {self!r}")
            if self.degree == 1 and a.b:
                raise FieldMismatch(f"{a} is not F_{self.p}-rational")
            return FieldElement(self, a.a, a.b if self.degree == 2 else 0)
        if self.degree == 1 and b % self.p:
            raise ValueError("F_p elements have no t-component")
        return FieldElement(self, a % self.p, b % self.p if self.degree == 2 else 0)

    @property
    def zero(self) -> "FieldElement":
        return self(0)

    @property
    def one(self) -> "FieldElement":
        return self(1)

    @property
    def gen(self) -> "FieldElement":
        """The element t (only for F_{p^2})."""
        if self.degree != 2:
            raise ValueError("F_p has no generator t")
        return self(0, 1)

    def __iter__(self) -> Iterator["FieldElement"]:
        p = self.p
        if self.degree == 1:
            for a in range(p):
                yield FieldElement(self, a, 0)
        else:
            for b in range(p):
                for a in range(p):
                    yield FieldElement(self, a, b)

    def __len__(self) -> int:
        return self.order

    def parse(self, text: str) -> "FieldElement":
        """Inverse of ``str(element)``: accepts ``"a"`` or ``"a+b*t"``.

        Non-canonical integers such as ``"-8"`` are reduced mod p.
        """
        s = text.replace(" ", "")
        m = _RATIONAL_RE.fullmatch(s)
        if m is not None:
            return self(int(s))
        m = _ELEMENT_RE.fullmatch(s)
        if m is None:
            raise ValueError(f"cannot parse {text!r} as a field element")
        if self.degree != 2:
            raise ValueError(f"{text!r} is not an element of F_{self.p}")
        a, b = m.group("a"), m.group("b")
        if b in ("", "+", "-"):
            b += "1"
        return self(int(a) if a else 0, int(b))


_RATIONAL_RE = re.compile(r"[+-]?\d+")
_ELEMENT_RE = re.compile(r"(?:(?P<a>[+-]?\d+)(?=[+-]))?(?P<b>[+-]?\d*)\*?t")


class FieldElement:
    __slots__ = ("field", "a", "b")

    def __init__(self, field: GF, a: int, b: int = 0):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def __reduce__(self):
        return (FieldElement, (self.field, self.a, self.b))

    # -- coercion -------------------------------------------------------

    def _other(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return FieldElement(self.field, (self.a + o.a) % p, (self.b + o.b) % p)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, -self.a % p, -self.b % p)

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return FieldElement(self.field, (self.a - o.a) % p, (self.b - o.b) % p)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        f = self.field
        p = f.p
        if f.degree == 1:
            return FieldElement(f, self.a * o.a % p, 0)
        a, b, c, d = self.a, self.b, o.a, o.b
        return FieldElement(f, (a * c + f.r * b * d) % p, (a * d + b * c) % p)

    __rmul__ = __mul__

    def norm(self) -> int:
        """N(x) = x^(p+1), as a residue in [0, p)."""
        f = self.field
        return (self.a * self.a - f.r * self.b * self.b) % f.p

    def inverse(self) -> "FieldElement":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        f = self.field
        p = f.p
        n_inv = pow(self.norm(), -1, p)
        return FieldElement(f, self.a * n_inv % p, -self.b * n_inv % p)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self
        if n < 0:
            base, n = self.inverse(), -n
        result = self.field.one
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def frobenius(self) -> "FieldElement":
        # t^p = r^((p-1)/2) t = -t
        return FieldElement(self.field, self.a, -self.b % self.field.p)

    # -- predicates -----------------------------------------------------

    def is_rational(self) -> bool:
        """True iff the element lies in F_p."""
        return self.b == 0

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field is other.field and self.a == other.a and self.b == other.b
        if isinstance(other, int):
            return self.b == 0 and self.a == other % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.degree, self.a, self.b))

    def sort_key(self) -> tuple[int, int]:
        """F_p-rational elements first (ascending), then by (a, b)."""
        return (self.b != 0, self.a, self.b)

    def __int__(self) -> int:
        if self.b:
            raise ValueError(f"{self} is not F_p-rational")
        return self.a

    def signed(self) -> int:
        """Representative in (-p/2, p/2] of an F_p-rational element."""
        v = int(self)
        p = self.field.p
        return v - p if v > p // 2 else v

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*t"

    def __repr__(self) -> str:
        return f"{self.field!r}({self})"


def frobenius(x: FieldElement) -> FieldElement:
    return x.frobenius()


# ---------------------------------------------------------------------------
# polynomials: coefficient lists, lowest degree first
# ---------------------------------------------------------------------------


def poly_eval(coeffs: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    """Horner evaluation; ``coeffs[i]`` is the coefficient of T**i."""
    acc = x.field.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class _RawPolys:
    """Polynomial arithmetic over F_p or F_{p^2} on raw (a, b) pairs.

    Root finding is on the hot path of the supersingular walk, so it avoids
    allocating FieldElement objects.
    """

    def __init__(self, field: GF):
        self.field = field
        self.p = field.p
        self.r = field.r
        self.zero = (0, 0)
        self.one = (1, 0)

    def mul(self, x, y):
        p = self.p
        a, b = x
        c, d = y
        return ((a * c + self.r * b * d) % p, (a * d + b * c) % p)

    def sub(self, x, y):
        p = self.p
        return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)

    def inv(self, x):
        p = self.p
        a, b = x
        n = pow((a * a - self.r * b * b) % p, -1, p)
        return (a * n % p, -b * n % p)

    @staticmethod
    def trim(f):
        while f and f[-1] == (0, 0):
            f.pop()
        return f

    def pmul(self, f, g):
        if not f or not g:
            return []
        p, r = self.p, self.r
        out_a = [0] * (len(f) + len(g) - 1)
        out_b = [0] * (len(f) + len(g) - 1)
        for i, (a, b) in enumerate(f):
            if not (a or b):
                continue
            for j, (c, d) in enumerate(g):
                out_a[i + j] += a * c + r * b * d
                out_b[i + j] += a * d + b * c
        return self.trim([(x % p, y % p) for x, y in zip(out_a, out_b)])

    def divmod(self, f, g):
        r = list(f)
        inv_lead = self.inv(g[-1])
        dg = len(g) - 1
        q = [self.zero] * max(len(r) - dg, 0)
        while r and len(r) - 1 >= dg:
            shift = len(r) - 1 - dg
            coef = self.mul(r[-1], inv_lead)
            q[shift] = coef
            for i, c in enumerate(g):
                r[i + shift] = self.sub(r[i + shift], self.mul(coef, c))
            self.trim(r)
        return self.trim(q), r

    def monic(self, f):
        inv = self.inv(f[-1])
        return [self.mul(c, inv) for c in f]

    def gcd(self, f, g):
        while g:
            f, g = g, self.divmod(f, g)[1]
        return self.monic(f) if f else f

    def powmod(self, base, n, mod):
        result = [self.one]
        base = self.divmod(base, mod)[1]
        while n:
            if n & 1:
                result = self.divmod(self.pmul(result, base), mod)[1]
            base = self.divmod(self.pmul(base, base), mod)[1]
            n >>= 1
        return result

    def minus_t(self, f):
        """f - T."""
        f = list(f) + [self.zero] * max(0, 2 - len(f))
        f[1] = self.sub(f[1], self.one)
        return self.trim(f)

    def split_linear(self, g):
        """Roots of a monic squarefree product of distinct linear factors."""
        if len(g) == 1:
            return []
        if len(g) == 2:
            return [self.sub(self.zero, g[0])]
        p = self.p
        half = (self.field.order - 1) // 2
        for shift in count():
            # shifts must leave F_p: every element of F_p is a square in F_{p^2}
            a = (shift % p, 1 + shift // p) if self.field.degree == 2 else (shift % p, 0)
            h = self.powmod([a, self.one], half, g)
            h = list(h) + [self.zero] * max(0, 1 - len(h))
            h[0] = self.sub(h[0], self.one)
            d = self.gcd(g, self.trim(h))
            if 1 < len(d) < len(g):
                rest, _ = self.divmod(g, d)
                return self.split_linear(d) + self.split_linear(self.monic(rest))
        raise AssertionError("unreachable")


def find_roots(
    coeffs: Sequence[Union[FieldElement, int]],
    field: GF,
    method: str = "split",
) -> list[FieldElement]:
    """All roots in ``field`` of the polynomial, listed with multiplicity.

    ``coeffs[i]`` is the coefficient of T**i.  ``method="scan"`` evaluates the
    polynomial at every field element (fine for small fields);
    ``"split"`` takes the gcd with T^q - T and splits it by equal-degree
    factorisation.  Roots are returned sorted by :meth:`FieldElement.sort_key`.
    """
    elems = [field(c) for c in coeffs]
    while elems and not elems[-1]:
        elems.pop()
    if not elems:
        raise ValueError("the zero polynomial has every element as a root")
    R = _RawPolys(field)
    f = [(c.a, c.b) for c in elems]
    if method == "scan":
        distinct = [(x.a, x.b) for x in field if not poly_eval(elems, x)]
    elif method == "split":
        if len(f) == 1:
            return []
        fm = R.monic(f)
        xq = R.powmod([R.zero, R.one], field.order, fm)
        g = R.gcd(fm, R.minus_t(xq))
        distinct = R.split_linear(g) if g else []
    else:
        raise ValueError(f"unknown method {method!r}")
    roots = []
    for x in distinct:
        g = f
        while True:
            q, rem = R.divmod(g, [R.sub(R.zero, x), R.one])
            if rem:
                break
            roots.append(FieldElement(field, *x))
            g = q
    return sorted(roots, key=FieldElement.sort_key)
