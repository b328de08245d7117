"""Computable Euclidean domains.

Two instances are provided: the integers (elements are plain Python ``int``)
and univariate polynomials over a prime field (elements are :class:`Poly`).
Linear algebra code only relies on ``+``, ``-``, ``*``, truthiness for the
zero test, and the ring object for everything else.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache
from typing import Any, Iterator

from .errors import SchemaError


class EuclideanRing:
    """Interface shared by the ring instances."""

    tag: str
    zero: Any
    one: Any

    def degree(self, a) -> int:
        raise NotImplementedError

    def divmod(self, a, b):
        raise NotImplementedError

    def normalize(self, a):
        """Return ``(canonical_associate, unit)`` with ``a == unit * canonical``."""
        raise NotImplementedError

    def unit_inverse(self, u):
        raise NotImplementedError

    def from_int(self, k: int):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    def is_field(self) -> bool:
        return False

    # -- derived helpers -------------------------------------------------

    def is_unit(self, a) -> bool:
        return bool(a) and self.degree(a) == 0

    def divides(self, a, b) -> bool:
        """Whether ``a | b``."""
        if not a:
            return not b
        return not self.divmod(b, a)[1]

    def exact_div(self, a, b):
        q, r = self.divmod(a, b)
        if r:
            raise ArithmeticError(f"{self.format(b)} does not divide {self.format(a)}")
        return q

    def canonical(self, a):
        return self.normalize(a)[0]

    def gcd(self, a, b):
        while b:
            a, b = b, self.divmod(a, b)[1]
        return self.canonical(a)

    def lcm(self, a, b):
        if not a or not b:
            return self.zero
        return self.canonical(self.exact_div(a * b, self.gcd(a, b)))

    def gcdex(self, a, b):
        """Return ``(g, s, t)`` with ``s*a + t*b == g`` and ``g`` canonical."""
        x, nx = self.one, self.zero
        y, ny = self.zero, self.one
        g, ng = a, b
        while ng:
            q, r = self.divmod(g, ng)
            g, ng = ng, r
            x, nx = nx, x - q * nx
            y, ny = ny, y - q * ny
        g_can, u = self.normalize(g)
        if not g:
            return self.zero, self.zero, self.zero
        ui = self.unit_inverse(u)
        return g_can, x * ui, y * ui

    def power(self, a, k: int):
        out = self.one
        for _ in range(k):
            out = out * a
        return out

    def size(self, a) -> int:
        """Magnitude used for growth profiles."""
        return self.degree(a)

    def length_bound(self, d) -> int:
        """Upper bound on the composition length of ``R/dR`` (``d`` nonzero)."""
        raise NotImplementedError

    def divisors(self, a) -> list:
        """Canonical divisors of a nonzero element, in a deterministic order."""
        raise NotImplementedError

    def prime_factors(self, a) -> list:
        """Distinct canonical prime divisors of a nonzero element."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<ring {self.tag}>"


class Integers(EuclideanRing):
    tag = "Z"
    zero = 0
    one = 1
    symbol = "Z"

    def degree(self, a: int) -> int:
        return abs(a) - 1 if a else -1

    def size(self, a: int) -> int:
        return abs(a)

    def divmod(self, a: int, b: int):
        return divmod(a, b)

    def normalize(self, a: int):
        return (-a, -1) if a < 0 else (a, 1)

    def unit_inverse(self, u: int) -> int:
        if u not in (1, -1):
            raise ArithmeticError(f"{u} is not a unit")
        return u

    def from_int(self, k: int) -> int:
        return int(k)

    def parse(self, text) -> int:
        if isinstance(text, bool):
            raise SchemaError(f"not an integer: {text!r}")
        if isinstance(text, int):
            return text
        if isinstance(text, str) and re.fullmatch(r"\s*[+-]?\d+\s*", text):
            return int(text)
        raise SchemaError(f"not a decimal integer string: {text!r}")

    def format(self, a: int) -> str:
        return str(a)

    def gcd(self, a: int, b: int) -> int:
        return math.gcd(a, b)

    def length_bound(self, d: int) -> int:
        return abs(d).bit_length() - 1

    def divisors(self, a: int) -> list[int]:
        a = abs(a)
        small = [k for k in range(1, int(a**0.5) + 1) if a % k == 0]
        return sorted(set(small + [a // k for k in small]))

    def prime_factors(self, a: int) -> list[int]:
        a = abs(a)
        out = []
        p = 2
        while p * p <= a:
            if a % p == 0:
                out.append(p)
                while a % p == 0:
                    a //= p
            p += 1
        if a > 1:
            out.append(a)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Integers)

    def __hash__(self) -> int:
        return hash("Z")


class Poly:
    """Immutable polynomial over GF(p); ``coeffs`` are low-to-high, no trailing zeros."""

    __slots__ = ("p", "coeffs", "_hash")

    def __init__(self, p: int, coeffs):
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.p = p
        self.coeffs = tuple(cs)
        self._hash = hash((p, self.coeffs))

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == Poly(self.p, [other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ArithmeticError("characteristic mismatch")
            return other
        if isinstance(other, int):
            return Poly(self.p, [other])
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(self.p, [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.p, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(self.p, [])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(self.p, out)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Poly({self.p}, {list(self.coeffs)})"


class PolyGF(EuclideanRing):
    """The ring GF(p)[x]."""

    def __init__(self, p: int):
        if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.tag = f"GF({p})[x]"
        self.symbol = f"GF({p})[x]"
        self.zero = Poly(p, [])
        self.one = Poly(p, [1])
        self.x = Poly(p, [0, 1])

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyGF) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def degree(self, a: Poly) -> int:
        return a.deg

    def divmod(self, a: Poly, b: Poly):
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(a.coeffs)
        bc = b.coeffs
        inv = pow(bc[-1], p - 2, p)
        q = [0] * max(len(r) - len(bc) + 1, 0)
        for k in range(len(r) - len(bc), -1, -1):
            c = r[k + len(bc) - 1] * inv % p
            q[k] = c
            if c:
                for j, y in enumerate(bc):
                    r[k + j] = (r[k + j] - c * y) % p
        return Poly(p, q), Poly(p, r)

    def normalize(self, a: Poly):
        if not a:
            return a, self.one
        lead = a.coeffs[-1]
        inv = pow(lead, self.p - 2, self.p)
        return Poly(self.p, [c * inv for c in a.coeffs]), Poly(self.p, [lead])

    def unit_inverse(self, u: Poly) -> Poly:
        if u.deg != 0:
            raise ArithmeticError(f"{self.format(u)} is not a unit")
        return Poly(self.p, [pow(u.coeffs[0], self.p - 2, self.p)])

    def from_int(self, k: int) -> Poly:
        return Poly(self.p, [k])

    def from_coeffs(self, coeffs) -> Poly:
        return Poly(self.p, coeffs)

    def parse(self, text) -> Poly:
        if isinstance(text, bool):
            raise SchemaError(f"not a polynomial: {text!r}")
        if isinstance(text, int):
            return self.from_int(text)
        if not isinstance(text, str):
            raise SchemaError(f"not a polynomial string: {text!r}")
        s = text.replace(" ", "")
        if not s:
            raise SchemaError("empty polynomial string")
        if s[0] not in "+-":
            s = "+" + s
        terms = re.findall(r"[+-][^+-]+", s)
        if "".join(terms) != s:
            raise SchemaError(f"cannot parse polynomial {text!r}")
        coeffs: dict[int, int] = {}
        for term in terms:
            m = re.fullmatch(r"([+-])(\d+)?(\*?x(\^(\d+))?)?", term)
            if not m or (m.group(2) is None and m.group(3) is None):
                raise SchemaError(f"cannot parse polynomial term {term!r} in {text!r}")
            sign = -1 if m.group(1) == "-" else 1
            c = int(m.group(2)) if m.group(2) is not None else 1
            if m.group(3) is None:
                e = 0
            else:
                e = int(m.group(5)) if m.group(5) is not None else 1
            coeffs[e] = coeffs.get(e, 0) + sign * c
        n = max(coeffs) + 1
        return Poly(self.p, [coeffs.get(i, 0) for i in range(n)])

    def format(self, a: Poly) -> str:
        if not a:
            return "0"
        parts = []
        for e in range(a.deg, -1, -1):
            c = a.coeffs[e]
            if not c:
                continue
            if e == 0:
                parts.append(str(c))
            else:
                mon = "x" if e == 1 else f"x^{e}"
                parts.append(mon if c == 1 else f"{c}*{mon}")
        return " + ".join(parts)

    def length_bound(self, d: Poly) -> int:
        return d.deg

    def monic_of_degree(self, n: int) -> Iterator[Poly]:
        p = self.p
        for k in range(p**n):
            cs = []
            for _ in range(n):
                cs.append(k % p)
                k //= p
            yield Poly(p, cs + [1])

    def divisors(self, a: Poly) -> list[Poly]:
        out = []
        for n in range(a.deg + 1):
            for m in self.monic_of_degree(n):
                if self.divides(m, a):
                    out.append(m)
        return out

    def prime_factors(self, a: Poly) -> list[Poly]:
        a = self.canonical(a)
        out = []
        n = 1
        while 2 * n <= a.deg:
            for m in self.monic_of_degree(n):
                if self.divides(m, a):
                    out.append(m)
                    while self.divides(m, a):
                        a = self.exact_div(a, m)
            n += 1
        if a.deg >= 1:
            out.append(a)
        return out


INTEGERS = Integers()


@lru_cache(maxsize=None)
def ring_from_tag(tag: str) -> EuclideanRing:
    """Resolve ``"Z"`` or ``"GF(p)[x]"``."""
    if tag == "Z":
        return INTEGERS
    m = re.fullmatch(r"\s*GF\((\d+)\)\[x\]\s*", tag or "")
    if m:
        try:
            return PolyGF(int(m.group(1)))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    raise SchemaError(f"unknown ring tag {tag!r} (expected 'Z' or 'GF(p)[x]')")
