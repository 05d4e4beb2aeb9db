"""Exact arithmetic in three discrete valuation rings.

* ``p-local-int``: the integers localized at ``p``; elements are ``Fraction``
  instances whose denominator is prime to ``p``; uniformizer ``p``.
* ``t-local-poly``: ``F_p[t]`` localized at ``(t)``; elements are reduced
  rational functions ``f/g`` with ``g(0) = 1``; uniformizer ``t``.
* ``ramified-quadratic``: ``Z_(p)[pi]`` with ``pi^2 = c*p`` for a unit ``c``;
  elements ``a + b*pi`` with ``a, b`` p-local rationals; ramification index 2.

Every ring exposes the same small interface (``zero``, ``one``, ``pi``,
``valuation``, ``unit_inverse``, ``div``, ``residue``, ``parse``, ``format``)
and its elements support ``+``, ``-``, ``*`` and ``==`` directly, so matrix
code is written once for all kinds.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import DvrError, InputError, NotAUnitError

INF = math.inf

KINDS = ("p-local-int", "t-local-poly", "ramified-quadratic")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp_int(n: int, p: int) -> float:
    """p-adic valuation of an integer (``inf`` for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_frac(x: Fraction, p: int) -> float:
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


@dataclass(frozen=True)
class RingSpec:
    kind: str
    p: int
    unit_multiplier: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DvrError(f"unknown ring kind {self.kind!r}")
        if not is_prime(self.p):
            raise DvrError(f"p = {self.p} is not prime")
        c = Fraction(self.unit_multiplier)
        object.__setattr__(self, "unit_multiplier", c)
        if self.kind == "ramified-quadratic" and vp_frac(c, self.p) != 0:
            raise DvrError("unit multiplier must be a p-adic unit")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "p": self.p}
        if self.kind == "ramified-quadratic":
            d["unit_multiplier"] = str(self.unit_multiplier)
        return d


# ---------------------------------------------------------------------------
# polynomials over F_p as tuples of coefficients, lowest degree first


def _trim(c):
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _padd(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _trim(out)


def _pneg(a, p):
    return tuple((-x) % p for x in a)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([x % p for x in out])


def _pscale(a, s, p):
    s %= p
    if s == 0:
        return ()
    return tuple((x * s) % p for x in a)


def _pdivmod(a, b, p):
    inv = pow(b[-1], p - 2, p)
    r = list(a)
    q = [0] * max(len(a) - len(b) + 1, 0)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = (r[i] * inv) % p
        if c:
            q[i - db] = c
            for j, y in enumerate(b):
                r[i - db + j] = (r[i - db + j] - c * y) % p
    return _trim(q), _trim(r)


def _pgcd(a, b, p):
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if not a:
        return ()
    return _pscale(a, pow(a[-1], p - 2, p), p)


def _tord(a):
    for i, x in enumerate(a):
        if x:
            return i
    return INF


class LocalPoly:
    """Element ``num/den`` of ``F_p[t]_(t)``, stored reduced with ``den(0) = 1``."""

    __slots__ = ("num", "den", "p")

    def __init__(self, num, den, p, _reduced=False):
        if not _reduced:
            num = _trim([x % p for x in num])
            den = _trim([x % p for x in den])
            if not den:
                raise ZeroDivisionError("zero denominator")
            if not num:
                den = (1,)
            else:
                g = _pgcd(num, den, p)
                if len(g) > 1:
                    num = _pdivmod(num, g, p)[0]
                    den = _pdivmod(den, g, p)[0]
                if den[0] == 0:
                    raise DvrError("t divides the denominator: not an element of the local ring")
                s = pow(den[0], p - 2, p)
                if s != 1:
                    num = _pscale(num, s, p)
                    den = _pscale(den, s, p)
        self.num = num
        self.den = den
        self.p = p

    def __add__(self, other):
        p = self.p
        if self.den == other.den:
            return LocalPoly(_padd(self.num, other.num, p), self.den, p)
        return LocalPoly(
            _padd(_pmul(self.num, other.den, p), _pmul(other.num, self.den, p), p),
            _pmul(self.den, other.den, p),
            p,
        )

    def __neg__(self):
        return LocalPoly(_pneg(self.num, self.p), self.den, self.p, _reduced=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not self.num or not other.num:
            return LocalPoly((), (1,), self.p, _reduced=True)
        p = self.p
        return LocalPoly(_pmul(self.num, other.num, p), _pmul(self.den, other.den, p), p)

    def __truediv__(self, other):
        if not other.num:
            raise ZeroDivisionError
        p = self.p
        return LocalPoly(_pmul(self.num, other.den, p), _pmul(self.den, other.num, p), p)

    def __eq__(self, other):
        if isinstance(other, LocalPoly):
            return self.num == other.num and self.den == other.den
        if isinstance(other, int):
            return self == LocalPoly((other,), (1,), self.p)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"LocalPoly({_format_poly(self.num)!r}, {_format_poly(self.den)!r}, p={self.p})"


class QuadElement:
    """``a + b*pi`` with ``pi^2 = cp`` (``cp`` = unit multiplier times p)."""

    __slots__ = ("a", "b", "cp")

    def __init__(self, a, b, cp):
        self.a = a
        self.b = b
        self.cp = cp

    def __add__(self, other):
        return QuadElement(self.a + other.a, self.b + other.b, self.cp)

    def __sub__(self, other):
        return QuadElement(self.a - other.a, self.b - other.b, self.cp)

    def __neg__(self):
        return QuadElement(-self.a, -self.b, self.cp)

    def __mul__(self, other):
        a, b, c, d = self.a, self.b, other.a, other.b
        if not b and not d:
            return QuadElement(a * c, b, self.cp)
        return QuadElement(a * c + b * d * self.cp, a * d + b * c, self.cp)

    def __truediv__(self, other):
        c, d = other.a, other.b
        norm = c * c - d * d * self.cp
        if norm == 0:
            raise ZeroDivisionError
        a, b = self.a, self.b
        return QuadElement((a * c - b * d * self.cp) / norm, (b * c - a * d) / norm, self.cp)

    def __eq__(self, other):
        if isinstance(other, QuadElement):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"QuadElement({self.a}, {self.b})"


Element = Union[Fraction, LocalPoly, QuadElement]

_RAT = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def _parse_rational(text: str, where=None) -> Fraction:
    m = _RAT.match(text)
    if not m:
        raise InputError(f"cannot parse rational {text!r}", where)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise InputError("zero denominator", where)
    return Fraction(num, den)


def _split_terms(text: str):
    """Split ``'3 - 2*t^2 + t'`` into signed term strings."""
    s = text.replace(" ", "").replace("\t", "").replace("\n", "")
    if not s:
        raise InputError("empty element")
    terms = []
    cur = ""
    for i, ch in enumerate(s):
        if ch in "+-" and i > 0 and s[i - 1] not in "^*/(":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    return [t for t in terms if t not in ("", "+")]


def _parse_monomial(term: str, var: str, where=None):
    """Parse ``[sign][coef][*]var[^k]`` or a bare coefficient; returns (coef, k)."""
    sign = 1
    if term[0] in "+-":
        sign = -1 if term[0] == "-" else 1
        term = term[1:]
    if var in term:
        idx = term.index(var)
        coef_s = term[:idx].rstrip("*")
        rest = term[idx + len(var):]
        if rest == "":
            k = 1
        elif rest.startswith("^") and rest[1:].isdigit():
            k = int(rest[1:])
        else:
            raise InputError(f"bad monomial {term!r}", where)
        coef = _parse_rational(coef_s, where) if coef_s else Fraction(1)
    else:
        coef, k = _parse_rational(term, where), 0
    return sign * coef, k


def _format_poly(c, var="t"):
    if not c:
        return "0"
    parts = []
    for k, x in enumerate(c):
        if not x:
            continue
        if k == 0:
            parts.append(str(x))
        else:
            parts.append(f"{x}*{var}^{k}")
    return " + ".join(parts)


class _RingBase:
    kind: str
    e: int
    spec: RingSpec

    def __init__(self):
        self._pi_powers = [self.one, self.pi]

    @property
    def p(self) -> int:
        return self.spec.p

    def pi_power(self, k: int):
        pw = self._pi_powers
        while len(pw) <= k:
            pw.append(pw[-1] * self.pi)
        return pw[k]

    def is_unit(self, x) -> bool:
        return self.valuation(x) == 0

    def unit_inverse(self, x):
        if self.valuation(x) != 0:
            raise NotAUnitError(f"{self.format(x)} is not a unit")
        return self.div(self.one, x)

    def unit_part(self, x):
        """``u`` with ``x = pi^v(x) * u``."""
        v = self.valuation(x)
        if v == INF:
            raise DvrError("zero has no unit part")
        return self.div(x, self.pi_power(v))

    def div(self, x, y):
        """Exact quotient in the fraction field; caller guarantees it lies in R."""
        return x / y

    def random_unit(self, rng):
        raise NotImplementedError

    def random_element(self, rng, max_valuation=3, zero_prob=0.2):
        if rng.random() < zero_prob:
            return self.zero
        return self.pi_power(rng.randint(0, max_valuation)) * self.random_unit(rng)

    def __repr__(self):
        return f"{type(self).__name__}({self.spec})"

    def __eq__(self, other):
        return isinstance(other, _RingBase) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)


class PLocalIntegers(_RingBase):
    kind = "p-local-int"
    e = 1

    def __init__(self, p: int):
        self.spec = RingSpec(self.kind, p)
        self.zero = Fraction(0)
        self.one = Fraction(1)
        self.pi = Fraction(p)
        super().__init__()

    def element(self, x) -> Fraction:
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise DvrError(f"{x} has p in its denominator")
        return x

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def valuation(self, x) -> float:
        n = x.numerator
        if n == 0:
            return INF
        p = self.spec.p
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v

    def residue(self, x) -> int:
        p = self.spec.p
        return x.numerator * pow(x.denominator, -1, p) % p

    def lift_residue(self, r: int):
        return Fraction(r % self.p)

    def parse(self, text: str, where=None) -> Fraction:
        x = _parse_rational(text.replace(" ", ""), where)
        if x.denominator % self.p == 0:
            raise InputError(f"{text!r}: the uniformizer divides the denominator", where)
        return x

    def format(self, x) -> str:
        return str(x)

    def random_unit(self, rng):
        p = self.p
        while True:
            a = rng.randint(-3 * p, 3 * p)
            if a % p:
                break
        if rng.random() < 0.3:
            while True:
                b = rng.randint(1, 2 * p)
                if b % p:
                    return Fraction(a, b)
        return Fraction(a)


class LocalPolynomials(_RingBase):
    kind = "t-local-poly"
    e = 1

    def __init__(self, p: int):
        self.spec = RingSpec(self.kind, p)
        self.zero = LocalPoly((), (1,), p, _reduced=True)
        self.one = LocalPoly((1,), (1,), p, _reduced=True)
        self.pi = LocalPoly((0, 1), (1,), p, _reduced=True)
        super().__init__()

    def from_int(self, n: int) -> LocalPoly:
        return LocalPoly((n,), (1,), self.p)

    def poly(self, coeffs) -> LocalPoly:
        return LocalPoly(tuple(coeffs), (1,), self.p)

    def valuation(self, x) -> float:
        return _tord(x.num)

    def residue(self, x) -> int:
        return x.num[0] if x.num else 0

    def lift_residue(self, r: int):
        return self.from_int(r)

    def _parse_poly(self, text, where):
        coeffs = {}
        p = self.p
        for term in _split_terms(text):
            c, k = _parse_monomial(term, "t", where)
            if c.denominator % p == 0:
                raise InputError(f"coefficient {c} undefined mod {p}", where)
            cm = c.numerator * pow(c.denominator, -1, p) % p
            coeffs[k] = (coeffs.get(k, 0) + cm) % p
        top = max(coeffs) if coeffs else -1
        return [coeffs.get(k, 0) for k in range(top + 1)]

    def parse(self, text: str, where=None) -> LocalPoly:
        s = text.replace(" ", "")
        m = re.match(r"^\((.*)\)/\((.*)\)$", s)
        if m:
            num = self._parse_poly(m.group(1), where)
            den = self._parse_poly(m.group(2), where)
            if not _trim(den) or den[0] % self.p == 0:
                raise InputError(f"{text!r}: the uniformizer divides the denominator", where)
            return LocalPoly(num, den, self.p)
        return LocalPoly(self._parse_poly(s, where), (1,), self.p)

    def format(self, x) -> str:
        if x.den == (1,):
            return _format_poly(x.num)
        return f"({_format_poly(x.num)})/({_format_poly(x.den)})"

    def random_unit(self, rng):
        p = self.p

        def rpoly():
            deg = rng.randint(0, 2)
            c = [rng.randrange(p) for _ in range(deg + 1)]
            c[0] = rng.randrange(1, p)
            return c

        if rng.random() < 0.3:
            return LocalPoly(rpoly(), rpoly(), p)
        return LocalPoly(rpoly(), (1,), p)


class RamifiedQuadratic(_RingBase):
    kind = "ramified-quadratic"
    e = 2

    def __init__(self, p: int, unit_multiplier=1):
        self.spec = RingSpec(self.kind, p, Fraction(unit_multiplier))
        self.cp = self.spec.unit_multiplier * p
        self.zero = QuadElement(Fraction(0), Fraction(0), self.cp)
        self.one = QuadElement(Fraction(1), Fraction(0), self.cp)
        self.pi = QuadElement(Fraction(0), Fraction(1), self.cp)
        super().__init__()

    def element(self, a, b=0) -> QuadElement:
        return QuadElement(Fraction(a), Fraction(b), self.cp)

    def from_int(self, n: int) -> QuadElement:
        return QuadElement(Fraction(n), Fraction(0), self.cp)

    def valuation(self, x) -> float:
        p = self.spec.p
        return min(2 * vp_frac(x.a, p), 2 * vp_frac(x.b, p) + 1)

    def residue(self, x) -> int:
        p = self.spec.p
        a = x.a
        return a.numerator * pow(a.denominator, -1, p) % p

    def lift_residue(self, r: int):
        return self.from_int(r)

    def parse(self, text: str, where=None) -> QuadElement:
        a = Fraction(0)
        b = Fraction(0)
        for term in _split_terms(text):
            c, k = _parse_monomial(term, "pi", where)
            if c.denominator % self.p == 0:
                raise InputError(f"{text!r}: the uniformizer divides a denominator", where)
            if k == 0:
                a += c
            elif k == 1:
                b += c
            else:
                # pi^k = (cp)^(k//2) * pi^(k%2)
                c *= self.cp ** (k // 2)
                if k % 2:
                    b += c
                else:
                    a += c
        return QuadElement(a, b, self.cp)

    def format(self, x) -> str:
        if not x.b:
            return str(x.a)
        pib = "pi" if x.b == 1 else ("-pi" if x.b == -1 else f"{x.b}*pi")
        if not x.a:
            return pib
        if x.b < 0:
            mag = "pi" if x.b == -1 else f"{-x.b}*pi"
            return f"{x.a} - {mag}"
        return f"{x.a} + {pib}"

    def random_unit(self, rng):
        p = self.p
        while True:
            a = rng.randint(-2 * p, 2 * p)
            if a % p:
                break
        b = rng.randint(-p, p)
        return QuadElement(Fraction(a), Fraction(b), self.cp)


@lru_cache(maxsize=None)
def _make(kind: str, p: int, unit_multiplier: Fraction):
    if kind == "p-local-int":
        return PLocalIntegers(p)
    if kind == "t-local-poly":
        return LocalPolynomials(p)
    return RamifiedQuadratic(p, unit_multiplier)


def make_ring(kind: str, p: int, unit_multiplier=1):
    """Return the (cached) ring for a spec; validates primality and the unit."""
    spec = RingSpec(kind, p, Fraction(unit_multiplier))
    return _make(spec.kind, spec.p, spec.unit_multiplier)


def ring_from_spec(spec: RingSpec):
    return _make(spec.kind, spec.p, spec.unit_multiplier)


# Module-level helpers mirroring the ring methods.

def valuation(ring, x) -> float:
    return ring.valuation(x)


def unit_inverse(ring, x):
    return ring.unit_inverse(x)


def residue(ring, x) -> int:
    return ring.residue(x)
