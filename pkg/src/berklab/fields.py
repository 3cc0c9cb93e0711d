"""Exact coefficient fields carrying a discrete valuation.

Two kinds are supported:

* ``QpField(p)``: the rationals with the p-adic valuation.  Elements are
  :class:`fractions.Fraction`.
* ``FptField(p, var)``: rational functions over F_p with the valuation
  ``ord_{var=0}``.  Elements are :class:`RatFunc`.

Both have residue field F_p, so residues are plain ints in ``range(p)``.
Absolute values are never materialised: ``|x| = p**(-valuation(x))`` and all
norms elsewhere are carried as valuations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from itertools import product
from math import gcd, lcm

import gmpy2

from . import fp
from .errors import ParseError


@total_ordering
class _Infinity:
    """The valuation of zero; larger than every rational, absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("berklab.INFINITY")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other == 0:
            raise ArithmeticError("0 * infinity")
        if other < 0:
            raise ArithmeticError("negative multiple of infinity")
        return self

    __rmul__ = __mul__


INFINITY = _Infinity()


def is_inf(v) -> bool:
    return v is INFINITY


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    return int(gmpy2.remove(gmpy2.mpz(n), p)[1])


# --------------------------------------------------------------------------
# F_p(t)


class RatFunc:
    """An element num/den of F_p(t) in lowest terms with monic denominator."""

    __slots__ = ("p", "num", "den", "_hash")

    def __init__(self, p: int, num, den=(1,), *, reduced: bool = False):
        self.p = p
        if not reduced:
            num = fp.from_ints(num, p)
            den = fp.from_ints(den, p)
            if not den:
                raise ZeroDivisionError("rational function with zero denominator")
            if not num:
                num, den = (), (1,)
            elif den != (1,):
                g = fp.gcd(num, den, p)
                if g != (1,):
                    num = fp.div_exact(num, g, p)
                    den = fp.div_exact(den, g, p)
                inv = fp.inverse(den[-1], p)
                num = fp.scale(num, inv, p)
                den = fp.scale(den, inv, p)
        self.num = num
        self.den = den
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.p != self.p:
                raise ValueError("mixing rational functions over different primes")
            return other
        if isinstance(other, int):
            return RatFunc(self.p, (other % self.p,), reduced=True) if other % self.p else RatFunc(self.p, (), reduced=True)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        if self.den == o.den:
            if self.den == (1,):
                return RatFunc(p, fp.add(self.num, o.num, p), reduced=True)
            return RatFunc(p, fp.add(self.num, o.num, p), self.den)
        num = fp.add(fp.mul(self.num, o.den, p), fp.mul(o.num, self.den, p), p)
        return RatFunc(p, num, fp.mul(self.den, o.den, p))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.p, fp.neg(self.num, self.p), self.den, reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        if self.den == (1,) and o.den == (1,):
            return RatFunc(p, fp.mul(self.num, o.num, p), reduced=True)
        return RatFunc(p, fp.mul(self.num, o.num, p), fp.mul(self.den, o.den, p))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of 0 in F_p(t)")
        return RatFunc(self.p, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        p = self.p
        num, den = (1,), (1,)
        bn, bd = self.num, self.den
        while k:
            if k & 1:
                num, den = fp.mul(num, bn, p), fp.mul(den, bd, p)
            bn, bd = fp.mul(bn, bn, p), fp.mul(bd, bd, p)
            k >>= 1
        return RatFunc(p, num, den, reduced=True)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (int, RatFunc)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFunc({self.p}, {self.num!r}, {self.den!r})"


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class QpField:
    """Q with the p-adic valuation."""

    p: int
    kind = "Qp"
    char = 0

    def __post_init__(self):
        if self.p < 2 or not gmpy2.is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    @property
    def uniformizer(self):
        return Fraction(self.p)

    def coerce(self, x):
        return x if type(x) is Fraction else Fraction(x)

    def to_json(self) -> dict:
        return {"kind": "Qp", "p": self.p}

    # --- text -----------------------------------------------------------
    _RAT = re.compile(r"^[+-]?\d+(/\d+)?$")

    def parse(self, text: str) -> Fraction:
        s = text.strip()
        if not self._RAT.match(s):
            raise ParseError(f"not a rational 'num/den': {text!r}")
        x = Fraction(s)
        return x

    def fmt(self, x) -> str:
        return str(Fraction(x))

    # --- valuation ------------------------------------------------------
    def valuation(self, x):
        if not x:
            return INFINITY
        x = Fraction(x)
        v = 0
        if x.numerator % self.p == 0:
            v += vp_int(x.numerator, self.p)
        if x.denominator % self.p == 0:
            v -= vp_int(x.denominator, self.p)
        return v

    def pi_power(self, k: int) -> Fraction:
        return Fraction(self.p) ** k

    def unit_residue(self, x) -> int:
        """Residue of x / p**v(x) in F_p (nonzero)."""
        x = Fraction(x)
        p = self.p
        n = int(gmpy2.remove(gmpy2.mpz(x.numerator), p)[0])
        d = int(gmpy2.remove(gmpy2.mpz(x.denominator), p)[0])
        return (n * pow(d, -1, p)) % p

    def residue(self, x) -> int:
        v = self.valuation(x)
        if v is INFINITY or v > 0:
            return 0
        if v < 0:
            raise ValueError("residue of a non-integral element")
        return self.unit_residue(x)

    def from_residue(self, r: int) -> Fraction:
        return Fraction(r % self.p)

    def truncate(self, x, k: int) -> Fraction:
        """Canonical representative of x modulo p**k (digits below p**k)."""
        x = Fraction(x)
        v = self.valuation(x)
        if v is INFINITY or v >= k:
            return Fraction(0)
        p = self.p
        unit = x / Fraction(p) ** v
        mod = p ** (k - v)
        digits = (unit.numerator * pow(unit.denominator, -1, mod)) % mod
        return Fraction(digits) * Fraction(p) ** v

    def residue_reps(self, lo: int, hi: int) -> list:
        """All sums of a_j p**j for lo <= j < hi with digits a_j in range(p)."""
        out = []
        for digits in product(range(self.p), repeat=max(hi - lo, 0)):
            out.append(sum((Fraction(a) * Fraction(self.p) ** (lo + j) for j, a in enumerate(digits)), Fraction(0)))
        return out

    def primitive(self, coeffs) -> tuple[list, object]:
        """Scale to coprime integers with positive first nonzero entry.

        Returns ``(scaled, v)`` where the input equals ``c * scaled`` and
        ``v = valuation(c)``.
        """
        coeffs = [Fraction(c) for c in coeffs]
        den = lcm(*[c.denominator for c in coeffs]) if coeffs else 1
        ints = [c.numerator * (den // c.denominator) for c in coeffs]
        g = gcd(*ints)
        if g == 0:
            raise ValueError("primitive part of the zero vector")
        first = next(i for i in ints if i)
        if first < 0:
            g = -g
        scaled = [Fraction(i // g) for i in ints]
        return scaled, self.valuation(Fraction(g, den))

    def is_integral_vector(self, coeffs) -> bool:
        return all(Fraction(c).denominator == 1 for c in coeffs)


_TERM = re.compile(r"([+-]?)\s*(\d*)\s*(\*?)\s*(?:([a-zA-Z_]\w*)(?:\s*\^\s*(\d+))?)?")


@dataclass(frozen=True)
class FptField:
    """F_p(var) with the valuation ord at var = 0."""

    p: int
    var: str = "t"
    kind = "Fpt"

    def __post_init__(self):
        if self.p < 2 or not gmpy2.is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def char(self):
        return self.p

    @property
    def zero(self):
        return RatFunc(self.p, (), reduced=True)

    @property
    def one(self):
        return RatFunc(self.p, (1,), reduced=True)

    @property
    def uniformizer(self):
        return RatFunc(self.p, (0, 1), reduced=True)

    def coerce(self, x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ValueError(f"{x} has no image in F_{self.p}")
            return RatFunc(self.p, (x.numerator * pow(x.denominator, -1, self.p),))
        return RatFunc(self.p, (int(x),))

    def poly(self, coeffs) -> RatFunc:
        """Element with the given F_p coefficients (lowest degree first)."""
        return RatFunc(self.p, coeffs)

    def to_json(self) -> dict:
        return {"kind": "Fpt", "p": self.p}

    # --- text -----------------------------------------------------------
    def _parse_poly(self, s: str) -> tuple:
        s = s.strip()
        if not s:
            raise ParseError("empty polynomial")
        coeffs: dict[int, int] = {}
        pos = 0
        first = True
        while pos < len(s):
            m = _TERM.match(s, pos)
            if m is None or m.end() == pos:
                raise ParseError(f"cannot parse polynomial {s!r} at {pos}")
            sign, num, star, var, exp = m.groups()
            if not first and not sign:
                raise ParseError(f"missing operator in {s!r}")
            if var is not None and var != self.var:
                raise ParseError(f"unknown variable {var!r} (expected {self.var!r})")
            if var is None and (not num or star):
                raise ParseError(f"dangling term in {s!r}")
            c = int(num) if num else 1
            if sign == "-":
                c = -c
            e = (int(exp) if exp else 1) if var else 0
            coeffs[e] = coeffs.get(e, 0) + c
            pos = m.end()
            while pos < len(s) and s[pos] == " ":
                pos += 1
            first = False
        top = max(coeffs)
        return fp.from_ints([coeffs.get(i, 0) for i in range(top + 1)], self.p)

    def parse(self, text: str) -> RatFunc:
        s = text.strip()
        m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", s)
        if m:
            num = self._parse_poly(m.group(1))
            den = self._parse_poly(m.group(2))
            if not den:
                raise ParseError(f"zero denominator in {text!r}")
            return RatFunc(self.p, num, den)
        if "/" in s:
            raise ParseError(f"rational functions must be written '(num)/(den)': {text!r}")
        return RatFunc(self.p, self._parse_poly(s))

    def fmt(self, x) -> str:
        x = self.coerce(x)
        num = fp.to_str(x.num, self.var)
        if x.den == (1,):
            return num
        return f"({num})/({fp.to_str(x.den, self.var)})"

    # --- valuation ------------------------------------------------------
    def valuation(self, x):
        x = self.coerce(x)
        if not x.num:
            return INFINITY
        return fp.order_at_zero(x.num) - fp.order_at_zero(x.den)

    def pi_power(self, k: int) -> RatFunc:
        if k >= 0:
            return RatFunc(self.p, fp.shift((1,), k), reduced=True)
        return RatFunc(self.p, (1,), fp.shift((1,), -k), reduced=True)

    def unit_residue(self, x) -> int:
        x = self.coerce(x)
        n = x.num[fp.order_at_zero(x.num)]
        d = x.den[fp.order_at_zero(x.den)]
        return (n * fp.inverse(d, self.p)) % self.p

    def residue(self, x) -> int:
        v = self.valuation(x)
        if v is INFINITY or v > 0:
            return 0
        if v < 0:
            raise ValueError("residue of a non-integral element")
        return self.unit_residue(x)

    def from_residue(self, r: int) -> RatFunc:
        return self.coerce(r % self.p)

    def truncate(self, x, k: int) -> RatFunc:
        """Canonical representative of x modulo t**k (Laurent digits below t**k)."""
        x = self.coerce(x)
        v = self.valuation(x)
        if v is INFINITY or v >= k:
            return self.zero
        p = self.p
        a = fp.order_at_zero(x.num)
        b = fp.order_at_zero(x.den)
        num = x.num[a:]
        den = x.den[b:]
        n = k - v
        inv0 = fp.inverse(den[0], p)
        # power series num/den mod t**n
        rem = list(num[:n]) + [0] * max(0, n - len(num))
        out = []
        for i in range(n):
            c = (rem[i] * inv0) % p
            out.append(c)
            if c:
                for j in range(1, min(len(den), n - i)):
                    rem[i + j] = (rem[i + j] - c * den[j]) % p
        series = fp.trim(out)
        if v >= 0:
            return RatFunc(p, fp.shift(series, v), reduced=True)
        return RatFunc(p, series, fp.shift((1,), -v))

    def residue_reps(self, lo: int, hi: int) -> list:
        out = []
        for digits in product(range(self.p), repeat=max(hi - lo, 0)):
            acc = self.zero
            for j, a in enumerate(digits):
                if a:
                    acc = acc + self.pi_power(lo + j) * a
            out.append(acc)
        return out

    def primitive(self, coeffs) -> tuple[list, object]:
        """Scale to coprime F_p[t] entries whose first nonzero entry is monic.

        Returns ``(scaled, v)`` with input = ``c * scaled`` and ``v = v(c)``.
        """
        p = self.p
        coeffs = [self.coerce(c) for c in coeffs]
        den = (1,)
        for c in coeffs:
            if c.den != (1,):
                den = fp.div_exact(fp.mul(den, c.den, p), fp.gcd(den, c.den, p), p)
        polys = [fp.mul(c.num, fp.div_exact(den, c.den, p), p) for c in coeffs]
        g = ()
        for q in polys:
            g = fp.gcd(g, q, p)
        if not g:
            raise ValueError("primitive part of the zero vector")
        polys = [fp.div_exact(q, g, p) for q in polys]
        first = next(q for q in polys if q)
        inv = fp.inverse(first[-1], p)
        scaled = [RatFunc(p, fp.scale(q, inv, p), reduced=True) for q in polys]
        # input = (g / den / inv) * scaled; inv is a unit
        return scaled, fp.order_at_zero(g) - fp.order_at_zero(den)


def field_from_json(spec: dict):
    kind = spec.get("kind")
    p = spec.get("p")
    if not isinstance(p, int):
        raise ParseError(f"field spec needs an integer 'p': {spec!r}")
    try:
        if kind in ("Qp", "PAdic"):
            return QpField(p)
        if kind in ("Fpt", "LaurentRational"):
            return FptField(p, spec.get("var", "t"))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown field kind {kind!r}")
