"""Univariate polynomials and binary forms over a valued field.

Sign convention used throughout the package: a Newton polygon segment of
slope ``s`` accounts for roots of valuation ``-s``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, lcm

from .errors import ZeroPolynomial
from .fields import INFINITY

_FAST_CUTOFF = 24


# --------------------------------------------------------------------------
# integer kernels (used for coefficients in Q)


def _pack_unsigned(values, width: int) -> int:
    return int.from_bytes(b"".join(v.to_bytes(width, "little") for v in values), "little")


def _pack_signed(values, width: int) -> int:
    pos = _pack_unsigned([v if v > 0 else 0 for v in values], width)
    neg = _pack_unsigned([-v if v < 0 else 0 for v in values], width)
    return pos - neg


def int_convolve(a: list[int], b: list[int]) -> list[int]:
    """Product of integer coefficient lists (Kronecker substitution)."""
    if not a or not b:
        return []
    if min(len(a), len(b)) < _FAST_CUTOFF:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(y) for y in b)
    if ma == 0 or mb == 0:
        return [0] * (len(a) + len(b) - 1)
    bound = min(len(a), len(b)) * ma * mb
    width = (bound.bit_length() + 2 + 7) // 8
    n = len(a) + len(b) - 1
    half = 1 << (8 * width - 1)
    prod = _pack_signed(a, width) * _pack_signed(b, width)
    prod += _pack_unsigned([half] * n, width)
    raw = prod.to_bytes(width * n, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") - half for i in range(n)]


def _int_shift_small(c: list[int], r: int) -> list[int]:
    c = list(c)
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += r * c[j + 1]
    return c


def int_taylor_shift(c: list[int], r: int) -> list[int]:
    """Coefficients of P(x + r) for an integer polynomial P."""
    n = len(c)
    if n <= 32 or r == 0:
        return _int_shift_small(c, r) if r else list(c)
    k = n // 2
    lo = int_taylor_shift(c[:k], r)
    hi = int_taylor_shift(c[k:], r)
    binom = [comb(k, j) * r ** (k - j) for j in range(k + 1)]
    prod = int_convolve(binom, hi)
    out = prod + [0] * max(0, k - len(prod))
    for i, x in enumerate(lo):
        out[i] += x
    return out[:n]


def _to_ints(coeffs) -> tuple[list[int], int]:
    den = lcm(*[c.denominator for c in coeffs]) if coeffs else 1
    return [c.numerator * (den // c.denominator) for c in coeffs], den


# --------------------------------------------------------------------------


class Poly:
    """Immutable univariate polynomial, coefficients lowest degree first."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field, coeffs=(), *, clean: bool = False):
        self.field = field
        if not clean:
            cs = [field.coerce(c) for c in coeffs]
            while cs and not cs[-1]:
                cs.pop()
            coeffs = tuple(cs)
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def monomial(cls, field, k: int, c=1) -> "Poly":
        return cls(field, [0] * k + [c])

    @classmethod
    def from_roots(cls, field, roots, lead=1) -> "Poly":
        out = cls(field, [lead])
        for r in roots:
            out = out * cls(field, [-field.coerce(r), 1])
        return out

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self):
        if not self.coeffs:
            raise ZeroPolynomial("leading coefficient of 0")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"Poly({[self.field.fmt(c) for c in self.coeffs]})"

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly(self.field, [other])

    def __add__(self, other):
        o = self._lift(other)
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs], clean=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.field.coerce(other)
            return Poly(self.field, [c * x for x in self.coeffs])
        return Poly(self.field, convolve(self.field, self.coeffs, other.coeffs), clean=True)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly(self.field, [1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly(self.field, [c * i for i, c in enumerate(self.coeffs) if i])

    def order_at_zero(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise ZeroPolynomial("order of vanishing of 0")

    def taylor_shift(self, a) -> "Poly":
        """The polynomial x -> P(a + x)."""
        a = self.field.coerce(a)
        if not a or len(self.coeffs) <= 1:
            return self
        if self.field.kind == "Qp":
            return Poly(self.field, _q_taylor_shift(self.coeffs, a), clean=True)
        c = list(self.coeffs)
        n = len(c)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] = c[j] + a * c[j + 1]
        return Poly(self.field, c)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.coeffs)
        db = other.degree
        inv = self.field.one / other.lc
        q = [self.field.zero] * max(len(r) - db, 0)
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i] * inv
            if c:
                q[i - db] = c
                for j, y in enumerate(other.coeffs):
                    r[i - db + j] = r[i - db + j] - c * y
        return Poly(self.field, q), Poly(self.field, r[:db])

    def monic(self) -> "Poly":
        if not self:
            return self
        inv = self.field.one / self.lc
        return Poly(self.field, [c * inv for c in self.coeffs], clean=True)

    def content_valuation(self):
        """min_i v(c_i); the Gauss-point seminorm exponent."""
        v = self.field.valuation
        return min((v(c) for c in self.coeffs if c), default=INFINITY)


def convolve(field, a, b) -> tuple:
    if not a or not b:
        return ()
    if field.kind == "Qp" and min(len(a), len(b)) >= _FAST_CUTOFF:
        ia, da = _to_ints(a)
        ib, db = _to_ints(b)
        den = da * db
        out = [Fraction(x, den) for x in int_convolve(ia, ib)]
    else:
        zero = field.zero
        out = [zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def _q_taylor_shift(coeffs, a: Fraction) -> list:
    n = len(coeffs) - 1
    ints, den = _to_ints(coeffs)
    r, s = a.numerator, a.denominator
    if s != 1:
        ints = [c * s ** (n - i) for i, c in enumerate(ints)]
    shifted = int_taylor_shift(ints, r)
    total = den * s ** n
    return [Fraction(c * s ** k, total) for k, c in enumerate(shifted)]


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (0 if both vanish)."""
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic()


def div_exact(a: Poly, b: Poly) -> Poly:
    q, r = a.divmod(b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


# --------------------------------------------------------------------------
# valuation-theoretic operations


def newton_polygon(P: Poly) -> list[tuple[Fraction, int]]:
    """Lower convex hull of (i, v(c_i)) as ``(slope, horizontal length)`` pairs.

    Slopes are strictly increasing; a segment of slope s accounts for that
    many roots of valuation -s.  The root 0 (points left of the first
    nonzero coefficient) is excluded, so lengths sum to deg P - ord_0 P.
    """
    if not P:
        raise ZeroPolynomial("Newton polygon of the zero polynomial")
    val = P.field.valuation
    pts = [(i, val(c)) for i, c in enumerate(P.coeffs) if c]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [
        (Fraction(y2 - y1, x2 - x1), x2 - x1)
        for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    ]


def root_valuations(P: Poly) -> dict:
    """Multiset {valuation: multiplicity} of the roots of P (INFINITY for 0)."""
    out: dict = {}
    z = P.order_at_zero()
    if z:
        out[INFINITY] = z
    for slope, length in newton_polygon(P):
        out[-slope] = out.get(-slope, 0) + length
    return out


def count_roots_with_valuation(P: Poly, m, *, strict: bool = False) -> int:
    """Roots x of P with v(x) >= m (or > m when ``strict``); m=None means -inf."""
    if not P:
        raise ZeroPolynomial("root count of the zero polynomial")
    if m is None:
        return P.degree
    total = P.order_at_zero()
    for slope, length in newton_polygon(P):
        rv = -slope
        if rv > m or (rv == m and not strict):
            total += length
    return total


def count_roots_in_disk(P: Poly, a, m) -> int:
    """Number of roots z (with multiplicity) with v(z - a) >= m.

    ``m=None`` stands for -infinity (the whole affine line).
    """
    if not P:
        raise ZeroPolynomial("root count of the zero polynomial")
    if m is None:
        return P.degree
    return count_roots_with_valuation(P.taylor_shift(a), m)


def distinct_root_count(P: Poly) -> int:
    """Number of distinct roots in an algebraic closure.

    In characteristic p a polynomial with vanishing derivative is Q(z**p),
    which has as many distinct roots as Q; mixed cases split off the part
    whose roots all have multiplicity divisible by p.
    """
    if not P:
        raise ZeroPolynomial("roots of the zero polynomial")
    if P.degree <= 0:
        return 0
    p = P.field.char
    dP = P.derivative()
    if not dP:
        # P = Q(z**p)
        return distinct_root_count(Poly(P.field, P.coeffs[::p]))
    u = poly_gcd(P, dP)
    w = div_exact(P.monic(), u)
    count = w.degree
    if p == 0:
        return count
    # strip from u every root already counted in w
    rest = u
    while True:
        g = poly_gcd(rest, w)
        if g.degree <= 0:
            break
        rest = div_exact(rest, g)
    if rest.degree > 0:
        # every remaining root has multiplicity divisible by p
        count += distinct_root_count(rest)
    return count


def determinant(rows: list[list], field):
    """Determinant by Gaussian elimination over the field."""
    m = [list(r) for r in rows]
    n = len(m)
    det = field.one
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return field.zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = m[col][col]
        det = det * pv
        inv = field.one / pv
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                row_r, row_c = m[r], m[col]
                for c in range(col, n):
                    row_r[c] = row_r[c] - f * row_c[c]
    return det


def sylvester_resultant(a_desc: list, b_desc: list, field):
    """Determinant of the Sylvester matrix of two descending coefficient lists."""
    n = len(a_desc) - 1
    m = len(b_desc) - 1
    if n < 0 or m < 0:
        return field.zero
    if n == 0 and m == 0:
        return field.one
    size = n + m
    zero = field.zero
    rows = []
    for i in range(m):
        rows.append([zero] * i + list(a_desc) + [zero] * (size - n - 1 - i))
    for i in range(n):
        rows.append([zero] * i + list(b_desc) + [zero] * (size - m - 1 - i))
    return determinant(rows, field)


def resultant(P: Poly, Q: Poly):
    """Res(P, Q) = det Sylvester(P, Q) = lc(P)**deg Q * prod over roots a of P of Q(a).

    With this convention Res(z, z - 1) = -1.  Res is 0 if either input is 0.
    """
    if not P or not Q:
        return P.field.zero
    return sylvester_resultant(list(reversed(P.coeffs)), list(reversed(Q.coeffs)), P.field)


# --------------------------------------------------------------------------
# binary forms


class Form:
    """Homogeneous form of degree ``deg`` in (z, w).

    ``coeffs[k]`` is the coefficient of z**k * w**(deg - k), so the tuple is
    also the coefficient list of the dehomogenisation F(z, 1).
    """

    __slots__ = ("field", "deg", "coeffs", "_hash")

    def __init__(self, field, deg: int, coeffs, *, clean: bool = False):
        if not clean:
            coeffs = tuple(field.coerce(c) for c in coeffs)
            if len(coeffs) > deg + 1:
                if any(coeffs[deg + 1:]):
                    raise ValueError("coefficient list longer than the form degree")
                coeffs = coeffs[:deg + 1]
            coeffs = coeffs + (field.zero,) * (deg + 1 - len(coeffs))
        self.field = field
        self.deg = deg
        self.coeffs = tuple(coeffs)
        self._hash = None

    @classmethod
    def z(cls, field) -> "Form":
        return cls(field, 1, [0, 1])

    @classmethod
    def w(cls, field) -> "Form":
        return cls(field, 1, [1, 0])

    @classmethod
    def constant(cls, field, c) -> "Form":
        return cls(field, 0, [c])

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.deg == other.deg and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.deg, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"Form({self.deg}, {[self.field.fmt(c) for c in self.coeffs]})"

    def __add__(self, other: "Form") -> "Form":
        if self.deg != other.deg:
            raise ValueError("adding forms of different degree")
        return Form(self.field, self.deg, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), clean=True)

    def __neg__(self):
        return Form(self.field, self.deg, tuple(-c for c in self.coeffs), clean=True)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Form):
            prod = convolve(self.field, self.coeffs, other.coeffs)
            deg = self.deg + other.deg
            return Form(self.field, deg, prod + (self.field.zero,) * (deg + 1 - len(prod)), clean=True)
        c = self.field.coerce(other)
        return Form(self.field, self.deg, tuple(c * x for x in self.coeffs), clean=True)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Form":
        out = Form(self.field, 0, [1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def substitute(self, X: "Form", Y: "Form") -> "Form":
        """F(X, Y) for forms X, Y of a common degree."""
        d = self.deg
        if X.deg != Y.deg:
            raise ValueError("substituting forms of different degree")
        if d == 0:
            return Form(self.field, 0, self.coeffs, clean=True)
        xp = [Form(self.field, 0, [1])]
        yp = [Form(self.field, 0, [1])]
        for _ in range(d):
            xp.append(xp[-1] * X)
            yp.append(yp[-1] * Y)
        acc = None
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            term = (xp[k] * yp[d - k]) * c
            acc = term if acc is None else acc + term
        if acc is None:
            return Form(self.field, d * X.deg, [])
        return acc

    def dehomogenize(self, chart: str = "direct") -> Poly:
        """F(z, 1) in the direct chart, F(1, w) in the inverted chart."""
        if chart == "direct":
            return Poly(self.field, self.coeffs)
        if chart == "inverted":
            return Poly(self.field, self.coeffs[::-1])
        raise ValueError(f"unknown chart {chart!r}")

    def ord_w(self) -> int:
        """Multiplicity of the root [1:0] (infinity)."""
        for k in range(self.deg, -1, -1):
            if self.coeffs[k]:
                return self.deg - k
        raise ZeroPolynomial("order of the zero form")

    def evaluate(self, z, w):
        acc = self.field.zero
        for k, c in enumerate(self.coeffs):
            if c:
                acc = acc + c * z ** k * w ** (self.deg - k)
        return acc


def form_resultant(A: Form, B: Form):
    """Resultant of binary forms with their formal degrees (Sylvester)."""
    return sylvester_resultant(list(reversed(A.coeffs)), list(reversed(B.coeffs)), A.field)
