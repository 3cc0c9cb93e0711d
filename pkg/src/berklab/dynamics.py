"""Rational maps through homogeneous lifts.

A :class:`RationalMap` stores the primitive (normalised) lift together with
the valuation of the scalar relating it to the lift it was built from, so
potentials can always be evaluated for the true composition of the original
lift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil

from . import fp
from .berkovich import INF_POINT, TypeIIPoint, from_inverted
from .errors import (
    DegenerateLift,
    DiskContainsZeroAndPole,
    NotNormalized,
    ParseError,
    SingularMatrix,
)
from .fields import INFINITY, field_from_json
from .poly import Form, Poly, count_roots_in_disk, distinct_root_count, form_resultant


@dataclass(frozen=True)
class RationalMap:
    """f = F0/F1 via a primitive lift; ``scale_val`` = v(c) for original lift c*(F0, F1)."""

    F0: Form
    F1: Form
    scale_val: Fraction = Fraction(0)

    @classmethod
    def from_lift(cls, F0: Form, F1: Form, scale_val=0, *, check: bool = True) -> "RationalMap":
        """Normalise a lift; ``check=False`` skips the resultant test for
        lifts known to be non-degenerate (compositions, conjugates)."""
        if F0.deg != F1.deg:
            raise DegenerateLift("lift components must have equal degree")
        if F0.deg < 1:
            raise DegenerateLift("rational maps of degree 0 are not supported")
        if check and not form_resultant(F0, F1):
            raise DegenerateLift("lift components have a common zero")
        field = F0.field
        scaled, v = field.primitive(list(F0.coeffs) + list(F1.coeffs))
        d = F0.deg
        N0 = Form(field, d, scaled[:d + 1], clean=True)
        N1 = Form(field, d, scaled[d + 1:], clean=True)
        return cls(N0, N1, Fraction(scale_val) + v)

    @classmethod
    def from_polys(cls, num: Poly, den: Poly) -> "RationalMap":
        """Homogenise num/den to the common degree max(deg num, deg den)."""
        d = max(num.degree, den.degree)
        field = num.field
        return cls.from_lift(Form(field, d, num.coeffs), Form(field, d, den.coeffs))

    @classmethod
    def identity(cls, field) -> "RationalMap":
        return cls(Form.z(field), Form.w(field), Fraction(0))

    @property
    def field(self):
        return self.F0.field

    @property
    def degree(self) -> int:
        return self.F0.deg

    def numerator(self) -> Poly:
        return self.F0.dehomogenize()

    def denominator(self) -> Poly:
        return self.F1.dehomogenize()

    def __call__(self, z):
        """Value at a classical point (affine element or INF_POINT)."""
        if z is INF_POINT:
            a, b = self.F0.coeffs[-1], self.F1.coeffs[-1]
        else:
            a, b = self.numerator()(z), self.denominator()(z)
        if not b:
            return INF_POINT
        return a / b

    def same_map(self, other: "RationalMap") -> bool:
        """Exact projective equality of lifts (F0 G1 == F1 G0)."""
        return self.degree == other.degree and not (self.F0 * other.F1 - self.F1 * other.F0)

    def to_json(self) -> dict:
        fmt = self.field.fmt
        return {
            "field": self.field.to_json(),
            "F0": [fmt(c) for c in self.F0.coeffs],
            "F1": [fmt(c) for c in self.F1.coeffs],
            "scale_val": str(self.scale_val),
        }


def load_map_spec(spec) -> RationalMap:
    """Build a map from ``{"field": ..., "numerator": [...], "denominator": [...]}``."""
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed map-spec JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise ParseError("map spec must be a JSON object")
    try:
        field = field_from_json(spec["field"])
        num = [field.parse(str(c)) for c in spec["numerator"]]
        den = [field.parse(str(c)) for c in spec.get("denominator", ["1"])]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"map spec missing or invalid key: {exc}") from exc
    P, Q = Poly(field, num), Poly(field, den)
    if not Q:
        raise ParseError("zero denominator in map spec")
    return RationalMap.from_polys(P, Q)


# --------------------------------------------------------------------------
# composition


def normalize(F0: Form, F1: Form) -> tuple[Form, Form, Fraction]:
    """Primitive lift and v(c) with (F0, F1) = c * primitive."""
    f = RationalMap.from_lift(F0, F1)
    return f.F0, f.F1, f.scale_val


def compose(f: RationalMap, g: RationalMap) -> RationalMap:
    """Lift F(G) of f o g; tracks the scalar of the original lifts."""
    A0 = f.F0.substitute(g.F0, g.F1)
    A1 = f.F1.substitute(g.F0, g.F1)
    h = RationalMap.from_lift(A0, A1, check=False)
    return RationalMap(h.F0, h.F1, h.scale_val + f.scale_val + f.degree * g.scale_val)


@lru_cache(maxsize=256)
def iterate(f: RationalMap, n: int) -> RationalMap:
    """F^n (n >= 0); F^0 is the identity lift (z, w)."""
    if n < 0:
        raise ValueError("negative iterate")
    if n == 0:
        return RationalMap.identity(f.field)
    if n == 1:
        return f
    return compose(f, iterate(f, n - 1))


# --------------------------------------------------------------------------
# reduction


@dataclass(frozen=True)
class ReductionReport:
    degree: int
    reduced_degree: int
    cancelled_degree: int
    reduced_numerator: tuple   # F_p form coefficients, z**k w**(deg-k) at index k
    reduced_denominator: tuple
    p: int

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "reduced_degree": self.reduced_degree,
            "cancelled_degree": self.cancelled_degree,
            "reduced_numerator": list(self.reduced_numerator),
            "reduced_denominator": list(self.reduced_denominator),
            "residue_characteristic": self.p,
        }


def _reduce_residue_forms(A: list[int], B: list[int], p: int) -> ReductionReport:
    d = len(A) - 1
    a, b = fp.trim(A), fp.trim(B)
    if not a or not b:
        keep = a or b
        if not keep:
            raise NotNormalized("lift reduces to (0, 0)")
        one = (1,)
        # common factor is the whole surviving form; the reduced map is constant
        rn, rd = (one, ()) if a else ((), one)
        return ReductionReport(d, 0, d, rn, rd, p)
    ord_w = min(d - fp.degree(a), d - fp.degree(b))
    g = fp.gcd(a, b, p)
    cancelled = ord_w + fp.degree(g)
    r = d - cancelled
    ra = fp.div_exact(a, g, p)
    rb = fp.div_exact(b, g, p)
    pad = lambda q: tuple(q) + (0,) * (r + 1 - len(q))
    return ReductionReport(d, r, cancelled, pad(ra), pad(rb), p)


def reduce_lift(F0: Form, F1: Form) -> ReductionReport:
    """Reduction of a lift modulo the maximal ideal; the lift must be normalised."""
    field = F0.field
    coeffs = list(F0.coeffs) + list(F1.coeffs)
    vmin = min(field.valuation(c) for c in coeffs if c)
    if vmin != 0:
        raise NotNormalized(f"minimum coefficient valuation is {vmin}, not 0")
    A = [field.residue(c) for c in F0.coeffs]
    B = [field.residue(c) for c in F1.coeffs]
    return _reduce_residue_forms(A, B, field.p)


def reduce(f: RationalMap) -> ReductionReport:
    return reduce_lift(f.F0, f.F1)


def resultant_valuation(f: RationalMap):
    """v(Res) of the normalised lift."""
    return f.field.valuation(form_resultant(f.F0, f.F1))


def good_reduction(f: RationalMap) -> bool:
    by_degree = reduce(f).reduced_degree == f.degree
    by_resultant = resultant_valuation(f) == 0
    if by_degree != by_resultant:
        raise RuntimeError("reduced degree and resultant valuation disagree")
    return by_degree


# --------------------------------------------------------------------------
# Mobius transformations


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d)."""

    field: object
    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, self.field.coerce(getattr(self, name)))
        if not self.det:
            raise SingularMatrix("Mobius matrix has zero determinant")

    @classmethod
    def identity(cls, field) -> "Mobius":
        return cls(field, 1, 0, 0, 1)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> "Mobius":
        return Mobius(self.field, self.d, -self.b, -self.c, self.a)

    inverse = adjugate

    def __call__(self, z):
        if z is INF_POINT:
            num, den = self.a, self.c
        else:
            num, den = self.a * z + self.b, self.c * z + self.d
        if not den:
            return INF_POINT
        return num / den

    def to_json(self) -> dict:
        fmt = self.field.fmt
        return {"matrix": [[fmt(self.a), fmt(self.b)], [fmt(self.c), fmt(self.d)]]}


def conjugate(f: RationalMap, h: Mobius) -> RationalMap:
    """Lift of h o f o h^-1, namely H F(adj(H) Z)."""
    field = f.field
    X = Form(field, 1, [-h.b, h.d])       # d z - b w
    Y = Form(field, 1, [h.a, -h.c])       # -c z + a w
    G0 = f.F0.substitute(X, Y)
    G1 = f.F1.substitute(X, Y)
    N0 = G0 * h.a + G1 * h.b
    N1 = G0 * h.c + G1 * h.d
    g = RationalMap.from_lift(N0, N1, check=False)
    return RationalMap(g.F0, g.F1, g.scale_val + f.scale_val)


# --------------------------------------------------------------------------
# potentially good reduction (bounded heuristic search)


@dataclass(frozen=True)
class PGRVerdict:
    found: bool
    point: TypeIIPoint | None
    conjugacy: dict | None
    max_depth: int
    radius_denominator: int
    examined: int
    best_objective: Fraction
    best_point: TypeIIPoint

    @property
    def label(self) -> str:
        return "GoodReductionFound" if self.found else "NoneFoundUpTo"

    def to_json(self) -> dict:
        return {
            "verdict": self.label,
            "point": None if self.point is None else str(self.point),
            "conjugacy": self.conjugacy,
            "max_depth": self.max_depth,
            "radius_denominator": self.radius_denominator,
            "examined": self.examined,
            "best_objective": str(self.best_objective),
            "best_point": str(self.best_point),
        }


def _conjugated_valuations(f: RationalMap, a, m: Fraction):
    """Coefficient data of the lift of h o f o h^-1 for h(z) = (z - a)/pi**m.

    Coefficients are (base element, formal pi-exponent) pairs; the exponent
    may be fractional, standing for a power of a formal uniformiser u with
    u**N = pi.  Returns ``(objective, reduction_report)``.
    """
    field = f.field
    d = f.degree
    T0 = f.F0.dehomogenize().taylor_shift(a).coeffs
    T1 = f.F1.dehomogenize().taylor_shift(a).coeffs
    zero = field.zero
    T0 = list(T0) + [zero] * (d + 1 - len(T0))
    T1 = list(T1) + [zero] * (d + 1 - len(T1))
    entries0 = [(T0[k] - a * T1[k], m * k) for k in range(d + 1)]
    entries1 = [(T1[k], m * (k + 1)) for k in range(d + 1)]
    val = field.valuation
    vals = [val(c) + e for c, e in entries0 + entries1 if c]
    mu = min(vals)
    res_v = val(form_resultant(f.F0, f.F1))
    objective = res_v + (d * d + d) * m - 2 * d * mu

    def residue(c, e):
        if not c or val(c) + e != mu:
            return 0
        return field.unit_residue(c)

    A = [residue(c, e) for c, e in entries0]
    B = [residue(c, e) for c, e in entries1]
    return objective, _reduce_residue_forms(A, B, field.p)


def pgr_search(f: RationalMap, max_depth: int = 3, radius_denominator: int = 2) -> PGRVerdict:
    """Search conjugacies moving a type-II point D(a; m) to the Gauss point.

    Radius exponents range over (1/N)Z in [-D, D] and centres over the digit
    expansions sum a_j pi**j, -D <= j < ceil(m), visited closest-to-Gauss
    first.  A hit is certified by the reduced degree of the conjugate; a miss
    only says nothing was found within these bounds.
    """
    if f.degree < 2:
        raise ValueError("potentially good reduction search needs degree > 1")
    field = f.field
    D, N = max_depth, radius_denominator
    exps = sorted({Fraction(k, N) for k in range(-D * N, D * N + 1)}, key=lambda m: (abs(m), m))
    examined = 0
    best = None
    for m in exps:
        hi = ceil(m)
        centers = field.residue_reps(-D, hi) if hi > -D else [field.zero]
        seen = set()
        for a in centers:
            S = TypeIIPoint(field, a, m)
            if S in seen:
                continue
            seen.add(S)
            examined += 1
            objective, report = _conjugated_valuations(f, S.center, m)
            good = report.reduced_degree == f.degree
            if good != (objective == 0):
                raise RuntimeError("conjugate reduction and resultant objective disagree")
            if best is None or objective < best[0]:
                best = (objective, S)
            if good:
                conj = {"center": field.fmt(S.center), "radius_exponent": str(m),
                        "map": "z -> (z - center) / pi^radius_exponent"}
                if m.denominator == 1:
                    h = Mobius(field, 1, -S.center, 0, field.pi_power(int(m)))
                    if not good_reduction(conjugate(f, h)):
                        raise RuntimeError("certification of the conjugate failed")
                    conj["mobius"] = h.to_json()
                return PGRVerdict(True, S, conj, D, N, examined, objective, S)
    return PGRVerdict(False, None, None, D, N, examined, best[0], best[1])


# --------------------------------------------------------------------------
# action on type-II points


def _image_disk(P: Poly, Q: Poly, S: TypeIIPoint):
    """Image of S under P/Q when Q has no zero in S: (centre, exponent)."""
    from .berkovich import gauss_seminorm

    a = S.center
    c = P(a) / Q(a)
    diff = P - Q * c
    return c, gauss_seminorm(diff, S) - gauss_seminorm(Q, S)


def map_typeII(f: RationalMap, S: TypeIIPoint) -> TypeIIPoint:
    """Image f(S) of a type-II point, returned in canonical direct form."""
    P, Q = f.numerator(), f.denominator()
    if count_roots_in_disk(Q, S.center, S.m) == 0:
        c, t = _image_disk(P, Q, S)
        if t is INFINITY:
            raise ValueError("constant map on a disk")
        return TypeIIPoint(f.field, c, t)
    if count_roots_in_disk(P, S.center, S.m) == 0:
        b, t = _image_disk(Q, P, S)
        return from_inverted(f.field, b, t)
    raise DiskContainsZeroAndPole(f"{S} contains both a zero and a pole of the map")


# --------------------------------------------------------------------------
# exceptional points


def preimage_form(f: RationalMap, n: int, target) -> Form:
    """Form whose roots are f^-n(target) with multiplicity (degree d**n)."""
    Fn = iterate(f, n)
    field = f.field
    if target is INF_POINT:
        return Fn.F1
    t = field.coerce(target)
    return Fn.F0 - Fn.F1 * t


def distinct_projective_roots(W: Form) -> int:
    affine = W.dehomogenize()
    count = distinct_root_count(affine) if affine.degree > 0 else 0
    return count + (1 if W.ord_w() > 0 else 0)


def non_exceptional_witness(f: RationalMap, a) -> bool:
    """True when f^2(z) = a has at least two distinct solutions in P^1.

    In characteristic 0 this certifies a is not exceptional.  False is
    inconclusive in general, and in positive characteristic (where the
    exceptional set may be infinite) True is only evidence.
    """
    if f.degree < 2:
        raise ValueError("exceptional set is defined for degree > 1")
    return distinct_projective_roots(preimage_form(f, 2, a)) >= 2
