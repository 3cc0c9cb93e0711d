"""Potentials on type-II points, in log_p units (exact rationals).

* ``t_h``: log||H|| - deg(h) log||.|| extended to type-II points.
* ``green``: T_{F^n}/d^n with a certified truncation bound.
* ``chordal_can``: the continuous extension of log[f^n, g] built from the
  wedge F0*G1 - F1*G0.  It is *not* the chordal distance between the image
  points f^n(S) and g(S); those differ in general and only the wedge form is
  implemented.
* ``tree_laplacian``: Laplacian of a piecewise-affine function restricted to
  a finite tree, with the sign fixed so that
  Laplacian(log max{1, |.|}) = delta_Gauss - delta_infinity.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .berkovich import FiniteTree, TreeMeasure, TypeIIPoint, gauss_seminorm
from .dynamics import RationalMap, iterate, map_typeII, resultant_valuation
from .fields import is_inf
from .errors import (
    DiskContainsZeroAndPole,
    IdenticallyEqual,
    InsufficientResolution,
    ToleranceUnreachable,
)
from .poly import Form, Poly


def _section_valuations(forms, S: TypeIIPoint, chart: str):
    """Seminorm valuations of the dehomogenised forms and of the coordinate."""
    if chart == "direct":
        a, m = S.center, S.m
        polys = [F.dehomogenize("direct") for F in forms]
    elif chart == "inverted":
        a, m = S.inverted_form()
        polys = [F.dehomogenize("inverted") for F in forms]
    else:
        raise ValueError(f"unknown chart {chart!r}")
    chart_point = TypeIIPoint(S.field, a, m)
    coord = min(S.field.valuation(chart_point.center), m)
    return [gauss_seminorm(P, chart_point) for P in polys], coord


def t_h(H: RationalMap, S: TypeIIPoint, chart: str = "direct") -> Fraction:
    """T_H(S) for the original lift of H (normalised lift plus tracked scalar)."""
    (v0, v1), coord = _section_valuations([H.F0, H.F1], S, chart)
    return -min(v0, v1) + H.degree * min(coord, 0) - H.scale_val


class _ShiftProfile:
    """Coefficient valuations of P(c + x); the seminorm of D(c; s) is then
    min_k (v_k + k s), so probes along a ray from c cost no arithmetic."""

    def __init__(self, P: Poly, c):
        field = P.field
        shifted = P.taylor_shift(c)
        self.terms = [(k, field.valuation(x)) for k, x in enumerate(shifted.coeffs) if x]

    def __call__(self, s) -> Fraction:
        return min(v + k * s for k, v in self.terms)


class ScaledT:
    """S -> scale * T_H(S), with fast evaluation along rays (direct chart).

    Pass instances to ``tree_laplacian``; probes along an edge reuse one
    Taylor shift per center.
    """

    def __init__(self, H: RationalMap, scale=1):
        self.H = H
        self.scale = Fraction(scale)
        self._rays: dict = {}

    def __call__(self, S: TypeIIPoint) -> Fraction:
        return self.along(S.center)(S.m)

    def along(self, c):
        if c not in self._rays:
            H = self.H
            p0 = _ShiftProfile(H.F0.dehomogenize(), c)
            p1 = _ShiftProfile(H.F1.dehomogenize(), c)
            vc = H.field.valuation(c)

            def ray(s):
                coord = s if is_inf(vc) else min(vc, s)
                t = -min(p0(s), p1(s)) + H.degree * min(coord, 0) - H.scale_val
                return self.scale * t
            self._rays[c] = ray
        return self._rays[c]


# --------------------------------------------------------------------------
# dynamical Green function


@dataclass(frozen=True)
class GreenApprox:
    value: Fraction
    n_used: int
    bound: Fraction
    series_checked: bool

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "n_used": self.n_used,
            "bound": str(self.bound),
            "series_checked": self.series_checked,
        }


def t_f_sup_bound(f: RationalMap) -> Fraction:
    """Bound on sup |T_F| over the Berkovich line.

    For the normalised lift, |Res| ||Z||^d <= ||F(Z)|| <= ||Z||^d, so
    T lies in [-v(Res), 0]; the tracked scalar shifts it by -scale_val.
    """
    r = Fraction(resultant_valuation(f))
    s = f.scale_val
    return max(abs(s), abs(r + s))


def green_bound(f: RationalMap, n: int) -> Fraction:
    d = f.degree
    return t_f_sup_bound(f) / (d ** n * (d - 1))


def green_direct(f: RationalMap, S: TypeIIPoint, n: int) -> Fraction:
    """T_{F^n}(S) / d^n."""
    return t_h(iterate(f, n), S) / f.degree ** n


def green_series(f: RationalMap, S: TypeIIPoint, n: int) -> Fraction:
    """sum_{k<n} T_F(f^k(S)) / d^(k+1); raises DiskContainsZeroAndPole."""
    d = f.degree
    total = Fraction(0)
    point = S
    for k in range(n):
        total += t_h(f, point) / d ** (k + 1)
        if k + 1 < n:
            point = map_typeII(f, point)
    return total


def green(f: RationalMap, S: TypeIIPoint, tolerance, n_max: int = 40) -> GreenApprox:
    """g_F(S) to within ``tolerance``, using the smallest sufficient n.

    Both evaluation routes are run; if the series applies they must agree.
    """
    if f.degree < 2:
        raise ValueError("Green function needs degree > 1")
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    n = 1
    while green_bound(f, n) > tolerance:
        n += 1
        if n > n_max:
            raise ToleranceUnreachable(f"tolerance {tolerance} needs more than {n_max} iterates")
    value = green_direct(f, S, n)
    try:
        series = green_series(f, S, n)
    except DiskContainsZeroAndPole:
        return GreenApprox(value, n, green_bound(f, n), False)
    if series != value:
        raise RuntimeError(f"Green evaluations disagree at {S}: {value} vs {series}")
    return GreenApprox(value, n, green_bound(f, n), True)


# --------------------------------------------------------------------------
# canonical chordal extension


def wedge(F: RationalMap, G: RationalMap) -> Form:
    return F.F0 * G.F1 - F.F1 * G.F0


def chordal_can(Fn: RationalMap, G: RationalMap, S: TypeIIPoint, chart: str = "direct") -> Fraction:
    """log_p [f^n, g]_can(S) (always <= 0); independent of both lift scalars."""
    W = wedge(Fn, G)
    if not W:
        raise IdenticallyEqual("f^n and g coincide; [f^n = g] is undefined")
    (vw, f0, f1, g0, g1), _ = _section_valuations([W, Fn.F0, Fn.F1, G.F0, G.F1], S, chart)
    return -vw + min(f0, f1) + min(g0, g1)


def apriori_sequence(f: RationalMap, g: RationalMap, samples, n_max: int,
                     n_min: int = 1, region: TypeIIPoint | None = None) -> list[tuple[int, Fraction]]:
    """[(n, s_n)] with s_n = max over samples of chordal_can(F^n, G, S) / (d^n + deg g).

    The true supremum over the region lies in [s_n, 0].
    """
    samples = list(samples)
    if not samples:
        raise ValueError("no sample points")
    if region is not None and not all(S <= region for S in samples):
        raise ValueError("sample outside the region")
    if f.degree < 2 or g.degree < 1:
        raise ValueError("need deg f > 1 and deg g > 0")
    out = []
    for n in range(n_min, n_max + 1):
        Fn = iterate(f, n)
        denom = f.degree ** n + g.degree
        out.append((n, max(chordal_can(Fn, g, S) for S in samples) / denom))
    return out


# --------------------------------------------------------------------------
# tree Laplacian


class _Evaluator:
    def __init__(self, values, field):
        self.values = values
        self.field = field
        self.cache: dict = {}

    def __call__(self, center, s) -> Fraction:
        if hasattr(self.values, "along"):
            key = (center, s)
            if key not in self.cache:
                self.cache[key] = Fraction(self.values.along(center)(s))
            return self.cache[key]
        pt = TypeIIPoint(self.field, center, s)
        if pt not in self.cache:
            if isinstance(self.values, Mapping):
                try:
                    self.cache[pt] = Fraction(self.values[pt])
                except KeyError:
                    raise InsufficientResolution(f"no value supplied at probe {pt}") from None
            else:
                self.cache[pt] = Fraction(self.values(pt))
        return self.cache[pt]


def _end_slope(u, center, lo, hi, at_left: bool, max_halvings: int) -> Fraction:
    """Exact one-sided slope at an end of [lo, hi] (convexity-certified)."""
    eps = (hi - lo) / 2
    for _ in range(max_halvings):
        if at_left:
            a, b, c = lo, lo + eps / 2, lo + eps
        else:
            a, b, c = hi - eps, hi - eps / 2, hi
        s1 = (u(center, b) - u(center, a)) / (b - a)
        s2 = (u(center, c) - u(center, b)) / (c - b)
        if s1 == s2:
            return s1
        eps /= 2
    raise InsufficientResolution(f"no affine germ found near {'left' if at_left else 'right'} end")


def _edge_pieces(u, center, lo, hi, depth, max_depth, max_halvings):
    """Affine pieces [(start, end, slope)] of u along s in [lo, hi]."""
    if depth > max_depth:
        raise InsufficientResolution(f"edge piece [{lo}, {hi}] not resolved at depth {max_depth}")
    ulo, uhi = u(center, lo), u(center, hi)
    mid = (lo + hi) / 2
    umid = u(center, mid)
    s1 = (umid - ulo) / (mid - lo)
    s2 = (uhi - umid) / (hi - mid)
    if s1 == s2:
        return [(lo, hi, s1)]
    sl = _end_slope(u, center, lo, hi, True, max_halvings)
    sr = _end_slope(u, center, lo, hi, False, max_halvings)
    if sl == sr:
        raise InsufficientResolution("edge function is not one-signed convex/concave")
    x = (uhi - ulo + sl * lo - sr * hi) / (sl - sr)
    if not lo < x < hi:
        raise InsufficientResolution("tangent lines meet outside the edge; Laplacian not one-signed")
    if u(center, x) == ulo + sl * (x - lo):
        return [(lo, x, sl), (x, hi, sr)]
    return (_edge_pieces(u, center, lo, x, depth + 1, max_depth, max_halvings)
            + _edge_pieces(u, center, x, hi, depth + 1, max_depth, max_halvings))


def tree_laplacian(values: Callable | Mapping, tree: FiniteTree, *, extra_points=(),
                   max_depth: int = 32, max_halvings: int = 48) -> TreeMeasure:
    """Laplacian of ``values`` restricted to ``tree``.

    ``values`` maps type-II points to rationals (callable or mapping).  On
    each open edge the function must be piecewise affine in the hyperbolic
    coordinate with Laplacian of one sign there (convex or concave), which
    is what lets a midpoint probe certify affineness and lets breakpoints be
    located exactly by intersecting the end tangents.  Points of ``tree``
    where a mass of the other sign may sit (e.g. the retraction of the
    Gauss point when it is not a vertex) go in ``extra_points``.

    Vertex mass = sum of outgoing slopes; edge-interior breakpoints carry
    the jump in slope.
    """
    u = _Evaluator(values, tree.field)
    masses: dict = {}

    def add(pt, mass):
        if mass:
            masses[pt] = masses.get(pt, Fraction(0)) + mass

    extra = [pt for pt in extra_points if pt not in tree.vertices]
    for child, par, _ in tree.edges():
        cuts = sorted({pt.m for pt in extra if child < pt < par})
        knots = [par.m] + cuts + [child.m]
        pieces = []
        for lo, hi in zip(knots, knots[1:]):
            pieces.extend(_edge_pieces(u, child.center, lo, hi, 0, max_depth, max_halvings))
        add(par, pieces[0][2])
        add(child, -pieces[-1][2])
        for (_, x, s_left), (_, _, s_right) in zip(pieces, pieces[1:]):
            add(TypeIIPoint(tree.field, child.center, x), s_right - s_left)
    return TreeMeasure(tree, masses, total=sum(masses.values(), Fraction(0)))


def log_max_one(S: TypeIIPoint) -> Fraction:
    """log_p max{1, [z]_S}, the extension of log max{1, |.|}."""
    return max(Fraction(0), -min(S.field.valuation(S.center), S.m))


def rootsnormalized_potential(Fn: RationalMap, G: RationalMap) -> Callable[[TypeIIPoint], Fraction]:
    """S -> log[f^n, g]_can(S) + T_{F^n}(S) + T_G(S)."""
    def u(S: TypeIIPoint) -> Fraction:
        return chordal_can(Fn, G, S) + t_h(Fn, S) + t_h(G, S)
    return u
