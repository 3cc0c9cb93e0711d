"""Discrete measures retracted to finite trees and equidistribution experiments."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .berkovich import FiniteTree, TreeMeasure, TypeIIPoint, tv_distance
from .dynamics import (
    PGRVerdict,
    RationalMap,
    iterate,
    non_exceptional_witness,
    pgr_search,
    preimage_form,
)
from .errors import ExceptionalBasePoint, IdenticallyEqual, InsufficientResolution
from .fields import is_inf
from .poly import Form, Poly, count_roots_with_valuation, root_valuations
from .potential import ScaledT, green_bound, tree_laplacian, wedge

__all__ = [
    "DivisorPoly",
    "divisor_poly",
    "divisor_from_form",
    "retract_divisor",
    "mu_pullback",
    "mu_green",
    "tv_distance",
    "equidist_experiment",
    "ExperimentReport",
]


@dataclass(frozen=True)
class DivisorPoly:
    """Effective divisor on P^1 given by a binary form.

    ``direct`` holds the affine roots; ``at_infinity`` is the multiplicity
    of [1:0].
    """

    form: Form
    direct: Poly
    at_infinity: int

    @property
    def degree(self) -> int:
        return self.form.deg

    @property
    def field(self):
        return self.form.field

    def check_total(self) -> int:
        """Recount roots chart by chart: |z| <= 1 in the direct chart plus
        |w| < 1 in the inverted one.  Must equal the degree."""
        inner = count_roots_with_valuation(self.direct, 0)
        outer = count_roots_with_valuation(self.form.dehomogenize("inverted"), 0, strict=True)
        total = inner + outer
        if total != self.degree:
            raise RuntimeError(f"divisor recount {total} != degree {self.degree}")
        return total


def divisor_from_form(W: Form) -> DivisorPoly:
    if not W:
        raise IdenticallyEqual("zero form has no divisor")
    return DivisorPoly(W, W.dehomogenize("direct"), W.ord_w())


def divisor_poly(f: RationalMap, g: RationalMap, n: int) -> DivisorPoly:
    """Divisor of [f^n = g]: d^n + deg g points counted with multiplicity."""
    W = wedge(iterate(f, n), g)
    if not W:
        raise IdenticallyEqual(f"f^{n} equals g")
    return divisor_from_form(W)


class _Shifts:
    """Root-valuation data of P(c + x), cached per center."""

    def __init__(self, P: Poly):
        self.P = P
        self.cache: dict = {}

    def get(self, c) -> Poly:
        if c not in self.cache:
            self.cache[c] = self.P.taylor_shift(c)
        return self.cache[c]

    def count(self, S: TypeIIPoint) -> int:
        return count_roots_with_valuation(self.get(S.center), S.m)

    def valuations(self, c) -> list:
        return [v for v in root_valuations(self.get(c)) if not is_inf(v)]


def retract_divisor(D: DivisorPoly, tree: FiniteTree) -> TreeMeasure:
    """Exact push-forward of the divisor under retraction to ``tree``.

    Roots landing in an edge interior become edge points.  Roots outside the
    root disk, and roots at infinity, retract to the root of the tree.
    """
    shifts = _Shifts(D.direct) if D.direct.degree > 0 else None
    if shifts is None:
        return TreeMeasure(tree, {tree.root: D.degree}, total=D.degree)
    extra = set()
    for child, par, _ in tree.edges():
        for s in shifts.valuations(child.center):
            if par.m < s < child.m:
                extra.add(TypeIIPoint(tree.field, child.center, s))
    refined = tree.refine(extra)
    counts = {v: shifts.count(v) for v in refined.vertices}
    masses = {}
    for v in refined.vertices:
        below = sum(counts[c] for c in refined.children[v])
        masses[v] = counts[v] - below
    masses[refined.root] += D.degree - counts[refined.root]
    if any(m < 0 for m in masses.values()):
        raise RuntimeError("negative mass in retracted divisor")
    return TreeMeasure(tree, masses, total=D.degree)


def mu_pullback(f: RationalMap, a, n: int, tree: FiniteTree, *, check_witness: bool = True) -> TreeMeasure:
    """(f^n)^* delta_a / d^n retracted to ``tree`` (a probability measure)."""
    if check_witness and not non_exceptional_witness(f, a):
        raise ExceptionalBasePoint(f"{a} may be exceptional; pick another base point")
    D = divisor_from_form(preimage_form(f, n, a))
    return retract_divisor(D, tree).scale(Fraction(1, D.degree))


def mu_green(f: RationalMap, tree: FiniteTree, n: int | None = None, *, tolerance=Fraction(1, 100),
             n_max: int = 40) -> TreeMeasure:
    """Laplacian of g_n restricted to ``tree`` plus the retracted delta_Gauss.

    This equals the retraction of (f^n)^* delta_Gauss / d^n, so masses are
    nonnegative; negative masses larger than the Green error times the edge
    count are reported as an error.
    """
    if n is None:
        n = 1
        while green_bound(f, n) > Fraction(tolerance):
            n += 1
            if n > n_max:
                raise InsufficientResolution(f"Green tolerance needs more than {n_max} iterates")
    Fn = iterate(f, n)
    scale = Fraction(1, f.degree ** n)
    gauss = TypeIIPoint.gauss(tree.field)
    anchor = tree.retract(gauss)
    lap = tree_laplacian(ScaledT(Fn, scale), tree, extra_points=[anchor])
    mu = lap + TreeMeasure.dirac(tree, anchor)
    slack = green_bound(f, n) * max(1, len(tree.edges()))
    if any(m < -slack for m in mu.masses.values()):
        raise InsufficientResolution("negative mass beyond the certified error")
    return mu


# --------------------------------------------------------------------------
# experiments


def worker_count() -> int:
    raw = os.environ.get("BERKLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class ExperimentReport:
    verdict: PGRVerdict
    reference: str
    rows: list = dc_field(default_factory=list)

    @property
    def hypothesis_holds(self) -> bool:
        """No potential good reduction found within the search bounds."""
        return not self.verdict.found

    def to_json(self) -> dict:
        return {
            "pgr": self.verdict.to_json(),
            "claim": None if self.verdict.found else "no potential good reduction found up to search bounds",
            "reference": self.reference,
            "rows": [
                {"n": r["n"], "degree": r["degree"], "tv": str(r["tv"]), "tv_decimal": decimal6(r["tv"])}
                for r in self.rows
            ],
        }


def decimal6(x: Fraction) -> str:
    """Six decimal places, round-half-even, exact."""
    q = Fraction(x) * 10 ** 6
    n, r = divmod(q.numerator, q.denominator)
    if 2 * r > q.denominator or (2 * r == q.denominator and n % 2):
        n += 1
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // 10 ** 6}.{n % 10 ** 6:06d}"


def _row(args) -> dict:
    f, g, n, tree, ref = args
    D = divisor_poly(f, g, n)
    D.check_total()
    mu = retract_divisor(D, tree).scale(Fraction(1, D.degree))
    return {"n": n, "degree": D.degree, "tv": tv_distance(mu, ref)}


def reference_measure(f: RationalMap, tree: FiniteTree, kind="pullback", *, base_point=1, ref_n: int = 10):
    """(measure, description).  ``kind`` is 'pullback', 'green', 'gauss' or a TreeMeasure."""
    if isinstance(kind, TreeMeasure):
        return kind, "custom"
    if kind == "gauss":
        return TreeMeasure.dirac(tree, tree.retract(TypeIIPoint.gauss(tree.field))), "delta_gauss"
    if kind == "pullback":
        try:
            return mu_pullback(f, base_point, ref_n, tree), f"pullback(a={base_point}, n={ref_n})"
        except ExceptionalBasePoint:
            kind = "green"
    if kind == "green":
        return mu_green(f, tree), "green"
    raise ValueError(f"unknown reference {kind!r}")


def equidist_experiment(f: RationalMap, g: RationalMap, tree: FiniteTree, ns, *, reference="pullback",
                        pgr_depth: int = 3, pgr_denom: int = 2, base_point=1, ref_n: int = 10,
                        workers: int | None = None) -> ExperimentReport:
    verdict = pgr_search(f, pgr_depth, pgr_denom)
    ref, label = reference_measure(f, tree, reference, base_point=base_point, ref_n=ref_n)
    jobs = [(f, g, n, tree, ref) for n in ns]
    workers = min(workers or worker_count(), max(1, len(jobs)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs))
    else:
        rows = [_row(j) for j in jobs]
    return ExperimentReport(verdict, label, rows)
