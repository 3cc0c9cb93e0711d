"""Type-II points of the Berkovich projective line and finite subtrees.

A type-II point is stored as the closed disk ``D(a; m) = {z : v(z - a) >= m}``
(radius p**-m) in the direct z-chart, with ``a`` truncated to a canonical
representative modulo the uniformiser to the power ceil(m).  Every type-II
point has such a form; the inverted 1/z-chart is available through
:func:`from_inverted` / :meth:`TypeIIPoint.inverted_form`.

The tree is oriented towards infinity: ``S <= S'`` means the disk of S is
contained in the disk of S'.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import ceil

from .errors import InvalidProjectivePoint, ParseError, TreeMismatch
from .fields import INFINITY
from .poly import Poly


class _InfinityPoint:
    """The classical point at infinity of P^1."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF_POINT"


INF_POINT = _InfinityPoint()


def _frac_str(m: Fraction) -> str:
    return str(Fraction(m))


@dataclass(frozen=True)
class TypeIIPoint:
    field: object
    center: object
    m: Fraction

    def __post_init__(self):
        m = Fraction(self.m)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "center", self.field.truncate(self.field.coerce(self.center), ceil(m)))

    @classmethod
    def gauss(cls, field) -> "TypeIIPoint":
        return cls(field, field.zero, Fraction(0))

    @property
    def is_gauss(self) -> bool:
        return self.m == 0 and not self.center

    def contains(self, a) -> bool:
        """Whether the classical affine point a lies in the disk."""
        return self.field.valuation(self.field.coerce(a) - self.center) >= self.m

    def __le__(self, other: "TypeIIPoint") -> bool:
        return other.m <= self.m and other.contains(self.center)

    def __lt__(self, other: "TypeIIPoint") -> bool:
        return self != other and self <= other

    def inverted_form(self) -> tuple[object, Fraction]:
        """(b, m') with this point equal to the disk D(b; m') in the 1/z chart."""
        v = self.field.valuation(self.center)
        if v >= self.m:
            return self.field.zero, -self.m
        return self.field.one / self.center, self.m - 2 * v

    def sort_key(self):
        return (self.m, self.field.fmt(self.center))

    def __str__(self):
        return f"D({self.field.fmt(self.center)}; {_frac_str(self.m)})"

    def __repr__(self):
        return f"TypeIIPoint{self}"


def disk(field, a, m) -> TypeIIPoint:
    return TypeIIPoint(field, a, Fraction(m))


def from_inverted(field, b, m) -> TypeIIPoint:
    """The point whose disk in the w = 1/z chart is D(b; m)."""
    b = field.coerce(b)
    m = Fraction(m)
    v = field.valuation(b)
    if v >= m:
        return TypeIIPoint(field, field.zero, -m)
    return TypeIIPoint(field, field.one / b, m - 2 * v)


_POINT_RE = re.compile(r"^\s*D\((.*);\s*([^;()]+)\)\s*(@inv)?\s*$")


def parse_point(field, text: str) -> TypeIIPoint:
    """Parse ``D(a; m)`` or ``D(a; m)@inv``."""
    mt = _POINT_RE.match(text)
    if not mt:
        raise ParseError(f"not a type-II point 'D(a; m)': {text!r}")
    a = field.parse(mt.group(1))
    try:
        m = Fraction(mt.group(2).strip())
    except ValueError as exc:
        raise ParseError(f"bad radius exponent in {text!r}") from exc
    if mt.group(3):
        return from_inverted(field, a, m)
    return TypeIIPoint(field, a, m)


def format_point(S: TypeIIPoint, chart: str = "direct") -> str:
    if chart == "inverted":
        b, m = S.inverted_form()
        return f"D({S.field.fmt(b)}; {_frac_str(m)})@inv"
    return str(S)


# --------------------------------------------------------------------------
# seminorms and metric


def gauss_seminorm(phi: Poly, S: TypeIIPoint):
    """Valuation v with [phi]_S = p**-v: min_i v(c_i) + i*m for phi(a + x)."""
    if not phi:
        return INFINITY
    shifted = phi.taylor_shift(S.center)
    val = phi.field.valuation
    return min(val(c) + i * S.m for i, c in enumerate(shifted.coeffs) if c)


def join(S: TypeIIPoint, T: TypeIIPoint) -> TypeIIPoint:
    """The point where the paths from S and T to infinity meet."""
    v = S.field.valuation(S.center - T.center)
    return TypeIIPoint(S.field, S.center, min(S.m, T.m, v))


def join_classical(a, S: TypeIIPoint) -> TypeIIPoint:
    """Join of the classical affine point a with S."""
    v = S.field.valuation(S.field.coerce(a) - S.center)
    return TypeIIPoint(S.field, S.center, min(S.m, v))


def hyperbolic_distance(S: TypeIIPoint, T: TypeIIPoint) -> Fraction:
    return S.m + T.m - 2 * join(S, T).m


def _projective(field, pt):
    if pt is INF_POINT:
        return field.one, field.zero
    if isinstance(pt, tuple):
        if len(pt) != 2:
            raise InvalidProjectivePoint(f"not a projective pair: {pt!r}")
        z0, z1 = field.coerce(pt[0]), field.coerce(pt[1])
        if not z0 and not z1:
            raise InvalidProjectivePoint("[0:0] is not a point of P^1")
        return z0, z1
    return field.coerce(pt), field.one


def chordal(field, z, w):
    """v with [z, w] = p**-v for classical points given as (z0, z1), affine or INF_POINT."""
    z0, z1 = _projective(field, z)
    w0, w1 = _projective(field, w)
    val = field.valuation
    wedge = z0 * w1 - z1 * w0
    if not wedge:
        return INFINITY
    return val(wedge) - min(val(z0), val(z1)) - min(val(w0), val(w1))


# --------------------------------------------------------------------------
# directions


def _is_below(x, S: TypeIIPoint) -> bool:
    """x (type-II or classical) lies in the closed disk of S."""
    if x is INF_POINT:
        return False
    if isinstance(x, TypeIIPoint):
        return x <= S
    return S.contains(x)


def _join_any(x, S: TypeIIPoint) -> TypeIIPoint:
    if isinstance(x, TypeIIPoint):
        return join(x, S)
    return join_classical(x, S)


@dataclass(frozen=True, eq=False)
class Direction:
    """Tangent direction at ``base`` containing ``rep`` (rep != base)."""

    base: TypeIIPoint
    rep: object

    def __post_init__(self):
        if self.rep == self.base:
            raise ValueError("a direction needs a representative distinct from its base")

    def _down(self) -> bool:
        return _is_below(self.rep, self.base)

    def __eq__(self, other):
        if not isinstance(other, Direction):
            return NotImplemented
        if self.base != other.base:
            return False
        d1, d2 = self._down(), other._down()
        if d1 != d2:
            return False
        if not d1:
            return True
        x, y = self.rep, other.rep
        if isinstance(x, TypeIIPoint):
            j = _join_any(y, x)
        elif isinstance(y, TypeIIPoint):
            j = join_classical(x, y)
        else:
            v = self.base.field.valuation(self.base.field.coerce(x) - y)
            return v > self.base.m
        return j.m > self.base.m

    def __hash__(self):
        return hash(self.base)


# --------------------------------------------------------------------------
# finite trees


@dataclass(frozen=True, eq=False)
class FiniteTree:
    """Join-closed finite set of type-II points with its edge structure."""

    vertices: frozenset
    root: TypeIIPoint = dc_field(init=False)
    parent: dict = dc_field(init=False, repr=False)
    children: dict = dc_field(init=False, repr=False)

    def __post_init__(self):
        verts = set(self.vertices)
        if not verts:
            raise ValueError("empty tree")
        changed = True
        while changed:
            changed = False
            vs = sorted(verts, key=TypeIIPoint.sort_key)
            for i, s in enumerate(vs):
                for t in vs[i + 1:]:
                    j = join(s, t)
                    if j not in verts:
                        verts.add(j)
                        changed = True
        verts = frozenset(verts)
        object.__setattr__(self, "vertices", verts)
        ordered = sorted(verts, key=TypeIIPoint.sort_key)
        root = ordered[0]
        for v in ordered:
            if not (root <= v):
                root = join(root, v)
        object.__setattr__(self, "root", root)
        parent = {}
        children = {v: [] for v in verts}
        for v in verts:
            ups = [u for u in verts if v < u]
            if ups:
                par = max(ups, key=lambda u: u.m)
                parent[v] = par
                children[par].append(v)
        for v in children:
            children[v].sort(key=TypeIIPoint.sort_key)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "children", children)

    @classmethod
    def from_points(cls, points) -> "FiniteTree":
        return cls(frozenset(points))

    def __eq__(self, other):
        return isinstance(other, FiniteTree) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __len__(self):
        return len(self.vertices)

    @property
    def field(self):
        return self.root.field

    def sorted_vertices(self) -> list:
        return sorted(self.vertices, key=TypeIIPoint.sort_key)

    def edges(self) -> list[tuple[TypeIIPoint, TypeIIPoint, Fraction]]:
        """(child, parent, length) for every edge, deterministic order."""
        return [(c, self.parent[c], c.m - self.parent[c].m) for c in self.sorted_vertices() if c in self.parent]

    def edge_containing(self, S: TypeIIPoint):
        """(child, parent) if S lies in the interior of that edge, else None."""
        for c, par, _ in self.edges():
            if c < S < par:
                return c, par
        return None

    def contains_point(self, S: TypeIIPoint) -> bool:
        return S in self.vertices or self.edge_containing(S) is not None

    def retract(self, x):
        """First point of the tree on the path from x to infinity.

        x may be a TypeIIPoint, a classical affine point, or INF_POINT.
        """
        if isinstance(x, TypeIIPoint) and x in self.vertices:
            return x
        if not _is_below(x, self.root):
            return self.root
        lowest = max((v for v in self.vertices if _is_below(x, v)), key=lambda v: v.m)
        for c in self.children[lowest]:
            j = _join_any(x, c)
            if j.m > lowest.m:
                return j
        return lowest

    def refine(self, points) -> "FiniteTree":
        return FiniteTree(self.vertices | frozenset(points))

    def __str__(self):
        return "{" + ", ".join(str(v) for v in self.sorted_vertices()) + "}"


def unit_tree(field, depth: int, top=None) -> FiniteTree:
    """Gauss point and the disks D(b; k), 1 <= k <= depth, with centers in
    the residue representatives; ``top`` (a negative exponent) adds D(0; top)."""
    pts = [TypeIIPoint.gauss(field)]
    for k in range(1, depth + 1):
        pts.extend(TypeIIPoint(field, b, k) for b in field.residue_reps(0, k))
    if top is not None:
        pts.append(TypeIIPoint(field, field.zero, Fraction(top)))
    return FiniteTree.from_points(pts)


# --------------------------------------------------------------------------
# measures on finite trees


class TreeMeasure:
    """Signed rational masses on points of a finite tree (vertices or edge points)."""

    __slots__ = ("tree", "masses", "total")

    def __init__(self, tree: FiniteTree, masses=None, total=None):
        clean = {}
        for pt, mass in (masses or {}).items():
            mass = Fraction(mass)
            if mass:
                clean[pt] = clean.get(pt, Fraction(0)) + mass
        clean = {k: v for k, v in clean.items() if v}
        s = sum(clean.values(), Fraction(0))
        if total is None:
            total = s
        elif Fraction(total) != s:
            raise ValueError(f"masses sum to {s}, declared total {total}")
        self.tree = tree
        self.masses = clean
        self.total = Fraction(total)

    @classmethod
    def dirac(cls, tree: FiniteTree, x, mass=1) -> "TreeMeasure":
        return cls(tree, {tree.retract(x): mass})

    def mass_at(self, pt) -> Fraction:
        return self.masses.get(pt, Fraction(0))

    def _check(self, other: "TreeMeasure"):
        if self.tree != other.tree:
            raise TreeMismatch("measures live on different trees")

    def __add__(self, other: "TreeMeasure") -> "TreeMeasure":
        self._check(other)
        out = dict(self.masses)
        for k, v in other.masses.items():
            out[k] = out.get(k, Fraction(0)) + v
        return TreeMeasure(self.tree, out)

    def __neg__(self):
        return TreeMeasure(self.tree, {k: -v for k, v in self.masses.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TreeMeasure":
        c = Fraction(c)
        return TreeMeasure(self.tree, {k: c * v for k, v in self.masses.items()})

    def __eq__(self, other):
        if not isinstance(other, TreeMeasure):
            return NotImplemented
        return self.tree == other.tree and self.masses == other.masses

    def push_to(self, tree: FiniteTree) -> "TreeMeasure":
        """Push forward along the retraction onto a (coarser) tree."""
        out: dict = {}
        for k, v in self.masses.items():
            r = tree.retract(k)
            out[r] = out.get(r, Fraction(0)) + v
        return TreeMeasure(tree, out)

    def items(self):
        return sorted(self.masses.items(), key=lambda kv: kv[0].sort_key())

    def to_json(self) -> dict:
        return {
            "total": str(self.total),
            "masses": {str(k): str(v) for k, v in self.items()},
        }

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in self.items())
        return f"TreeMeasure({{{inner}}})"


def tv_distance(mu: TreeMeasure, nu: TreeMeasure) -> Fraction:
    """Half the total variation of mu - nu; both must be probability measures."""
    if mu.tree != nu.tree:
        raise TreeMismatch("measures live on different trees")
    if mu.total != 1 or nu.total != 1:
        raise ValueError("total variation distance needs probability measures")
    keys = set(mu.masses) | set(nu.masses)
    return sum((abs(mu.mass_at(k) - nu.mass_at(k)) for k in keys), Fraction(0)) / 2
