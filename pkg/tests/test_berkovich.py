from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from berklab.berkovich import (
    INF_POINT,
    Direction,
    FiniteTree,
    TreeMeasure,
    TypeIIPoint,
    chordal,
    format_point,
    from_inverted,
    gauss_seminorm,
    hyperbolic_distance,
    join,
    parse_point,
    tv_distance,
    unit_tree,
)
from berklab.errors import InvalidProjectivePoint, ParseError, TreeMismatch
from berklab.fields import is_inf
from berklab.poly import Poly

from conftest import F2T, Q3, q_elements

Fr = Fraction
G = TypeIIPoint.gauss(Q3)


def D(a, m, field=Q3):
    return TypeIIPoint(field, field.coerce(a), Fr(m))


def points(max_m=4):
    return st.builds(lambda a, m: D(a, m), q_elements(), st.fractions(-max_m, max_m, max_denominator=3))


def test_canonical_centers():
    assert D(10, 2) == D(1, 2)
    assert D(Fr(1, 3) + 9, 1) == D(Fr(1, 3), 1)
    assert D(7, 0) == G
    assert G.is_gauss
    assert hash(D(10, 2)) == hash(D(1, 2))


def test_gauss_seminorm_examples():
    z = Poly(Q3, [Fr(0), Fr(1)])
    assert gauss_seminorm(z, G) == 0
    assert gauss_seminorm(z, D(0, 1)) == 1
    assert gauss_seminorm(Poly(Q3, [Fr(1), Fr(0), Fr(3)]), G) == 0
    assert gauss_seminorm(Poly(Q3, [Fr(1), Fr(1)]), D(-1, 2)) == 2


@given(points(), st.lists(q_elements(), min_size=1, max_size=4), st.lists(q_elements(), min_size=1, max_size=4))
def test_seminorm_multiplicative(S, a, b):
    A, B = Poly(Q3, a), Poly(Q3, b)
    if not A or not B:
        return
    assert gauss_seminorm(A * B, S) == gauss_seminorm(A, S) + gauss_seminorm(B, S)


@given(points(), st.lists(q_elements(), min_size=1, max_size=4), st.lists(q_elements(), min_size=1, max_size=4))
def test_seminorm_ultrametric(S, a, b):
    A, B = Poly(Q3, a), Poly(Q3, b)
    if not (A + B):
        return
    assert gauss_seminorm(A + B, S) >= min(gauss_seminorm(A, S), gauss_seminorm(B, S))


def test_join_examples():
    assert join(D(0, 2), D(1, 2)) == G
    assert join(D(0, 2), D(3, 2)) == D(0, 1)
    assert join(D(1, 2), G) == G


@given(points(), points())
def test_join_is_least_upper_bound(S, T):
    J = join(S, T)
    assert S <= J and T <= J
    assert join(T, S) == J
    assert hyperbolic_distance(S, T) == hyperbolic_distance(S, J) + hyperbolic_distance(J, T)


@given(points(), points(), points())
def test_hyperbolic_triangle(S, T, U):
    assert hyperbolic_distance(S, U) <= hyperbolic_distance(S, T) + hyperbolic_distance(T, U)


def test_distance_examples():
    assert hyperbolic_distance(G, D(0, 2)) == 2
    assert hyperbolic_distance(D(0, 1), D(3, 2)) == 1
    assert hyperbolic_distance(D(5, 1), D(5, 1)) == 0


def test_chordal_examples():
    assert chordal(Q3, (1, 1), (0, 1)) == 0
    assert chordal(Q3, Fr(3), Fr(0)) == 1
    assert is_inf(chordal(Q3, Fr(2), Fr(2)))
    assert chordal(Q3, INF_POINT, Fr(1, 3)) == 1
    with pytest.raises(InvalidProjectivePoint):
        chordal(Q3, (0, 0), (1, 1))


@given(q_elements(), q_elements(), q_elements())
def test_chordal_ultrametric(x, y, z):
    a, b, c = chordal(Q3, x, y), chordal(Q3, y, z), chordal(Q3, x, z)
    assert c >= min(a, b)
    assert chordal(Q3, x, y) == chordal(Q3, y, x) >= 0


@given(points())
def test_inverted_round_trip(S):
    b, m = S.inverted_form()
    assert from_inverted(Q3, b, m) == S
    assert parse_point(Q3, format_point(S, "inverted")) == S
    assert parse_point(Q3, format_point(S)) == S


def test_inverted_examples():
    assert D(0, 1).inverted_form() == (Fr(0), Fr(-1))
    assert from_inverted(Q3, 0, 0) == G
    assert from_inverted(Q3, 3, 2) == D(Fr(1, 3), 0)
    assert from_inverted(Q3, 3, 5) == D(Fr(1, 3), 3)


def test_point_parse_errors():
    with pytest.raises(ParseError):
        parse_point(Q3, "D(1, 2)")
    with pytest.raises(ParseError):
        parse_point(Q3, "D(1; x)")


def test_char_p_points():
    t = F2T.parse("t")
    S = TypeIIPoint(F2T, t + F2T.parse("t^3"), Fr(2))
    assert S == TypeIIPoint(F2T, t, Fr(2))
    assert str(S) == "D(t; 2)"


def test_directions():
    assert Direction(G, Fr(1)) == Direction(G, Fr(4))
    assert Direction(G, Fr(1)) != Direction(G, Fr(2))
    assert Direction(G, D(1, 3)) == Direction(G, Fr(1))
    assert Direction(G, INF_POINT) == Direction(G, D(0, -2))
    assert Direction(G, INF_POINT) != Direction(G, Fr(0))
    with pytest.raises(ValueError):
        Direction(G, G)


def test_tree_structure():
    T = FiniteTree.from_points([D(0, 2), D(1, 2)])
    assert G in T.vertices  # join closure
    assert T.root == G
    assert sorted(c.m for c, _, _ in T.edges()) == [2, 2]
    U = unit_tree(Q3, 2)
    assert len(U) == 1 + 3 + 9
    assert all(length == 1 for _, _, length in U.edges())


def test_retract_examples():
    T = FiniteTree.from_points([G, D(0, 1)])
    assert T.retract(D(0, 1)) == D(0, 1)
    assert T.retract(Fr(0)) == D(0, 1)
    assert T.retract(Fr(1)) == G
    assert T.retract(INF_POINT) == G
    assert T.retract(Fr(1, 3)) == G
    deep = FiniteTree.from_points([D(0, -1), D(0, 2)])
    assert deep.retract(Fr(1)) == G  # lands inside the edge
    assert deep.retract(D(3, 4)) == D(0, 1)


@given(points(3), points(3), points(3))
def test_retract_lands_on_tree(A, B, X):
    T = FiniteTree.from_points([A, B])
    R = T.retract(X)
    assert T.contains_point(R)
    assert T.retract(R) == R


def test_tree_measure_conservation():
    T = unit_tree(Q3, 1)
    mu = TreeMeasure(T, {G: Fr(1, 2), D(1, 1): Fr(1, 2)})
    assert mu.total == 1
    with pytest.raises(ValueError):
        TreeMeasure(T, {G: 1}, total=2)
    nu = TreeMeasure.dirac(T, Fr(2))
    assert nu.mass_at(D(2, 1)) == 1
    assert (mu + nu).total == 2
    assert (mu - mu).masses == {}


def test_tv_distance():
    T = unit_tree(Q3, 1)
    a, b = TreeMeasure.dirac(T, G), TreeMeasure.dirac(T, D(1, 1))
    assert tv_distance(a, a) == 0
    assert tv_distance(a, b) == 1 == tv_distance(b, a)
    with pytest.raises(TreeMismatch):
        tv_distance(a, TreeMeasure.dirac(unit_tree(Q3, 2), G))
    with pytest.raises(ValueError):
        tv_distance(a + b, a)


def test_push_to_coarser_tree():
    fine = unit_tree(Q3, 2)
    coarse = unit_tree(Q3, 1)
    mu = TreeMeasure.dirac(fine, D(4, 2))
    assert mu.push_to(coarse) == TreeMeasure.dirac(coarse, D(1, 1))
