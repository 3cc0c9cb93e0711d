from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from berklab.berkovich import FiniteTree, TreeMeasure, TypeIIPoint, unit_tree
from berklab.dynamics import RationalMap, iterate, map_typeII
from berklab.errors import DiskContainsZeroAndPole, IdenticallyEqual, InsufficientResolution, ToleranceUnreachable
from berklab.measures import divisor_poly, retract_divisor
from berklab.poly import Form
from berklab.potential import (
    ScaledT,
    apriori_sequence,
    chordal_can,
    green,
    green_bound,
    green_direct,
    green_series,
    log_max_one,
    rootsnormalized_potential,
    t_h,
    tree_laplacian,
)

from conftest import Q3, q_elements, qmap

Fr = Fraction
G = TypeIIPoint.gauss(Q3)


def D(a, m):
    return TypeIIPoint(Q3, Fr(a), Fr(m))


def points(lo=-3, hi=3):
    return st.builds(D, q_elements(), st.fractions(lo, hi, max_denominator=2))


def test_t_h_examples(z2, z2_third):
    assert t_h(z2, G) == 0
    assert t_h(z2_third, G) == 1
    assert t_h(z2_third, D(0, 1)) == 1
    assert t_h(z2_third, D(0, -3)) == 0


@given(points())
def test_t_h_chart_independent(S):
    f = qmap(["1/3", "2", "1"], ["9", "0", "1/3"])
    assert t_h(f, S) == t_h(f, S, "inverted")


@given(points())
def test_scaled_t_matches_t_h(S):
    f = qmap(["1/3", "0", "1"])
    assert ScaledT(f, Fr(1, 2))(S) == t_h(f, S) / 2


@given(points())
@settings(max_examples=40)
def test_t_f_within_resultant_bound(S):
    """Numerical pre-check of the bound -v(Res) <= T <= 0 for the normalised lift."""
    f = qmap(["1/3", "0", "1"])
    normalised = RationalMap(f.F0, f.F1, Fr(0))
    assert -4 <= t_h(normalised, S) <= 0


@given(points(-2, 2))
@settings(max_examples=30)
def test_telescoping_identity(S):
    f = qmap(["1/3", "0", "1"])
    for n in (1, 2, 3):
        try:
            image = map_typeII(iterate(f, n), S)
        except DiskContainsZeroAndPole:
            continue
        assert t_h(iterate(f, n + 1), S) == t_h(f, image) + 2 * t_h(iterate(f, n), S)


def test_green_good_reduction_exact(z2):
    for S in unit_tree(Q3, 2).vertices:
        approx = green(z2, S, Fr(1, 10 ** 6))
        assert approx.value == 0 and approx.n_used == 1 and approx.bound == 0


def test_green_z2_third(z2_third):
    approx = green(z2_third, G, Fr(1, 100))
    assert approx.value == Fr(1, 2)
    assert approx.series_checked
    assert abs(approx.value - green_direct(z2_third, G, 8)) <= approx.bound


def test_green_bound_monotone(z2_third):
    a = green(z2_third, G, Fr(1, 50))
    b = green(z2_third, G, Fr(1, 100))
    assert b.n_used >= a.n_used
    assert green_bound(z2_third, 3) == Fr(3, 8)
    with pytest.raises(ToleranceUnreachable):
        green(z2_third, G, Fr(1, 10 ** 9), n_max=10)


def test_green_series_agrees_where_defined():
    f = qmap(["1", "0", "0", "1"], ["0", "3"])  # (z^3 + 1) / (3z)
    S = D(1, 2)
    assert green_series(f, S, 4) == green_direct(f, S, 4)
    with pytest.raises(DiskContainsZeroAndPole):
        green_series(qmap(["0", "0", "1"], ["-1", "0", "1"]), G, 2)


def test_chordal_can_examples(z2, z2_third):
    g = RationalMap.identity(Q3)
    with pytest.raises(IdenticallyEqual):
        chordal_can(g, g, G)
    assert chordal_can(z2, g, G) == 0
    assert chordal_can(z2_third, g, G) == 0
    # at |z| = 3^{1/2} the wedge 3z^2 + 1 - 3z cancels: [f, z] < 1 there
    assert chordal_can(z2_third, g, D(0, Fr(-1, 2))) == -Fr(1, 2)


@given(points(), q_elements(), q_elements())
@settings(max_examples=40)
def test_chordal_can_scale_invariant_and_nonpositive(S, c1, c2):
    if not c1 or not c2:
        return
    f = qmap(["1/3", "0", "1"])
    g = qmap(["2", "1"], ["1", "3"])
    base = chordal_can(f, g, S)
    assert base <= 0
    f2 = RationalMap.from_lift(f.F0 * c1, f.F1 * c1)
    g2 = RationalMap.from_lift(g.F0 * c2, g.F1 * c2)
    assert chordal_can(f2, g2, S) == base
    assert chordal_can(f, g, S, "inverted") == base


def test_laplacian_log_max():
    T = FiniteTree.from_points([D(0, -1), G, D(0, 2)])
    lap = tree_laplacian(log_max_one, T)
    assert lap == TreeMeasure.dirac(T, G) - TreeMeasure.dirac(T, D(0, -1))


def test_laplacian_constant_is_zero():
    lap = tree_laplacian(lambda S: Fr(7), unit_tree(Q3, 2))
    assert lap.masses == {}


def test_laplacian_finds_edge_breakpoints():
    # |z - 3^{3/2}|-type kink at m = 5/3 inside the edge [Gauss, D(0; 3)]
    T = FiniteTree.from_points([G, D(0, 3)])
    lap = tree_laplacian(lambda S: -min(S.m, Fr(5, 3)), T)
    assert lap.masses == {G: -1, D(0, Fr(5, 3)): 1}


def test_laplacian_mapping_input_missing_value():
    T = FiniteTree.from_points([G, D(0, 1)])
    with pytest.raises(InsufficientResolution):
        tree_laplacian({G: 0, D(0, 1): 1}, T)


def test_laplacian_concave_edge():
    T = FiniteTree.from_points([G, D(0, 4)])
    lap = tree_laplacian(lambda S: min(S.m, Fr(7, 2)) * 2, T)
    assert lap.masses == {G: 2, D(0, Fr(7, 2)): -2}


def test_laplacian_extra_point_splits_edge():
    # two-signed on the open edge: allowed once the sign change is a declared cut
    T = FiniteTree.from_points([G, D(0, 4)])
    zigzag = lambda S: abs(S.m - 1) - abs(S.m - 3)  # noqa: E731
    lap = tree_laplacian(zigzag, T, extra_points=[D(0, 2)])
    assert lap.masses == {D(0, 1): 2, D(0, 3): -2}


def test_green_laplacian_is_mu_minus_gauss(z2_third):
    T = unit_tree(Q3, 2, top=-1)
    n = 6
    lap = tree_laplacian(ScaledT(iterate(z2_third, n), Fr(1, 2 ** n)), T, extra_points=[G])
    assert lap == TreeMeasure.dirac(T, D(0, Fr(-1, 2))) - TreeMeasure.dirac(T, G)


@pytest.mark.parametrize("top", [None, -2])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_roots_normalized_identity(z2_third, n, top):
    g = RationalMap.identity(Q3)
    T = unit_tree(Q3, 2, top=top)
    lhs = tree_laplacian(rootsnormalized_potential(iterate(z2_third, n), g), T, extra_points=[G])
    Dv = divisor_poly(z2_third, g, n)
    rhs = retract_divisor(Dv, T) - TreeMeasure.dirac(T, G, 2 ** n + 1)
    assert lhs == rhs


def test_roots_normalized_identity_mobius_g():
    f = qmap(["1", "0", "-1", "1"], ["2", "0", "1"], p=2)
    g = qmap(["1", "2"], ["1", "4"], p=2)
    K = f.field
    gauss = TypeIIPoint.gauss(K)
    T = FiniteTree.from_points([TypeIIPoint(K, K.coerce(b), Fr(3)) for b in range(8)]
                               + [TypeIIPoint(K, K.zero, Fr(-2))])
    for n in (1, 2):
        lhs = tree_laplacian(rootsnormalized_potential(iterate(f, n), g), T, extra_points=[gauss])
        Dv = divisor_poly(f, g, n)
        assert lhs == retract_divisor(Dv, T) - TreeMeasure.dirac(T, gauss, Dv.degree)


def test_apriori_sequence(z2_third):
    g = RationalMap.identity(Q3)
    samples = unit_tree(Q3, 2).sorted_vertices()
    seq = apriori_sequence(z2_third, g, samples, 6)
    assert [n for n, _ in seq] == list(range(1, 7))
    assert all(s <= 0 for _, s in seq)
    off = [D(0, Fr(-1, 2)), D(1, -1)]
    seq2 = apriori_sequence(z2_third, g, off, 5)
    assert seq2[0][1] == Fr(-1, 6)
    assert all(b[1] >= a[1] for a, b in zip(seq2, seq2[1:]))


def test_apriori_g_equals_f(z2_third):
    with pytest.raises(IdenticallyEqual):
        apriori_sequence(z2_third, z2_third, [G], 3)
    seq = apriori_sequence(z2_third, z2_third, [G], 3, n_min=2)
    assert [n for n, _ in seq] == [2, 3]


def test_apriori_preconditions(z2_third):
    g = RationalMap.identity(Q3)
    with pytest.raises(ValueError):
        apriori_sequence(z2_third, g, [], 3)
    with pytest.raises(ValueError):
        apriori_sequence(z2_third, g, [G], 3, region=D(0, 1))
