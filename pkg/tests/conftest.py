from fractions import Fraction

import pytest
from hypothesis import strategies as st

from berklab.dynamics import RationalMap, load_map_spec
from berklab.fields import FptField, QpField

Q3 = QpField(3)
F2T = FptField(2)


def qmap(num, den=("1",), p=3) -> RationalMap:
    return load_map_spec({"field": {"kind": "Qp", "p": p}, "numerator": list(num), "denominator": list(den)})


def fmap(num, den=("1",), p=2) -> RationalMap:
    return load_map_spec({"field": {"kind": "Fpt", "p": p}, "numerator": list(num), "denominator": list(den)})


@pytest.fixture
def z2_third():
    return qmap(["1/3", "0", "1"])


@pytest.fixture
def z2():
    return qmap(["0", "0", "1"])


@pytest.fixture
def z_plus_z2():
    return fmap(["0", "1", "1"])


def p_heavy_ints(p: int):
    """Integers with a bias toward high p-adic valuation."""
    return st.builds(lambda u, k: u * p ** k, st.integers(-50, 50), st.integers(0, 6))


def q_elements(p: int = 3):
    return st.builds(lambda a, b, e: Fraction(a, b) * Fraction(p) ** e,
                     st.integers(-40, 40), st.integers(1, 40), st.integers(-4, 4))


def fpt_elements(field: FptField = F2T):
    p = field.p
    polys = st.lists(st.integers(0, p - 1), min_size=1, max_size=6)
    nonzero = polys.filter(lambda c: any(c))
    return st.builds(lambda n, d: field.poly(n) / field.poly(d), polys, nonzero)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
