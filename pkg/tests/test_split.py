import math

import pytest
from hypothesis import given, settings, strategies as st

from pforge.algebra import Cyclotomic, QQ, RatFunc, register, zeta
from pforge.exprio import parse
from pforge.split import (
    CyclicFunctionField,
    DiagonalAlgebraElement,
    MultisetPoint,
    corrected_witness,
    diagonal_nrd,
    distinct_eigenvalues,
    nrd_report,
    sb_split_map,
    stated_example,
    sympower_census,
)

register("b", "c")


def test_census_p3_counts():
    rep = sympower_census(3)
    assert rep.counts == {"tuples": 27, "off_diagonal": 6, "multisets": 10,
                          "reduced_classes": 1, "fiber_over_reduced": 3}
    assert rep.u_class == (1, 2, 3)
    assert rep.passed


@pytest.mark.parametrize("p", [2, 3, 5])
def test_census_matches_closed_forms(p):
    rep = sympower_census(p)
    assert rep.passed
    assert rep.counts["multisets"] == math.comb(2 * p - 1, p)
    assert sorted(n for n, _ in rep.fiber) == list(range(1, p + 1))


@pytest.mark.long
def test_census_p7():
    rep = sympower_census(7)
    assert rep.passed and rep.counts["tuples"] == 7 ** 7


def test_census_rejects_composite_and_cap():
    with pytest.raises(ValueError):
        sympower_census(4)
    with pytest.raises(ValueError):
        sympower_census(7, cap=5)


def test_multiset_sum_is_sorted():
    m = MultisetPoint((3,)) + MultisetPoint((1, 2))
    assert m.labels == (1, 2, 3) and m.is_reduced()
    assert not MultisetPoint((1, 1)).is_reduced()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_split_map(p):
    rep = sb_split_map(p)
    assert rep.passed
    assert any(ch.startswith("equivariance") for ch in rep.checks)
    assert rep.images[0] == "1"


@pytest.mark.long
def test_split_map_p7():
    assert sb_split_map(7).passed


def test_cyclic_field_relations():
    L = CyclicFunctionField(3, "b")
    assert L.x(0) * L.x(1) * L.x(2) == RatFunc.var("b")
    assert L.act(L.x(2)) == L.x(0)
    assert L.act(L.x(0), 3) == L.x(0)


def test_stated_example_value():
    c = parse("c", 3)
    assert diagonal_nrd(stated_example(3)) == c * RatFunc.const(zeta(3, 2), 3)
    c5 = parse("c", 5)
    assert diagonal_nrd(stated_example(5)) == c5 * RatFunc.const(zeta(5, 3), 5)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_corrected_witness(p):
    w = corrected_witness(p)
    field = p if p > 2 else None
    assert diagonal_nrd(w) == parse("c", field)
    assert distinct_eigenvalues(w)


def test_p2_witness_entries():
    assert corrected_witness(2).entries == (parse("-c"), parse("-1"))


@pytest.mark.parametrize("p", [3, 5])
def test_nrd_report(p):
    rep = nrd_report(p)
    assert rep.passed
    assert rep.stated_equals_c is False
    assert rep.stated_value == rep.expected_stated_value


def test_diagonal_length_checked():
    with pytest.raises(ValueError):
        DiagonalAlgebraElement(3, (1, 2))


def _cyclo(p):
    coeff = st.fractions(max_denominator=4).map(lambda f: QQ(f.numerator, f.denominator))
    return st.lists(coeff, min_size=p - 1, max_size=p - 1).map(lambda cs: RatFunc.const(Cyclotomic(p, cs), p))


@pytest.mark.parametrize("p", [3, 5])
@settings(max_examples=15)
@given(data=st.data())
def test_nrd_is_multiplicative(p, data):
    d = DiagonalAlgebraElement(p, tuple(data.draw(_cyclo(p)) for _ in range(p)))
    e = DiagonalAlgebraElement(p, tuple(data.draw(_cyclo(p)) for _ in range(p)))
    assert diagonal_nrd(d * e) == diagonal_nrd(d) * diagonal_nrd(e)
