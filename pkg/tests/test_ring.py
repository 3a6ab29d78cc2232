from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcsdiag.ring import (
    CoeffPoly,
    ExchangeSymbol,
    Grading,
    TruncatedLaurent,
    canonical_string,
    j_degree,
    pairing,
    parse_canonical,
    series_mul,
    series_pow_int,
)

GR = Grading([(0, 1), (-1, 0)])


def unit(terms, order=6):
    return TruncatedLaurent.unit_from_terms(
        GR, order, {e: CoeffPoly.symbol(c) if isinstance(c, str) else CoeffPoly.rational(c)
                    for e, c in terms.items()})


# ---------------------------------------------------------------------------
# exchange symbols


def test_symbol_reciprocity_canonicalization():
    assert ExchangeSymbol(0, 1, 3).step == ExchangeSymbol(0, 2, 3).step == 1
    assert ExchangeSymbol(0, 1, 3).name == "a_{1,1}"
    with pytest.raises(ValueError):
        ExchangeSymbol(0, 0, 3)


# ---------------------------------------------------------------------------
# pairing


def test_pairing_dual_bases():
    assert pairing((1, 0), (1, 0), (1, 1)) == 1


def test_pairing_weighted_diagonal():
    for d in [(1, 1), (3, 1), (Fraction(1, 3), 2)]:
        for k in range(2):
            n = tuple(d[k] if i == k else 0 for i in range(2))
            f = tuple(1 if i == k else 0 for i in range(2))
            assert pairing(n, f, d) == 1


def test_pairing_orthogonal_and_mismatch():
    assert pairing((0, 1), (-1, 0), (1, 1)) == 0
    with pytest.raises(ValueError):
        pairing((1,), (1, 0), (1, 1))


# ---------------------------------------------------------------------------
# series arithmetic


def test_series_mul_square():
    f = unit({(0, 1): "a"})
    sq = series_mul(f, f)
    assert canonical_string(sq) == "1 + 2*a*z^(0,1) + a^2*z^(0,2)"


def test_series_mul_exponent_addition():
    m1 = TruncatedLaurent.monomial(GR, 6, (1, 0))
    m2 = TruncatedLaurent.monomial(GR, 6, (-1, 1))
    assert canonical_string(series_mul(m1, m2)) == "z^(0,1)"


def test_series_mul_identity():
    f = unit({(0, 1): "a", (0, 2): "a", (0, 3): 1})
    assert series_mul(f, TruncatedLaurent.one(GR, 6)) == f


def test_series_pow_geometric_inverse():
    f = unit({(0, 1): 1}, order=3)
    inv = series_pow_int(f, -1)
    assert canonical_string(inv) == "1 + -1*z^(0,1) + z^(0,2) + -1*z^(0,3)"


def test_series_pow_zero_and_cancel():
    f = unit({(0, 1): "a", (0, 2): "a", (0, 3): 1})
    assert series_pow_int(f, 0).is_unit()
    assert len(series_pow_int(f, 0).terms) == 1
    g = unit({(-1, 0): 1})
    assert series_mul(g, series_pow_int(g, -1)) == TruncatedLaurent.one(GR, 6)


def test_series_pow_nonunit_negative_rejected():
    m = TruncatedLaurent.monomial(GR, 6, (0, 1))
    with pytest.raises(ValueError):
        series_pow_int(m, -1)


# ---------------------------------------------------------------------------
# degree


def test_j_degree_generators_are_degree_one():
    assert j_degree(GR, (0, 1)) == 1
    assert j_degree(GR, (-1, 0)) == 1


def test_j_degree_solved_combination():
    # (-3,6) = 6*(0,1) + 3*(-1,0)
    assert j_degree(GR, (-3, 6)) == 9


def test_j_degree_zero_and_outside():
    assert j_degree(GR, (0, 0)) == 0
    with pytest.raises(ValueError):
        j_degree(GR, (1, 0))


def test_rational_degrees():
    g = Grading([(0, 3), (-1, 0)])
    assert j_degree(g, (-3, 2)) == Fraction(11, 3)


# ---------------------------------------------------------------------------
# canonical strings


def test_canonical_string_wall_function():
    f = unit({(0, 1): "a", (0, 2): "a", (0, 3): 1})
    assert canonical_string(f) == "1 + a*z^(0,1) + a*z^(0,2) + z^(0,3)"


def test_canonical_string_zero():
    assert canonical_string(CoeffPoly.zero()) == "0"


def test_canonical_string_collects():
    p = CoeffPoly.symbol("a").scale(2) + CoeffPoly.symbol("a")
    assert canonical_string(p) == "3*a"


def test_parse_canonical_round_trip():
    f = unit({(0, 1): "a", (0, 2): 2, (-1, 1): "b"})
    dim, terms = parse_canonical(canonical_string(f))
    assert dim == 2
    assert terms == f.terms


# ---------------------------------------------------------------------------
# truncation


def test_truncation_coherence():
    f = unit({(0, 1): "a", (-1, 0): 1}, order=6)
    g = unit({(0, 1): "a", (-1, 0): 1}, order=3)
    assert (f * f).truncate(3) == (g * g)


def test_truncation_drops_high_terms_eagerly():
    f = unit({(0, 1): 1}, order=2)
    cube = f * f * f
    assert (0, 3) not in cube.terms


def test_unit_constant_is_one():
    f = unit({(0, 1): "a"})
    assert f.is_unit() and f.constant().is_one()
    with pytest.raises(ValueError):
        TruncatedLaurent.unit_from_terms(GR, 4, {(0, 0): CoeffPoly.one()})


# ---------------------------------------------------------------------------
# property-based checks

names = st.sampled_from(["a", "b"])
monos = st.lists(st.tuples(names, st.integers(1, 2)), max_size=2).map(
    lambda l: tuple(sorted(dict(l).items())))
polys = st.dictionaries(monos, st.integers(-4, 4), max_size=3).map(CoeffPoly)


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p


tails = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda t: t != (0, 0)),
    st.integers(-3, 3), max_size=3)


def _tail_to_unit(tail, order=6):
    return TruncatedLaurent.unit_from_terms(
        GR, order,
        {(-b, a): CoeffPoly.rational(c) for (a, b), c in tail.items() if c})


@given(tails, st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=40, deadline=None)
def test_pow_additivity(tail, e1, e2):
    f = _tail_to_unit(tail)
    lhs = series_pow_int(f, e1 + e2)
    rhs = series_mul(series_pow_int(f, e1), series_pow_int(f, e2))
    assert lhs == rhs


@given(tails)
@settings(max_examples=40, deadline=None)
def test_truncate_commutes_with_mul(tail):
    f6 = _tail_to_unit(tail, 6)
    f3 = _tail_to_unit(tail, 3)
    assert (f6 * f6).truncate(3) == f3 * f3


@given(polys, polys)
@settings(max_examples=60, deadline=None)
def test_canonical_string_injective(p, q):
    if canonical_string(p) == canonical_string(q):
        assert p == q
