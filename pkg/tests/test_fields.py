"""Field arithmetic, canonical forms, parsing, and derivation laws."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rankderiv import (
    DomainError,
    FieldDerivation,
    UsageError,
    derive,
    eval_arith,
    inv,
    parse_field,
)


def q_elements():
    return st.fractions(min_value=-10, max_value=10, max_denominator=40)


def fp_elements(p):
    return st.integers(min_value=0, max_value=p - 1)


def qt_elements():
    """Small rational functions num/den over Q(t)."""
    field = parse_field("Q(t)")
    coeff = st.integers(min_value=-4, max_value=4)
    polys = st.lists(coeff, min_size=1, max_size=3)

    def build(num, den):
        d = field.from_poly(den)
        if d == field.zero:
            d = field.one
        return field.div(field.from_poly(num), d)

    return st.builds(build, polys, polys)


# -- worked examples -----------------------------------------------------------

def test_arith_examples(F7, Q, Qt):
    assert eval_arith(F7, 3, 5, "mul") == 1
    assert eval_arith(Q, Fraction(2, 3), Fraction(2, 3), "div") == Fraction(1)
    t_plus = Qt.parse("t+1")
    t_minus = Qt.parse("t-1")
    assert eval_arith(Qt, t_plus, t_minus, "mul") == Qt.parse("t^2-1")


def test_inverse_examples(F7, Q):
    assert inv(F7, 3) == 5
    assert inv(Q, Fraction(2, 3)) == Fraction(3, 2)
    with pytest.raises(DomainError):
        inv(F7, 0)
    with pytest.raises(DomainError):
        inv(Q, Fraction(0))


def test_division_by_zero(F7, Q, Qt):
    for field, a in ((F7, 3), (Q, Fraction(1)), (Qt, Qt.gen)):
        with pytest.raises(DomainError):
            eval_arith(field, a, field.zero, "div")


def test_derive_examples(Qt):
    t = Qt.gen
    ddt = FieldDerivation.scaled_dt(Qt, Qt.one)
    assert derive(ddt, t) == Qt.one
    assert derive(ddt, Qt.mul(t, t)) == Qt.parse("2*t")
    assert derive(ddt, Qt.one) == Qt.zero
    zero = FieldDerivation.zero(Qt)
    assert derive(zero, Qt.one) == Qt.zero


def test_field_spec_parsing():
    assert parse_field("Q").spec() == "Q"
    assert parse_field("F7").spec() == "F7"
    assert parse_field("Q(t)").spec() == "Q(t)"
    assert parse_field("F5(t)").spec() == "F5(t)"
    with pytest.raises(UsageError):
        parse_field("F4")  # not prime
    with pytest.raises(UsageError):
        parse_field("R")


def test_field_mismatch_is_usage_error(F7, Q):
    with pytest.raises(UsageError):
        eval_arith(F7, Fraction(1, 2), 3, "add")
    with pytest.raises(UsageError):
        eval_arith(Q, 1, Fraction(1), "add")


def test_t_rejected_outside_function_fields(Q, F7):
    with pytest.raises(UsageError):
        Q.parse("t+1")
    with pytest.raises(UsageError):
        F7.parse("t")


# -- algebraic laws (sampled) -------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(a=q_elements(), b=q_elements(), c=q_elements())
def test_q_field_laws(a, b, c):
    field = parse_field("Q")
    assert field.mul(field.add(a, b), c) == field.add(field.mul(a, c), field.mul(b, c))
    assert field.add(a, b) == field.add(b, a)
    assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))


@settings(max_examples=200, deadline=None)
@given(a=fp_elements(7), b=fp_elements(7), c=fp_elements(7))
def test_f7_field_laws(a, b, c):
    field = parse_field("F7")
    assert field.mul(field.add(a, b), c) == field.add(field.mul(a, c), field.mul(b, c))
    assert field.add(a, b) == field.add(b, a)
    assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
    if a != 0:
        assert field.mul(a, field.inv(a)) == 1


@settings(max_examples=200, deadline=None)
@given(a=qt_elements(), b=qt_elements(), c=qt_elements())
def test_qt_field_laws(a, b, c):
    field = parse_field("Q(t)")
    assert field.mul(field.add(a, b), c) == field.add(field.mul(a, c), field.mul(b, c))
    assert field.add(a, b) == field.add(b, a)
    assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
    if a != field.zero:
        assert field.mul(a, field.inv(a)) == field.one


@settings(max_examples=200, deadline=None)
@given(a=qt_elements(), b=qt_elements())
def test_qt_canonical_idempotent(a, b):
    field = parse_field("Q(t)")
    for value in (field.add(a, b), field.mul(a, b)):
        assert field.canonical(value) == value


@settings(max_examples=200, deadline=None)
@given(a=qt_elements())
def test_qt_format_parse_round_trip(a):
    field = parse_field("Q(t)")
    text = field.format(a)
    assert " " not in text
    assert field.parse(text) == a


@settings(max_examples=200, deadline=None)
@given(a=q_elements())
def test_q_format_parse_round_trip(a):
    field = parse_field("Q")
    assert field.parse(field.format(a)) == a


# -- derivation laws -----------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(a=qt_elements(), b=qt_elements(), c=q_elements())
def test_scaled_dt_is_a_derivation(a, b, c):
    field = parse_field("Q(t)")
    mu = FieldDerivation.scaled_dt(field, field.from_poly([c]))
    assert mu(field.add(a, b)) == field.add(mu(a), mu(b))
    lhs = mu(field.mul(a, b))
    rhs = field.add(field.mul(a, mu(b)), field.mul(mu(a), b))
    assert lhs == rhs
    assert mu(field.one) == field.zero


def test_only_zero_derivation_over_q_and_fp(Q, F7):
    with pytest.raises(UsageError):
        FieldDerivation.scaled_dt(Q, Fraction(1))
    with pytest.raises(UsageError):
        FieldDerivation.scaled_dt(F7, 1)
    assert FieldDerivation.zero(Q).is_zero()
    assert FieldDerivation.zero(F7)(3) == 0


def test_derivation_normalization(Qt, F3):
    assert FieldDerivation.scaled_dt(Qt, Qt.zero).is_zero()
    table = {a: 0 for a in F3.elements()}
    assert FieldDerivation.from_table(F3, table).is_zero()


def test_fp_canonical_idempotent(F7):
    rng = random.Random(20)
    for _ in range(200):
        a, b = rng.randrange(7), rng.randrange(7)
        v = F7.mul(a, b)
        assert F7.canonical(v) == v
        assert 0 <= v < 7
