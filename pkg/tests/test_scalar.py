
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilflow.scalar import (
    GOLDEN,
    ParseError,
    QuadraticContext,
    QuadraticNumber,
    floor_mod1,
    parse_scalar,
)

LAM = GOLDEN.lam

CONTEXTS = [GOLDEN, QuadraticContext(3, 1), QuadraticContext(2, -1),
            QuadraticContext(4, -3)]


def qn(a, b, ctx=GOLDEN):
    return QuadraticNumber(Fraction(a), Fraction(b), ctx)


def mp_value(x: QuadraticNumber):
    t, d = x.ctx.trace, x.ctx.det
    root = (t + mpmath.sqrt(t * t - 4 * d)) / 2
    return mpmath.mpf(x.a.numerator) / x.a.denominator + (
        mpmath.mpf(x.b.numerator) / x.b.denominator
    ) * root


def test_context_rejects_square_discriminant():
    with pytest.raises(ValueError):
        QuadraticContext(3, 2)  # disc 1
    with pytest.raises(ValueError):
        QuadraticContext(2, 1)  # disc 0
    with pytest.raises(ValueError):
        QuadraticContext(0, 1)  # disc negative


def test_defining_relation():
    assert LAM * LAM == 1 + LAM


def test_division_by_golden():
    assert 1 / LAM == LAM - 1


def test_conjugation():
    assert LAM.conjugate() == 1 - LAM
    x = qn(Fraction(3, 2), Fraction(-5, 7))
    y = qn(Fraction(-2, 3), Fraction(1, 4))
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert x * x.conjugate() == x.field_norm()


def test_division_errors():
    with pytest.raises(ZeroDivisionError):
        LAM / qn(0, 0)
    other = QuadraticContext(2, -1)
    with pytest.raises(ValueError):
        LAM + other.lam


def test_sign_examples():
    assert (2 * LAM - 3).sign() == 1
    assert qn(0, 0).sign() == 0
    assert (1 - LAM).sign() == -1


def test_sign_multiplicative():
    rng = random.Random(5)
    for ctx in CONTEXTS:
        for _ in range(250):
            x = QuadraticNumber(Fraction(rng.randrange(-9, 10)),
                                Fraction(rng.randrange(-9, 10)), ctx)
            y = QuadraticNumber(Fraction(rng.randrange(-9, 10)),
                                Fraction(rng.randrange(-9, 10)), ctx)
            assert (x * y).sign() == x.sign() * y.sign()


def test_floor_examples():
    assert LAM.floor() == 1
    assert LAM.frac() == LAM - 1
    assert (-LAM).floor() == -2
    assert floor_mod1(Fraction(3, 2)) == (1, Fraction(1, 2))


def test_floor_bracketing():
    rng = random.Random(6)
    for ctx in CONTEXTS:
        for _ in range(200):
            x = QuadraticNumber(Fraction(rng.randrange(-400, 400), 37),
                                Fraction(rng.randrange(-400, 400), 41), ctx)
            n = x.floor()
            assert (x - n).sign() >= 0
            assert (x - (n + 1)).sign() < 0


def test_to_float_certified():
    v, err = LAM.to_float()
    assert abs(v - 1.618033988749895) < 1e-15
    assert err < 1e-15
    assert qn(0, 0).to_float() == (0.0, 0.0)
    v2, _ = (2 - LAM).to_float()
    assert abs(v2 - 0.3819660113) < 1e-9


def test_to_float_against_mpmath():
    mpmath.mp.dps = 60
    rng = random.Random(7)
    for ctx in CONTEXTS:
        for _ in range(50):
            x = QuadraticNumber(Fraction(rng.randrange(-500, 500), 13),
                                Fraction(rng.randrange(-500, 500), 17), ctx)
            v, err = x.to_float()
            assert abs(mp_value(x) - v) <= err


def test_to_float_precision_floor():
    with pytest.raises(ValueError):
        LAM.to_float(precision=16)


def test_field_axioms_random():
    rng = random.Random(8)
    for ctx in CONTEXTS:
        for _ in range(1000):
            def r():
                return QuadraticNumber(Fraction(rng.randrange(-50, 51), 7),
                                       Fraction(rng.randrange(-50, 51), 5), ctx)
            x, y, z = r(), r(), r()
            assert (x + y) + z == x + (y + z)
            assert x * y == y * x
            assert x * (y + z) == x * y + x * z
            if x.sign() != 0:
                assert x * (1 / x) == 1


@settings(max_examples=150)
@given(
    a1=st.integers(-30, 30), b1=st.integers(-30, 30),
    a2=st.integers(-30, 30), b2=st.integers(-30, 30),
)
def test_multiplication_matches_mpmath_sign(a1, b1, a2, b2):
    x, y = qn(a1, b1), qn(a2, b2)
    z = x * y
    approx = float(x) * float(y)
    if abs(approx) > 1e-6:
        assert z.sign() == (1 if approx > 0 else -1)


def test_parse_round_trip():
    for text in ["3/2-1*l", "0+1*l", "-5/7+2/3*l", "l", "-l", "4"]:
        value = parse_scalar(text, GOLDEN)
        if isinstance(value, QuadraticNumber):
            assert parse_scalar(str(value), GOLDEN) == value
    assert parse_scalar("2/3") == Fraction(2, 3)
    with pytest.raises(ParseError):
        parse_scalar("", GOLDEN)
    with pytest.raises(ParseError):
        parse_scalar("2**l", GOLDEN)
    with pytest.raises(ParseError):
        parse_scalar("l", None)


def test_ordering_is_exact_near_ties():
    # 2 - lam versus 1/phi^2: equal, so neither strict inequality holds
    x = 2 - LAM
    y = (LAM - 1) * (LAM - 1)
    assert x == y
    assert not x < y and not x > y
    # lam against close rationals from its convergents
    assert LAM > Fraction(987, 610)
    assert LAM < Fraction(1597, 987)
