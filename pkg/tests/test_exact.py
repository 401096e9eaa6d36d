from fractions import Fraction

import pytest

from ultraqs.errors import FormatError
from ultraqs.exact import Radical, compare, make_power, parse_rational, rational_power


@pytest.mark.parametrize("text,value", [("0", 0), ("3", 3), ("-2", -2), ("1/3", Fraction(1, 3)), ("5/2", Fraction(5, 2))])
def test_parse_canonical(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["2/4", "3/1", "-0", "03", "+1", "1.5", " 1", "1/0", "", "a"])
def test_parse_rejects_non_canonical(text):
    with pytest.raises(FormatError):
        parse_rational(text)


def test_parse_rejects_floats_and_bools():
    with pytest.raises(FormatError):
        parse_rational(1.5)
    with pytest.raises(FormatError):
        parse_rational(True)
    assert parse_rational(7) == 7


@pytest.mark.parametrize(
    "base,exp,expected",
    [(Fraction(9), Fraction(1, 2), Fraction(3)), (Fraction(4, 9), Fraction(3, 2), Fraction(8, 27)), (Fraction(2), Fraction(1, 2), None)],
)
def test_rational_power(base, exp, expected):
    assert rational_power(base, exp) == expected


def test_make_power_collapses_rational_results():
    assert make_power(2, Fraction(1, 4), Fraction(1, 2)) == Fraction(1)
    assert isinstance(make_power(1, Fraction(3), Fraction(1, 2)), Radical)


def test_radical_ordering_against_decimal_brackets():
    root3 = make_power(1, Fraction(3), Fraction(1, 2))
    assert Fraction(173, 100) < root3 < Fraction(174, 100)
    assert compare(root3 * root3.coef, root3) == 0
    assert 1 / root3 < Fraction(58, 100)
    assert root3 == make_power(1, Fraction(9), Fraction(1, 4))
    assert abs(float(root3) - 3**0.5) < 1e-12
