from fractions import Fraction

from random import Random

import pytest

from tmshift.rational import RadixRational


def test_canonical_form_strips_radix_factors():
    r = RadixRational(6, 2, radix=3)  # 6/9 = 2/3
    assert (r.num, r.exp) == (2, 1)
    assert RadixRational(0, 5, radix=3).exp == 0


def test_negative_exponent_normalizes():
    r = RadixRational(2, -2, radix=3)  # 2 * 9
    assert (r.num, r.exp) == (18, 0)


def test_rejects_even_or_small_radix():
    with pytest.raises(ValueError):
        RadixRational(1, 0, radix=4)
    with pytest.raises(ValueError):
        RadixRational(1, 0, radix=1)


def test_arithmetic_matches_fractions():
    rng = Random(7)
    for _ in range(300):
        b = rng.choice((3, 5, 7, 13))
        a = RadixRational(rng.randint(-50, 50), rng.randint(0, 5), b)
        c = RadixRational(rng.randint(-50, 50), rng.randint(0, 5), b)
        assert (a + c).as_fraction() == a.as_fraction() + c.as_fraction()
        assert (a - c).as_fraction() == a.as_fraction() - c.as_fraction()
        k = rng.randint(-3, 3)
        assert a.scaled(k).as_fraction() == a.as_fraction() * Fraction(b) ** k
        assert (a < c) == (a.as_fraction() < c.as_fraction())
        assert (a == c) == (a.as_fraction() == c.as_fraction())


def test_digits_round_trip():
    rng = Random(11)
    for _ in range(200):
        b = rng.choice((3, 5, 7))
        digits = tuple(rng.randrange(b) for _ in range(rng.randint(0, 12)))
        r = RadixRational.from_digits(digits, b)
        got = r.digits()
        # Canonical expansion drops trailing zeros only.
        trimmed = list(digits)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        assert got == tuple(trimmed)
        assert r.as_fraction() == sum(
            Fraction(d, b ** (i + 1)) for i, d in enumerate(digits)
        )


def test_prefix_and_digit():
    r = RadixRational.from_digits((0, 2, 1), 3)  # 0.021 base 3 = 7/27
    assert r.as_fraction() == Fraction(7, 27)
    assert r.prefix(1) == 0
    assert r.prefix(2) == 2
    assert r.prefix(3) == 7
    assert r.prefix(5) == 63
    assert [r.digit(i) for i in (1, 2, 3, 4)] == [0, 2, 1, 0]


def test_digits_rejects_value_at_least_one():
    with pytest.raises(ValueError):
        RadixRational(4, 1, radix=3).digits()
    with pytest.raises(ValueError):
        RadixRational(-1, 1, radix=3).digits()


def test_all_digits_even():
    assert RadixRational.from_digits((0, 2, 2), 3).all_digits_even()
    assert not RadixRational.from_digits((0, 1), 3).all_digits_even()
    assert RadixRational(0, 0, 3).all_digits_even()
    # A long expansion exercising the chunked path.
    digits = (2, 0) * 40
    assert RadixRational.from_digits(digits, 5).all_digits_even()
    assert not RadixRational.from_digits(digits + (3,), 5).all_digits_even()


def test_str_and_repr():
    r = RadixRational(2, 1, radix=3)
    assert str(r) == "2/3^1"
    assert "RadixRational" in repr(r)
    assert str(RadixRational(5, 0, radix=3)) == "5"
