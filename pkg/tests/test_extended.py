"""Extended-precision scalar arithmetic against mpmath as the oracle."""

import math

import mpmath
import pytest

import stimemit.extended as xr
from stimemit.extended import ExtendedReal, magnitude_exponent


def test_exact_construction_roundtrip():
    assert float(ExtendedReal(0.1)) == 0.1
    assert float(ExtendedReal(7)) == 7.0
    assert float(ExtendedReal(-3.5, 64)) == -3.5


def test_width_recorded_and_propagated():
    a = ExtendedReal(1.5, 128)
    b = ExtendedReal(2.0, 512)
    assert a.bits == 128
    assert (a + b).bits == 512
    assert (a * b).bits == 512
    assert (a / 3).bits == 128


@pytest.mark.parametrize("bits", [64, 256, 1024])
def test_arithmetic_matches_mpmath(bits):
    with mpmath.workprec(bits):
        cases = [(0.3, 1.7), (-2.25, 0.125), (1e10, 3.0)]
        for x, y in cases:
            a, b = ExtendedReal(x, bits), ExtendedReal(y, bits)
            assert (a + b).to_decimal(40) == mpmath.nstr(mpmath.mpf(x) + mpmath.mpf(y), 40)
            assert (a * b).to_decimal(40) == mpmath.nstr(mpmath.mpf(x) * mpmath.mpf(y), 40)
            assert (a / b).to_decimal(40) == mpmath.nstr(mpmath.mpf(x) / mpmath.mpf(y), 40)


def test_transcendentals_match_mpmath():
    bits = 256
    with mpmath.workprec(bits):
        for fn, ref in [(xr.exp, mpmath.exp), (xr.sin, mpmath.sin),
                        (xr.cos, mpmath.cos), (xr.sqrt, mpmath.sqrt)]:
            got = fn(ExtendedReal(2.4, bits)).to_decimal(60)
            want = mpmath.nstr(ref(mpmath.mpf(2.4)), 60)
            assert got == want


def test_rounding_to_narrower_width():
    x = ExtendedReal(1, 512) + ExtendedReal(1, 512).scaled_by_pow2(-300)
    narrow = x.rounded_to(128)
    assert narrow.bits == 128
    assert narrow == ExtendedReal(1)
    # the original keeps the low bits
    assert x > ExtendedReal(1)


def test_factorial_via_product():
    assert float(xr.factorial(0)) == 1.0
    assert float(xr.factorial(5)) == 120.0
    big = xr.factorial(40, 256)
    assert big.to_decimal(20) == mpmath.nstr(mpmath.mpf(math.factorial(40)), 20)


def test_falling_product():
    assert float(xr.falling_product(144, 2)) == 144 * 143
    assert float(xr.falling_product(10, 0)) == 1.0
    with pytest.raises(ValueError):
        xr.falling_product(3, 5)


def test_comparisons_and_sign():
    assert ExtendedReal(2) > 1.5
    assert ExtendedReal(-1) < 0
    assert ExtendedReal(0.25) == 0.25
    assert ExtendedReal(0).sign == 0
    assert ExtendedReal(-3).sign == -1
    assert abs(ExtendedReal(-3)) == 3


def test_magnitude_exponent():
    assert magnitude_exponent(ExtendedReal(0)) is None
    assert magnitude_exponent(ExtendedReal(1)) == 1      # 2^0 <= 1 < 2^1
    assert magnitude_exponent(ExtendedReal(8)) == 4
    assert magnitude_exponent(ExtendedReal(0.5)) == 0


def test_scaled_by_pow2_exact():
    x = ExtendedReal(3)
    assert float(x.scaled_by_pow2(-2)) == 0.75
    assert float(x.scaled_by_pow2(10)) == 3072.0


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        ExtendedReal(math.inf)
    with pytest.raises(ValueError):
        ExtendedReal(math.nan)


def test_immutability():
    x = ExtendedReal(1)
    with pytest.raises(AttributeError):
        x.bits = 7
