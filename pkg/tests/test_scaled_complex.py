"""Extended-exponent arithmetic against log-domain and exact oracles."""

import cmath
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcayley.scaled_complex import ONE, ScaledComplex, decimal_str, from_polar_log2

from conftest import mag_rel_err, mul_log_oracle_rel_err, rel_err, sc


def normalized(a: ScaledComplex) -> bool:
    if a.is_zero():
        return a.exp2 == 0
    m = math.hypot(a.re, a.im)
    return 0.5 <= m < 2.0


finite_components = st.floats(
    min_value=-1e150, max_value=1e150, allow_nan=False, allow_infinity=False
).filter(lambda x: x == 0.0 or abs(x) > 1e-150)

complexes = st.builds(complex, finite_components, finite_components)
exponents = st.integers(min_value=-(10**6), max_value=10**6)


class TestConstruction:
    def test_identity_times_identity(self):
        r = sc(1) * sc(1)
        assert r.to_complex() == 1 + 0j
        assert r.exp2 == 1 and r.re == 0.5  # canonical form of 1.0

    def test_exponent_addition(self):
        a = sc(1, 1000)
        b = sc(1, 1000)
        r = a * b
        assert r.mag2() == pytest.approx(2000.0)
        assert normalized(r)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            ScaledComplex.from_complex(complex("inf"))

    @given(complexes)
    @settings(max_examples=300)
    def test_round_trip_exact(self, z):
        assert ScaledComplex.from_complex(z).to_complex() == z

    @given(complexes, exponents)
    @settings(max_examples=300)
    def test_normalization_idempotent(self, z, e):
        a = sc(z, e)
        again = ScaledComplex.from_complex(complex(a.re, a.im))
        assert (again.re, again.im) == (a.re, a.im)
        assert normalized(a)


class TestMul:
    @given(complexes, complexes, exponents, exponents)
    @settings(max_examples=400)
    def test_against_log_oracle(self, za, zb, ea, eb):
        if za == 0 or zb == 0:
            return
        a, b = sc(za, ea), sc(zb, eb)
        r = a * b
        assert normalized(r)
        # log-magnitude and argument accumulate independently of the product
        assert mul_log_oracle_rel_err(a, b, r) < 1e-12
        expected_arg = cmath.phase(complex(a.re, a.im)) + cmath.phase(
            complex(b.re, b.im)
        )
        got_arg = cmath.phase(complex(r.re, r.im))
        diff = abs(cmath.exp(1j * got_arg) - cmath.exp(1j * expected_arg))
        assert diff < 1e-12

    def test_zero_absorbs(self):
        assert (sc(0) * sc(3 + 4j, 500)).is_zero()

    def test_long_product_magnitude(self):
        # 10^4 factors of magnitude 2^1000: exponent reaches 10^7 with the
        # mantissa tracked against an exact-integer/log-split oracle.
        rng = random.Random(90125)
        acc = ONE
        frac_log2 = 0.0  # oracle: fractional log2-magnitude, tiny per factor
        arg = 0.0
        args = []
        for _ in range(10_000):
            theta = 2.0 * math.pi * rng.random()
            f = sc(complex(math.cos(theta), math.sin(theta)), 1000)
            acc = acc * f
            frac_log2 += math.log2(math.hypot(f.re, f.im)) + (f.exp2 - 1000)
            args.append(math.atan2(f.im, f.re))
        arg = math.fsum(args)
        assert mag_rel_err(acc, 10**7 + frac_log2) < 1e-12
        expected_unit = cmath.exp(1j * arg)
        got_unit = cmath.exp(1j * cmath.phase(complex(acc.re, acc.im)))
        assert abs(got_unit - expected_unit) < 1e-10


class TestAdd:
    def test_cancellation(self):
        assert (sc(1) + sc(-1)).is_zero()

    def test_absorption_beyond_precision(self):
        big = sc(1, 200)
        assert (sc(1) + big) == big

    def test_direct_addition_oracle(self):
        r = sc(1 + 1j, 3) + sc(1 - 1j, 3)
        assert r.to_complex() == (1 + 0j) * 2**4

    def test_zero_identity_preserves_tiny_exponent(self):
        tiny = sc(1, -5000)
        assert (ScaledComplex.zero() + tiny) == tiny
        assert (tiny + ScaledComplex.zero()) == tiny

    @given(complexes, complexes)
    @settings(max_examples=300)
    def test_against_complex_arithmetic(self, za, zb):
        r = (sc(za) + sc(zb)).try_complex()
        expected = za + zb
        if r is None:
            return  # overflowed the double range; nothing to compare
        assert rel_err(r, expected) < 1e-15 or abs(r - expected) < 1e-290


class TestDivAbs:
    def test_div_identity(self):
        assert (sc(1) / sc(1)).to_complex() == 1 + 0j

    def test_div_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            sc(1) / ScaledComplex.zero()

    @pytest.mark.parametrize("k", [0, 10, -2000, 31337])
    def test_abs_hypot_oracle(self, k):
        a = sc(3 + 4j, k)
        r = a.abs()
        assert r.im == 0.0
        assert mag_rel_err(r, math.log2(5.0) + k) < 1e-15

    def test_to_float_overflow_flag(self):
        with pytest.raises(OverflowError):
            sc(1, 2000).to_complex()
        assert sc(1, 2000).try_complex() is None

    @given(complexes, complexes, exponents, exponents)
    @settings(max_examples=200)
    def test_mul_div_round_trip(self, za, zb, ea, eb):
        if za == 0 or zb == 0:
            return
        a, b = sc(za, ea), sc(zb, eb)
        back = (a * b) / b
        assert mag_rel_err(back, a.mag2()) < 1e-12


class TestHelpers:
    def test_decimal_str_far_outside_double_range(self):
        s = decimal_str(sc(1.5, 10_000))
        assert "e+3010" in s  # 1.5 * 2^10000 ~ 10^3010.6

    def test_from_polar_log2(self):
        a = from_polar_log2(100.5, math.pi / 3)
        assert mag_rel_err(a, 100.5) < 1e-12

    def test_mag_cmp(self):
        assert sc(1, 10).mag_cmp(sc(1, 11)) == -1
        assert sc(3, 0).mag_cmp(sc(3, 0)) == 0
        assert sc(1, 12).mag_cmp(sc(1, 11)) == 1
