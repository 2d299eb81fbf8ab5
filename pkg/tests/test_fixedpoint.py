import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockforge.fixedpoint import (
    FixedPointValue,
    fp_inv_sqrt,
    fp_inv_sqrt_trace,
    fp_quantize,
    inv_distance_fp,
)
from fockforge.lattice import LatticeSpec


def test_quantize_third():
    v = fp_quantize(1 / 3, 8, scale=0)
    assert v.mantissa == round(256 / 3) == 85
    assert v.value == 85 / 256 == 0.33203125


def test_quantize_exact_half():
    v = fp_quantize(0.5, 4, scale=0)
    assert v.mantissa == 8 and v.value == 0.5


@pytest.mark.parametrize("b", [1, 5, 32])
def test_quantize_zero(b):
    assert fp_quantize(0, b).mantissa == 0


def test_quantize_half_even():
    # 3/32 sits exactly between 1/16 and 2/16 at 4 bits
    assert fp_quantize(Fraction(3, 32), 4, 0).mantissa == 2
    assert fp_quantize(Fraction(1, 32), 4, 0).mantissa == 0
    assert fp_quantize(Fraction(5, 32), 4, 0).mantissa == 2


def test_quantize_overflow_explicit_scale():
    with pytest.raises(OverflowError):
        fp_quantize(1.0, 8, scale=0)
    assert fp_quantize(1.0, 8).exact == 1


def test_fixed_point_value_invariants():
    with pytest.raises(ValueError):
        FixedPointValue(4, 16, 0)
    v = FixedPointValue(8, 85, 0)
    assert v.exact == Fraction(85, 256)


@given(st.fractions(min_value=0, max_value=20), st.integers(1, 40))
def test_quantize_error_bound(x, b):
    v = fp_quantize(x, b)
    assert abs(v.exact - x) <= Fraction(2) ** (v.scale - b - 1)


@given(st.fractions(min_value=0, max_value=0.999), st.integers(1, 30))
def test_quantize_monotone_precision(x, b):
    # both grids at scale 0 for x < 1
    e_b = abs(fp_quantize(x, b).exact - x)
    e_b1 = abs(fp_quantize(x, b + 1).exact - x)
    assert e_b1 <= e_b + Fraction(1, 2 ** (b + 1))


def test_quantize_deterministic():
    assert [fp_quantize(math.pi / 7, 20).mantissa for _ in range(3)] == [fp_quantize(math.pi / 7, 20).mantissa] * 3


def test_inv_sqrt_examples():
    assert abs(fp_inv_sqrt(4, 16).exact - Fraction(1, 2)) <= Fraction(1, 2) * Fraction(1, 2**15)
    assert fp_inv_sqrt(1, 8).exact == 1
    # high-precision reference for 1/sqrt(2)
    ref = Fraction("0.70710678118654752440084436210484903928483593768847")
    assert abs(fp_inv_sqrt(2, 24).exact - ref) / ref <= Fraction(1, 2**23)


def test_inv_sqrt_rejects_nonpositive():
    with pytest.raises(ValueError):
        fp_inv_sqrt(0, 8)
    with pytest.raises(ValueError):
        fp_inv_sqrt(-1, 8)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000), st.integers(2, 48))
def test_inv_sqrt_relative_error_and_iterations(x, b):
    trace = fp_inv_sqrt_trace(x, b)
    y = trace.result.exact
    # |y sqrt(x) - 1| <= 2 * 2**-b, checked on squares to stay rational
    lo, hi = (1 - Fraction(2, 2**b)) ** 2, (1 + Fraction(2, 2**b)) ** 2
    assert lo <= y * y * x <= hi
    assert trace.iterations <= math.ceil(math.log2(b)) + 2


def test_inv_sqrt_square_identity_grid():
    for x in np.linspace(0.25, 4, 61):
        for b in (8, 12, 16, 24):
            y = fp_inv_sqrt(x, b).exact
            assert abs(y * y * Fraction(x) - 1) <= Fraction(4, 2**b)


def test_inv_sqrt_deterministic():
    a = fp_inv_sqrt(3.7, 20)
    assert all(fp_inv_sqrt(3.7, 20) == a for _ in range(3))


def test_inv_distance_examples():
    v = inv_distance_fp(LatticeSpec(8), 3, 6, 8)
    assert v.mantissa == 85 and v.exact == Fraction(85, 256)
    line = LatticeSpec(4, "line")
    for b in (1, 4, 16):
        assert inv_distance_fp(line, 1, 2, b).exact == 1
    nr = inv_distance_fp(line, 1, 3, 12, newton=True)
    assert abs(nr.exact - Fraction(1, 2)) <= Fraction(1, 2**11)


def test_inv_distance_same_site():
    with pytest.raises(ValueError):
        inv_distance_fp(LatticeSpec(4), 2, 2, 8)
