"""Lattice bookkeeping: exact index/value correspondence and iteration."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcayley.exceptions import ParameterError
from qcayley.lattice import LatticeWindow, default_k_max, iterate, point

from conftest import mag_rel_err


def test_q_power_zero():
    assert point(2.0, 0).t.to_complex() == 1 + 0j


def test_q_power_exact():
    assert point(2.0, 10).t.to_complex() == 1024 + 0j


def test_q_power_against_exact_rational_oracle():
    # 1.5 is exactly representable, so Fraction(3, 2)**100 is the true value.
    pt = point(1.5, 100)
    exact = Fraction(3, 2) ** 100
    assert mag_rel_err(pt.t, math.log2(exact.numerator) - math.log2(exact.denominator)) < 1e-12
    assert pt.t.to_complex().real == pytest.approx(4.065611775352e17, rel=1e-10)


def test_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        point(1.0, 3)
    with pytest.raises(ParameterError):
        point(2.0, -1)
    with pytest.raises(ParameterError):
        LatticeWindow(0.9, 5)


def test_iterate_small_windows():
    ts = [p.t.to_complex().real for p in iterate(LatticeWindow(2.0, 3))]
    assert ts == [1.0, 2.0, 4.0, 8.0]
    single = iterate(LatticeWindow(3.0, 0))
    assert len(single) == 1 and single[0].t.to_complex() == 1 + 0j


def test_iterate_length_and_last_value():
    pts = iterate(LatticeWindow(1.8, 5))
    assert len(pts) == 6
    assert pts[-1].t.to_complex().real == pytest.approx(1.8**5, rel=1e-14)


@given(
    st.floats(min_value=1.0001, max_value=8.0),
    st.integers(min_value=1, max_value=300),
)
@settings(max_examples=80)
def test_successor_is_one_multiplication(q, k_max):
    pts = iterate(LatticeWindow(q, k_max))
    q_log2 = math.log2(q)
    for a, b in zip(pts, pts[1:]):
        assert b.k == a.k + 1
        # t(k+1) = q * t(k) to machine precision at every step
        assert abs(2.0 ** (b.t.mag2() - a.t.mag2() - q_log2) - 1.0) < 1e-13


def test_index_recoverable_from_log(tight):
    q = 1.7
    for k in (0, 1, 7, 200):
        pt = point(q, k)
        assert round(pt.t.mag2() / math.log2(q)) == k


def test_default_k_max_env_override(monkeypatch):
    assert default_k_max() == 256
    monkeypatch.setenv("QCAYLEY_KMAX", "64")
    assert default_k_max() == 64
    monkeypatch.setenv("QCAYLEY_KMAX", "zero")
    with pytest.raises(ParameterError):
        default_k_max()
    monkeypatch.setenv("QCAYLEY_KMAX", "0")
    with pytest.raises(ParameterError):
        default_k_max()
