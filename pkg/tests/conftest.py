import math

import pytest

from qcayley.scaled_complex import ScaledComplex


def rel_err(actual: complex, expected: complex) -> float:
    if expected == 0:
        return abs(actual)
    return abs(actual - expected) / abs(expected)


def sc(z: complex, exp2: int = 0) -> ScaledComplex:
    """Shorthand: value z * 2**exp2 as a normalized ScaledComplex."""
    out = ScaledComplex.from_complex(z)
    if exp2 and not out.is_zero():
        out = ScaledComplex(out.re, out.im, out.exp2 + exp2)
    return out


def mag_rel_err(a: ScaledComplex, expected_log2: float) -> float:
    """Relative error of |a| against a log2-magnitude oracle."""
    return abs(2.0 ** (a.mag2() - expected_log2) - 1.0)


def mul_log_oracle_rel_err(a: ScaledComplex, b: ScaledComplex, r: ScaledComplex) -> float:
    """Magnitude error of r = a*b against log accumulation.

    Integer exponents and fractional log2 magnitudes are tracked separately;
    folding them into one float would drown 1e-12 comparisons in the ulp of
    the exponent itself.
    """
    int_part = a.exp2 + b.exp2 - r.exp2
    frac = (
        math.log2(math.hypot(a.re, a.im))
        + math.log2(math.hypot(b.re, b.im))
        - math.log2(math.hypot(r.re, r.im))
    )
    return abs(2.0 ** (int_part + frac) - 1.0)


@pytest.fixture
def tight() -> float:
    return 1e-12
