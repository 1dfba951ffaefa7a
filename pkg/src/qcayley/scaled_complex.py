"""Extended-exponent complex arithmetic.

A ``ScaledComplex`` stores a double-precision complex mantissa together with a
separate (unbounded) integer power-of-2 exponent, so the represented value is
``(re + im*i) * 2**exp2``.  Products whose magnitude grows super-geometrically,
such as the fundamental solution of the lattice recurrence, stay representable
where plain doubles would overflow around 1e308.

Normalized form: either the value is exactly zero (mantissa 0, exponent 0), or
the larger mantissa component lies in [0.5, 1), which puts the mantissa
magnitude in [0.5, sqrt(2)) and therefore inside the documented [0.5, 2)
window.  Every constructor and arithmetic operation returns normalized values.
Binary scaling is exact, so the exponent channel never rounds.
"""

from __future__ import annotations

import math

# Exponent gap beyond which the smaller addend cannot influence the sum at
# double precision; it is absorbed, mirroring IEEE addition semantics.
ABSORB_BITS = 128

_LOG2 = math.log(2.0)


class ScaledComplex:
    """Complex value ``(re + im*i) * 2**exp2`` with unbounded binary exponent."""

    __slots__ = ("re", "im", "exp2")

    def __init__(self, re: float, im: float, exp2: int):
        # Raw constructor: trusts the caller to pass a normalized triple.
        self.re = re
        self.im = im
        self.exp2 = exp2

    # -- construction ------------------------------------------------------

    @classmethod
    def from_complex(cls, z: complex | float | int) -> "ScaledComplex":
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError(f"non-finite value {z!r} cannot be represented")
        return _normalize(z.real, z.imag, 0)

    @classmethod
    def zero(cls) -> "ScaledComplex":
        return cls(0.0, 0.0, 0)

    @classmethod
    def one(cls) -> "ScaledComplex":
        return cls(0.5, 0.0, 1)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0.0 and self.im == 0.0

    # -- conversion --------------------------------------------------------

    def to_complex(self) -> complex:
        """Exact double value; raises OverflowError above the double range.

        Saturation is reported by the exception rather than by returning
        infinities; use :meth:`try_complex` for a soft variant.  Exponents
        below the double range underflow gradually (subnormal, then zero),
        mirroring IEEE semantics.
        """
        if self.is_zero():
            return 0j
        if self.exp2 > 1025:
            raise OverflowError(
                f"binary exponent {self.exp2} exceeds the double range"
            )
        try:
            return complex(
                math.ldexp(self.re, self.exp2), math.ldexp(self.im, self.exp2)
            )
        except OverflowError:
            raise OverflowError(
                f"binary exponent {self.exp2} exceeds the double range"
            ) from None

    def try_complex(self) -> complex | None:
        try:
            return self.to_complex()
        except OverflowError:
            return None

    def mag2(self) -> float:
        """log2 of the magnitude (-inf for zero).  Total order on |self|."""
        if self.is_zero():
            return -math.inf
        return self.exp2 + math.log2(math.hypot(self.re, self.im))

    def abs_float(self) -> float:
        """|self| as a double, saturating to math.inf / 0.0 out of range."""
        if self.is_zero():
            return 0.0
        m = math.hypot(self.re, self.im)
        if self.exp2 > 1025:
            return math.inf
        try:
            return math.ldexp(m, self.exp2)
        except OverflowError:
            return math.inf

    # -- arithmetic --------------------------------------------------------

    def __mul__(self, other: "ScaledComplex") -> "ScaledComplex":
        if self.is_zero() or other.is_zero():
            return ScaledComplex(0.0, 0.0, 0)
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        return _normalize(re, im, self.exp2 + other.exp2)

    def __truediv__(self, other: "ScaledComplex") -> "ScaledComplex":
        if other.is_zero():
            raise ZeroDivisionError("division by scaled-complex zero")
        if self.is_zero():
            return ScaledComplex(0.0, 0.0, 0)
        d = other.re * other.re + other.im * other.im
        re = (self.re * other.re + self.im * other.im) / d
        im = (self.im * other.re - self.re * other.im) / d
        return _normalize(re, im, self.exp2 - other.exp2)

    def __add__(self, other: "ScaledComplex") -> "ScaledComplex":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        big, small = (self, other) if self.exp2 >= other.exp2 else (other, self)
        gap = big.exp2 - small.exp2
        if gap > ABSORB_BITS:
            return big
        sre = math.ldexp(small.re, -gap)
        sim = math.ldexp(small.im, -gap)
        return _normalize(big.re + sre, big.im + sim, big.exp2)

    def __sub__(self, other: "ScaledComplex") -> "ScaledComplex":
        return self + (-other)

    def __neg__(self) -> "ScaledComplex":
        if self.is_zero():
            return self
        return ScaledComplex(-self.re, -self.im, self.exp2)

    def conjugate(self) -> "ScaledComplex":
        if self.is_zero():
            return self
        return ScaledComplex(self.re, -self.im, self.exp2)

    def abs(self) -> "ScaledComplex":
        """|self| as a scaled real."""
        if self.is_zero():
            return self
        return _normalize(math.hypot(self.re, self.im), 0.0, self.exp2)

    def scale_float(self, s: float) -> "ScaledComplex":
        """Multiply by a plain double (shortcut for mul by from_complex(s))."""
        if self.is_zero() or s == 0.0:
            return ScaledComplex(0.0, 0.0, 0)
        return _normalize(self.re * s, self.im * s, self.exp2)

    # -- comparison helpers --------------------------------------------------

    def mag_cmp(self, other: "ScaledComplex") -> int:
        """-1, 0, or 1 comparing |self| with |other|."""
        a, b = self.mag2(), other.mag2()
        if a < b:
            return -1
        if a > b:
            return 1
        return 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScaledComplex):
            return NotImplemented
        return (
            self.re == other.re and self.im == other.im and self.exp2 == other.exp2
        )

    def __hash__(self) -> int:
        return hash((self.re, self.im, self.exp2))

    def __repr__(self) -> str:
        return f"ScaledComplex({self.re!r}, {self.im!r}, exp2={self.exp2})"

    def __str__(self) -> str:
        return decimal_str(self)


def _normalize(re: float, im: float, exp2: int) -> ScaledComplex:
    """Normalize so the larger component sits in [0.5, 1); exact rescaling."""
    if re == 0.0 and im == 0.0:
        return ScaledComplex(0.0, 0.0, 0)
    _, k = math.frexp(max(abs(re), abs(im)))
    if k:
        # Components whose ratio exceeds the double dynamic range (~2^1074)
        # underflow to zero here; they are below one ulp of the magnitude.
        re = math.ldexp(re, -k)
        im = math.ldexp(im, -k)
    return ScaledComplex(re, im, exp2 + k)


def from_polar_log2(log2_mag: float, arg: float) -> ScaledComplex:
    """Build a value from log2 of its magnitude and its argument."""
    e = math.floor(log2_mag)
    m = 2.0 ** (log2_mag - e)
    return _normalize(m * math.cos(arg), m * math.sin(arg), e)


def decimal_str(a: ScaledComplex, sig: int = 12) -> str:
    """Human-readable decimal form, valid far outside the double range."""
    if a.is_zero():
        return "0"
    parts = []
    for comp, suffix in ((a.re, ""), (a.im, "i")):
        if comp == 0.0:
            continue
        log10 = (a.exp2 + math.log2(abs(comp))) * _LOG2 / math.log(10.0)
        e10 = math.floor(log10)
        mant = math.copysign(10.0 ** (log10 - e10), comp)
        parts.append(f"{mant:.{sig - 1}f}e{e10:+d}{suffix}")
    return " + ".join(parts) if len(parts) == 2 else parts[0]


ZERO = ScaledComplex.zero()
ONE = ScaledComplex.one()
