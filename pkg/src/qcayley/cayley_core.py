"""Coefficient validation and the equation's difference operators.

The lattice recurrence behind everything here is

    x(q*t) = r(t) * x(t),
    r(t) = (1 + w*(1-eta)*(q-1)*t) / (1 - w*eta*(q-1)*t),

so w is admissible exactly when neither the numerator nor the denominator of
r vanishes at any lattice point, i.e. w avoids -1/((1-eta)(q-1)q^k) and, for
eta > 0, 1/(eta(q-1)q^k) for every k >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .exceptions import ForbiddenParameterError, ParameterError
from .lattice import LatticePoint, LatticeWindow, point, scale_steps
from .scaled_complex import ONE, ScaledComplex

FORBIDDEN_REL_TOL = 1e-12
NEAR_SINGULAR_REL_TOL = 1e-6

# Branch names describe which part of the step ratio the value annihilates.
BRANCH_NUMERATOR = "numerator"
BRANCH_DENOMINATOR = "denominator"


class ValidityStatus(Enum):
    VALID = "valid"
    NEAR_SINGULAR = "near_singular"
    FORBIDDEN = "forbidden"


@dataclass(frozen=True)
class Validity:
    status: ValidityStatus
    k: int | None = None
    branch: str | None = None
    distance: float | None = None

    @property
    def ok(self) -> bool:
        return self.status is not ValidityStatus.FORBIDDEN


def _branch_candidates(
    w: complex, sign: float, coeff: float, q: float
) -> Iterator[tuple[int, float]]:
    """(k, relative distance) pairs near the only k where |w| can match.

    The forbidden magnitudes 1/(coeff * q^k) decrease strictly in k, so a
    match within relative 1e-6 forces q^k within a whisker of 1/(coeff*|w|);
    probing a few integers around the log solution covers every possibility.
    The distance |w - v|/|v| is evaluated as |sign*coeff*q^k*w - 1|, which
    stays near 1 at the candidates and never overflows.
    """
    aw = abs(w)
    if aw == 0.0 or coeff <= 0.0:
        return
    log_q = math.log(q)
    k_star = -(math.log(coeff) + math.log(aw)) / log_q
    lo = max(0, math.floor(k_star) - 2)
    for k in range(lo, lo + 6):
        if k * log_q < 600.0 and aw > 1e-280:
            yield k, abs(sign * (coeff * q**k) * w - 1.0)
        else:
            # extreme |w|: form the dimensionless product in log space
            exponent = math.log(coeff) + k * log_q + math.log(aw)
            p = math.exp(min(700.0, max(-700.0, exponent)))
            yield k, abs(sign * p * (w / aw) - 1.0)


def validate(q: float, eta: float, w: complex) -> Validity:
    """Classify w against the forbidden set for (q, eta).

    Forbidden within relative 1e-12 of a forbidden value, NearSingular within
    relative 1e-6, Valid otherwise.  w = 0 is always Valid: the forbidden
    values are all nonzero.
    """
    if not q > 1.0:
        raise ParameterError(f"q must be > 1, got {q}")
    if not 0.0 <= eta <= 0.5:
        raise ParameterError(f"eta must lie in [0, 1/2], got {eta}")
    w = complex(w)
    if w == 0:
        return Validity(ValidityStatus.VALID)

    hits: list[tuple[float, int, str]] = []
    for sign, coeff, branch in (
        (-1.0, (1.0 - eta) * (q - 1.0), BRANCH_NUMERATOR),
        (1.0, eta * (q - 1.0), BRANCH_DENOMINATOR),
    ):
        for k, dist in _branch_candidates(w, sign, coeff, q):
            if dist <= NEAR_SINGULAR_REL_TOL:
                hits.append((dist, k, branch))
    if not hits:
        return Validity(ValidityStatus.VALID)
    dist, k, branch = min(hits)
    if dist <= FORBIDDEN_REL_TOL:
        return Validity(ValidityStatus.FORBIDDEN, k=k, branch=branch)
    return Validity(ValidityStatus.NEAR_SINGULAR, k=k, branch=branch, distance=dist)


@dataclass(frozen=True)
class CayleyParams:
    """The coefficient triple (q, eta, w) with its validity classification."""

    q: float
    eta: float
    w: complex
    validity: Validity = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "validity", validate(self.q, self.eta, self.w))
        # Cached scaled coefficients for the step-ratio hot path.
        num_c = complex(self.w) * (1.0 - self.eta)
        den_c = complex(self.w) * self.eta
        object.__setattr__(self, "_num_coeff", ScaledComplex.from_complex(num_c))
        object.__setattr__(
            self, "_den_coeff", ScaledComplex.from_complex(den_c) if den_c else None
        )

    def require_valid(self) -> None:
        if self.validity.status is ValidityStatus.FORBIDDEN:
            v = self.validity
            raise ForbiddenParameterError(
                f"w = {self.w} is forbidden for (q={self.q}, eta={self.eta}) "
                f"at k={v.k} ({v.branch} branch)",
                k=v.k,
                branch=v.branch,
            )

    def window(self, k_max: int | None = None) -> LatticeWindow:
        if k_max is None:
            return LatticeWindow(self.q)
        return LatticeWindow(self.q, k_max)


@dataclass(frozen=True)
class Trajectory:
    """Complex-valued lattice function restricted to a window, k = 0..k_max."""

    window: LatticeWindow
    values: tuple[ScaledComplex, ...]

    def __post_init__(self):
        if len(self.values) != self.window.k_max + 1:
            raise ParameterError(
                f"trajectory length {len(self.values)} does not match window "
                f"k_max={self.window.k_max}"
            )

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> ScaledComplex:
        return self.values[k]


def constant_trajectory(window: LatticeWindow, value: complex) -> Trajectory:
    v = ScaledComplex.from_complex(value)
    return Trajectory(window, (v,) * (window.k_max + 1))


def step_ratio(params: CayleyParams, pt: LatticePoint) -> ScaledComplex:
    """One-step multiplier r(t) of the recurrence at the lattice point t."""
    params.require_valid()
    num, den = _ratio_parts(params, pt.t)
    return num / den


def _ratio_parts(
    params: CayleyParams, t: ScaledComplex
) -> tuple[ScaledComplex, ScaledComplex]:
    """Numerator 1 + w(1-eta)(q-1)t and denominator 1 - w*eta*(q-1)t."""
    g = t.scale_float(params.q - 1.0)
    num = ONE + g * params._num_coeff
    den_coeff = params._den_coeff
    den = ONE if den_coeff is None else ONE - g * den_coeff
    return num, den


def jackson_derivative(traj: Trajectory, k: int) -> ScaledComplex:
    """The q-difference quotient (x(qt) - x(t)) / ((q-1)t) at index k."""
    _check_successor(traj, k)
    g = point(traj.window.q, k).t.scale_float(traj.window.q - 1.0)
    return (traj[k + 1] - traj[k]) / g


def cayley_average(traj: Trajectory, eta: float, k: int) -> ScaledComplex:
    """The weighted average eta*x(qt) + (1-eta)*x(t) at index k."""
    _check_successor(traj, k)
    return traj[k + 1].scale_float(eta) + traj[k].scale_float(1.0 - eta)


def _check_successor(traj: Trajectory, k: int) -> None:
    if not 0 <= k <= traj.window.k_max - 1:
        raise ParameterError(
            f"index {k} has no successor inside the window (k_max="
            f"{traj.window.k_max})"
        )


def _residual_terms(params: CayleyParams, traj: Trajectory):
    """Yield (k, noise_mag2, residual) sweeping the window once.

    noise_mag2 is the log2 magnitude of the largest operand entering the
    defect at index k, before the cancellations inside the derivative and the
    average: rounding noise in the recovered residual scales with it, not
    with the residual itself.
    """
    w_sc = ScaledComplex.from_complex(params.w)
    eta = params.eta
    log_w = -math.inf if params.w == 0 else math.log2(abs(params.w))
    log_eta = -math.inf if eta == 0.0 else math.log2(eta)
    log_meta = math.log2(1.0 - eta) if eta < 1.0 else -math.inf
    for k, _, g in scale_steps(traj.window):
        if k >= traj.window.k_max:
            break
        deriv = (traj[k + 1] - traj[k]) / g
        avg = traj[k + 1].scale_float(eta) + traj[k].scale_float(1.0 - eta)
        forced = w_sc * avg
        m_next, m_here = traj[k + 1].mag2(), traj[k].mag2()
        noise_mag2 = max(
            max(m_next, m_here) - g.mag2(),
            log_w + max(log_eta + m_next, log_meta + m_here),
        )
        yield k, noise_mag2, deriv - forced


def residual(params: CayleyParams, traj: Trajectory) -> Trajectory:
    """The defect D_q x - w<x> on k = 0..k_max-1 (one shorter than traj)."""
    params.require_valid()
    if traj.window.k_max < 1:
        raise ParameterError("residual needs a trajectory with at least 2 points")
    values = tuple(e for _, _, e in _residual_terms(params, traj))
    return Trajectory(LatticeWindow(traj.window.q, traj.window.k_max - 1), values)


def residual_noise_floor(params: CayleyParams, traj: Trajectory) -> list[float]:
    """log2 operand magnitudes bounding the rounding noise of residual()."""
    params.require_valid()
    return [noise for _, noise, _ in _residual_terms(params, traj)]
