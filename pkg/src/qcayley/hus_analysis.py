"""Stability certification against the sharp constant 1/|w|.

For admissible w != 0 and eta in [0, 1/2), the forced series converges (its
term-ratio limit is eta/(1-eta) < 1) and the unit-forcing tail satisfies

    psi(t) = P(t) * sum_{m >= log_q t} (q-1) q^m
             / ((1 + w (1-eta) (q-1) q^m) P(q^m))  ==  1/w

at every lattice point.  The shadowing coefficient of a perturbed trajectory
is x0 = c + lim S, and the deviation from the exact solution x0*P is measured
here through the numerically stable tail form

    phi(q^k) - x0 P(q^k) = -P(q^k) * sum_{m >= k} (S-series term m),

never by subtracting two enormous nearly equal trajectory values, whose
rounding noise would swamp the deviation long before k_max.

Truncation rule for every infinite sum: stop once three consecutive terms are
below tol_rel * |partial sum| and the geometric majorant term * rho/(1-rho)
is below tol_rel * |partial sum|, where rho is the midpoint of the term-ratio
limit eta/(1-eta) and 1, applied only after the empirical ratio has fallen
below rho.  tol_rel = 1e-12, hard cap 10^4 terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from .cayley_core import CayleyParams, Trajectory, _ratio_parts, _residual_terms
from .exceptions import NotApplicableError, ParameterError, TruncationError
from .lattice import LatticeWindow, weights
from .scaled_complex import ONE, ScaledComplex
from .solutions import ForcingSampler, SolutionBundle

TOL_REL = 1e-12
TERM_CAP = 10_000
_LOG2_TOL = math.log2(TOL_REL)

# Residual re-check slack: epsilon may be exceeded by rounding noise scaled
# to the trajectory magnitude, never by more.
_RESIDUAL_SLACK = 1e-9


class Verdict(Enum):
    BOUND_HOLDS = "BoundHolds"
    BOUND_VIOLATED = "BoundViolated"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class TruncationInfo:
    """How a tail sum stopped: terms consumed and the final relative bound."""

    terms_used: int
    tail_bound: float


@dataclass(frozen=True)
class ShadowResult:
    x0: complex
    truncation: TruncationInfo


@dataclass(frozen=True)
class HusReport:
    params: CayleyParams
    epsilon: float
    verdict: Verdict
    x0: complex | None = None
    sup_deviation: float | None = None
    bound: float | None = None
    identity_error: float | None = None
    truncation: TruncationInfo | None = None


@dataclass(frozen=True)
class UniquenessProbe:
    """First index where a shifted candidate solution leaves the 2*bound tube."""

    delta: complex
    threshold: float
    first_violation_k: int | None
    max_deviation: float


def _require_analysable(params: CayleyParams) -> None:
    params.require_valid()
    if params.w == 0:
        raise NotApplicableError("stability analysis needs w != 0")
    if params.eta >= 0.5:
        raise NotApplicableError(
            "stability analysis is limited to eta < 1/2; "
            "eta = 1/2 belongs to the instability module"
        )


def _rho(eta: float) -> float:
    limit = eta / (1.0 - eta)
    return 0.5 * (limit + 1.0)


def _sum_with_rule(
    terms: Iterator[ScaledComplex], eta: float, what: str
) -> tuple[ScaledComplex, TruncationInfo]:
    """Accumulate terms until the truncation rule fires or the cap is hit."""
    rho = _rho(eta)
    log2_rho = math.log2(rho)
    log2_geom = math.log2(rho / (1.0 - rho))
    acc = ScaledComplex.zero()
    prev_mag = None
    small_streak = 0
    used = 0
    for term in terms:
        acc = acc + term
        used += 1
        t_mag = term.mag2()
        p_mag = acc.mag2()
        if term.is_zero():
            small_streak += 1
            ratio_ok = True
            bound_rel = -math.inf
        else:
            small_streak = small_streak + 1 if t_mag < p_mag + _LOG2_TOL else 0
            ratio_ok = prev_mag is not None and (t_mag - prev_mag) < log2_rho
            bound_rel = t_mag + log2_geom - p_mag
            prev_mag = t_mag
        if small_streak >= 3 and ratio_ok and bound_rel < _LOG2_TOL:
            return acc, TruncationInfo(used, 2.0**bound_rel if bound_rel > -1000 else 0.0)
        if used >= TERM_CAP:
            raise TruncationError(
                f"{what} did not converge within {TERM_CAP} terms",
                terms_used=used,
                last_term_mag2=t_mag,
                partial_mag2=p_mag,
            )
    # Exhausted a finite term stream (custom forcing): trivially converged.
    return acc, TruncationInfo(used, 0.0)


def tail_sum_psi(params: CayleyParams, k: int) -> complex:
    """psi(q^k): the unit-forcing tail from index k, analytically 1/w."""
    value, _ = tail_sum_psi_info(params, k)
    return value


def tail_sum_psi_info(
    params: CayleyParams, k: int
) -> tuple[complex, TruncationInfo]:
    _require_analysable(params)
    if k < 0:
        raise ParameterError(f"lattice index must be >= 0, got {k}")

    def terms() -> Iterator[ScaledComplex]:
        rel_p = ONE  # P(q^m) / P(q^k) for m >= k
        for m, t, g in weights(params.q):
            if m < k:
                continue
            num, den = _ratio_parts(params, t)
            yield g / (num * rel_p)
            rel_p = rel_p * (num / den)

    acc, info = _sum_with_rule(terms(), params.eta, f"psi tail at k={k}")
    return acc.to_complex(), info


def psi_profile(
    params: CayleyParams, ks: Sequence[int]
) -> tuple[dict[int, complex], TruncationInfo]:
    """psi(q^k) for several k in one sweep (shared truncation horizon).

    The truncation rule is driven by the tail at max(ks); earlier tails are
    recovered from suffix sums of the same term table, which only adds terms
    beyond what their own rule would demand.
    """
    _require_analysable(params)
    if not ks:
        return {}, TruncationInfo(0, 0.0)
    if min(ks) < 0:
        raise ParameterError("lattice indices must be >= 0")
    k_top = max(ks)

    head: list[ScaledComplex] = []  # absolute terms b_m for m < k_top
    p_values: list[ScaledComplex] = []  # P(q^m) for m <= k_top
    p_acc = ONE

    def tail_terms() -> Iterator[ScaledComplex]:
        nonlocal p_acc
        rel_p = ONE
        for m, t, g in weights(params.q):
            num, den = _ratio_parts(params, t)
            if m < k_top:
                p_values.append(p_acc)
                head.append(g / (num * p_acc))
                p_acc = p_acc * (num / den)
            else:
                if m == k_top:
                    p_values.append(p_acc)
                yield g / (num * rel_p)
                rel_p = rel_p * (num / den)

    tail_at_top, info = _sum_with_rule(tail_terms(), params.eta, "psi profile tail")

    # Suffix sums of absolute terms; psi(q^k) = P(q^k) * sum_{m>=k} b_m.
    result: dict[int, complex] = {}
    wanted = set(ks)
    if k_top in wanted:
        result[k_top] = tail_at_top.to_complex()
    suffix = tail_at_top / p_values[k_top]
    for k in range(k_top - 1, -1, -1):
        suffix = suffix + head[k]
        if k in wanted:
            result[k] = (p_values[k] * suffix).to_complex()
    return result, info


def term_ratio_profile(params: CayleyParams, window: LatticeWindow) -> list[float]:
    """|a_{m+1}/a_m| for the unit-forcing series; tends to eta/(1-eta)."""
    _require_analysable(params)
    mags: list[float] = []
    p_acc = ONE
    for m, t, g in weights(params.q):
        if m > window.k_max:
            break
        num, den = _ratio_parts(params, t)
        term = g / (num * p_acc)
        mags.append(term.mag2())
        p_acc = p_acc * (num / den)
    return [2.0 ** (mags[m + 1] - mags[m]) for m in range(window.k_max)]


def _deviation_tails(
    params: CayleyParams, bundle: SolutionBundle
) -> tuple[list[ScaledComplex], TruncationInfo]:
    """Suffix sums T_k = sum_{m>=k} of the S-series terms, k = 0..k_max.

    The far tail (m > k_max) extends the forcing through the bundle's spec;
    deviations are then |P(q^k) * T_k| and the shadowing limit is c + T_0.
    """
    window = bundle.window
    k_max = window.k_max
    sampler = bundle.spec.sampler()

    head: list[ScaledComplex] = []

    def far_terms() -> Iterator[ScaledComplex]:
        p_acc: ScaledComplex = bundle.P[k_max]
        for m, t, g in weights(params.q):
            num, den = _ratio_parts(params, t)
            if m < k_max:
                head.append(g * bundle.E[m] / (num * bundle.P[m]))
            else:
                e_m = bundle.E[m] if m == k_max else sampler.value(m, p_acc)
                yield g * e_m / (num * p_acc)
                p_acc = p_acc * (num / den)

    far_sum, info = _sum_with_rule(far_terms(), params.eta, "deviation tail")

    tails = [ScaledComplex.zero()] * (k_max + 1)
    tails[k_max] = far_sum
    for k in range(k_max - 1, -1, -1):
        tails[k] = head[k] + tails[k + 1]
    return tails, info


def deviation_profile(params: CayleyParams, bundle: SolutionBundle) -> list[float]:
    """|phi(q^k) - x0 P(q^k)| for k = 0..k_max, in stable tail form."""
    _require_analysable(params)
    tails, _ = _deviation_tails(params, bundle)
    return [
        (bundle.P[k] * tails[k]).abs_float()
        for k in range(bundle.window.k_max + 1)
    ]


def extract_shadow(params: CayleyParams, bundle: SolutionBundle) -> ShadowResult:
    """x0 = c + lim S, the coefficient of the unique shadowing solution."""
    _require_analysable(params)
    tails, info = _deviation_tails(params, bundle)
    x0 = complex(bundle.c) + tails[0].to_complex()
    return ShadowResult(x0=x0, truncation=info)


def _check_residual_bound(
    params: CayleyParams, traj: Trajectory, epsilon: float
) -> None:
    """Reject inputs whose defect exceeds epsilon beyond rounding noise."""
    cap_eps = math.log2(epsilon)
    log_slack = math.log2(_RESIDUAL_SLACK)
    for k, noise_mag2, resid in _residual_terms(params, traj):
        r_mag = resid.mag2()
        if r_mag == -math.inf:
            continue
        if r_mag > max(cap_eps, noise_mag2 + log_slack) + 1.0:
            raise ParameterError(
                f"residual magnitude 2^{r_mag:.3f} at k={k} exceeds "
                f"epsilon = {epsilon}; the deviation premise fails"
            )


def certify(
    params: CayleyParams, bundle: SolutionBundle, epsilon: float
) -> HusReport:
    """Measure the perturbed trajectory against its shadowing solution.

    sup_deviation is max_k |phi(q^k) - x0 P(q^k)| over the window, computed
    in tail form; bound is epsilon/|w|; identity_error is the worst
    |w psi(q^k) - 1| over k <= min(k_max, 32).
    """
    if not epsilon > 0.0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    try:
        _require_analysable(params)
    except NotApplicableError:
        return HusReport(params=params, epsilon=epsilon, verdict=Verdict.NOT_APPLICABLE)
    _check_residual_bound(params, bundle.phi, epsilon)

    tails, info = _deviation_tails(params, bundle)
    x0 = complex(bundle.c) + tails[0].to_complex()
    sup_deviation = 0.0
    for k in range(bundle.window.k_max + 1):
        dev = (bundle.P[k] * tails[k]).abs_float()
        if dev > sup_deviation:
            sup_deviation = dev

    psi_values, _ = psi_profile(params, range(min(bundle.window.k_max, 32) + 1))
    identity_error = max(abs(params.w * v - 1.0) for v in psi_values.values())

    bound = epsilon / abs(params.w)
    verdict = (
        Verdict.BOUND_HOLDS
        if sup_deviation <= bound * (1.0 + 1e-9)
        else Verdict.BOUND_VIOLATED
    )
    return HusReport(
        params=params,
        epsilon=epsilon,
        verdict=verdict,
        x0=x0,
        sup_deviation=sup_deviation,
        bound=bound,
        identity_error=identity_error,
        truncation=info,
    )


def uniqueness_probe(
    params: CayleyParams, bundle: SolutionBundle, delta: complex
) -> UniquenessProbe:
    """Show that the candidate (x0 + delta) P leaves the 2*epsilon/|w| tube."""
    _require_analysable(params)
    if delta == 0:
        raise ParameterError("delta must be nonzero; x0 itself is the shadow")
    tails, _ = _deviation_tails(params, bundle)
    delta_sc = ScaledComplex.from_complex(delta)
    threshold = 2.0 * bundle.spec.epsilon / abs(params.w)
    max_dev = 0.0
    first_k = None
    for k in range(bundle.window.k_max + 1):
        dev = (bundle.P[k] * (tails[k] + delta_sc)).abs_float()
        if dev > max_dev:
            max_dev = dev
        if dev > threshold:
            first_k = k
            break
    return UniquenessProbe(
        delta=complex(delta),
        threshold=threshold,
        first_violation_k=first_k,
        max_deviation=max_dev,
    )
