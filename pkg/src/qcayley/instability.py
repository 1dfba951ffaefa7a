"""The two regimes without stability: w = 0 and the half-average case.

With w = 0 the product solution is constant 1 and a constant full-strength
forcing makes the perturbed trajectory drift like epsilon*(q^n - 1) away from
every exact solution.  At eta = 1/2 the step ratio tends to -1, the product
solution settles into an alternating pair {p*, -p*}, and the forced series
gains a nonvanishing term limit 2*epsilon/(w |p*|), so it diverges linearly
while P stays bounded away from zero: the deviation |P| |S - c| escapes every
threshold for every choice of c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cayley_core import CayleyParams, _ratio_parts
from .exceptions import ConvergenceError, ParameterError
from .lattice import LatticeWindow, scale_steps
from .scaled_complex import ONE, ScaledComplex
from .solutions import ConstantComplex, PerturbationSpec, UnitPhaseOfP, synthesize

CYCLE_REL_TOL = 1e-7
_LOG2_CYCLE_TOL = math.log2(CYCLE_REL_TOL)
THRESHOLD_MULTIPLES = (10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class TwoCycleResult:
    """Alternating limit pair {p*, -p*} of the product solution at eta = 1/2.

    p_star carries the canonical sign: nonnegative real part, tie broken
    toward nonnegative imaginary part.
    """

    p_star: complex
    converged_at: int
    cycle_residual: float


@dataclass(frozen=True)
class Crossing:
    multiple: float
    first_index: int | None  # None: not reached inside the window


@dataclass(frozen=True)
class DivergenceEvidence:
    """First indices where |phi - c P| escapes each threshold multiple."""

    crossings: tuple[Crossing, ...]
    c_tested: complex
    attained_max: float
    deviations: tuple[float, ...]


def _canonical_sign(p: complex) -> complex:
    if abs(p.real) <= 1e-12 * abs(p):
        return p if p.imag >= 0.0 else -p
    return p if p.real > 0.0 else -p


def _require_half(params: CayleyParams) -> None:
    params.require_valid()
    if params.eta != 0.5:
        raise ParameterError(
            f"this analysis is specific to eta = 1/2, got eta = {params.eta}"
        )


def two_cycle(params: CayleyParams, window: LatticeWindow) -> TwoCycleResult:
    """Iterate P until |P(q^{k+2}) - P(q^k)| < 1e-7 |P(q^k)| twice in a row."""
    _require_half(params)
    if params.w == 0:
        raise ParameterError("w = 0 gives the constant solution, not a two-cycle")

    values = [ONE]
    acc = ONE
    streak = 0
    for k, t, _ in scale_steps(window):
        if k >= window.k_max:
            break
        num, den = _ratio_parts(params, t)
        acc = acc * (num / den)
        values.append(acc)
        j = len(values) - 3  # newest comparison: P[j+2] against P[j]
        if j < 0:
            continue
        diff = values[j + 2] - values[j]
        if diff.mag2() < values[j].mag2() + _LOG2_CYCLE_TOL:
            streak += 1
            if streak >= 2:
                residual = 2.0 ** (diff.mag2() - values[j].mag2())
                return TwoCycleResult(
                    p_star=_canonical_sign(values[j + 2].to_complex()),
                    converged_at=j,
                    cycle_residual=residual,
                )
        else:
            streak = 0
    raise ConvergenceError(
        f"no two-cycle within k_max = {window.k_max}",
        last_values=[v.try_complex() for v in values[-4:]],
    )


def _collect_crossings(deviations: list[float], c: complex) -> DivergenceEvidence:
    crossings = tuple(
        Crossing(
            multiple=mult,
            first_index=next((k for k, d in enumerate(deviations) if d > mult), None),
        )
        for mult in THRESHOLD_MULTIPLES
    )
    return DivergenceEvidence(
        crossings=crossings,
        c_tested=complex(c),
        attained_max=max(deviations),
        deviations=tuple(deviations),
    )


def eta_half_S_divergence(
    params: CayleyParams,
    window: LatticeWindow,
    epsilon: float,
    c: complex = 0j,
) -> DivergenceEvidence:
    """Deviation growth |P| |S - c| under the forcing epsilon * P/|P|.

    Defined for any admissible w at eta = 1/2, including w = 0 where the
    deviation reduces to the plain geometric sum epsilon*(q^n - 1) shifted
    by c.
    """
    _require_half(params)
    spec = PerturbationSpec(epsilon=epsilon, kind=UnitPhaseOfP())
    bundle = synthesize(params, window, spec, c=0j)
    c_sc = ScaledComplex.from_complex(c)
    deviations = [
        (bundle.P[k] * (bundle.S[k] - c_sc)).abs_float()
        for k in range(window.k_max + 1)
    ]
    return _collect_crossings(deviations, c)


def w_zero_divergence(
    q: float,
    window: LatticeWindow,
    epsilon: float,
    c: complex = 0j,
) -> DivergenceEvidence:
    """Deviation |eps (q^n - 1) - c| for w = 0 under constant forcing eps."""
    if window.q != q:
        window = LatticeWindow(q, window.k_max)
    params = CayleyParams(q=q, eta=0.0, w=0j)
    spec = PerturbationSpec(epsilon=epsilon, kind=ConstantComplex(complex(epsilon)))
    bundle = synthesize(params, window, spec, c=0j)
    c_sc = ScaledComplex.from_complex(c)
    deviations = [
        (bundle.phi[k] - c_sc).abs_float() for k in range(window.k_max + 1)
    ]
    return _collect_crossings(deviations, c)


def step_ratio_burn_in(
    params: CayleyParams, window: LatticeWindow, tol: float = 1e-6
) -> int | None:
    """Smallest k0 with |r(q^k) + 1| < tol for every k0 <= k < k_max."""
    _require_half(params)
    burn_in = None
    for k, t, _ in scale_steps(window):
        if k >= window.k_max:
            break
        num, den = _ratio_parts(params, t)
        off = ((num / den) + ONE).abs_float()
        if off < tol:
            if burn_in is None:
                burn_in = k
        else:
            burn_in = None
    return burn_in
