"""Randomized certification sweeps over the admissible parameter grid.

Each draw samples (q, eta, |w|, arg w) from the configured ranges, builds a
seeded random-phase perturbation, certifies it, and records the outcome as
one row.  Forbidden draws are re-sampled and counted.  Identical seeds
reproduce identical rows byte for byte.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass

from .cayley_core import CayleyParams, ValidityStatus
from .exceptions import ParameterError
from .hus_analysis import Verdict, certify
from .lattice import LatticeWindow
from .solutions import PerturbationSpec, RandomPhase, synthesize

DEFAULT_SEED = 1729

# Default grid: q in (1, 3], eta in [0, 0.45], |w| in [0.1, 10], arg w full circle.
DEFAULT_Q_RANGE = (1.0, 3.0)
DEFAULT_ETA_RANGE = (0.0, 0.45)
DEFAULT_WABS_RANGE = (0.1, 10.0)
DEFAULT_WARG_RANGE = (0.0, 2.0 * math.pi)

_MAX_RESAMPLES = 10_000


@dataclass(frozen=True)
class SweepRow:
    draw: int
    params: CayleyParams
    epsilon: float
    forcing_seed: int
    x0: complex
    sup_deviation: float
    bound: float
    identity_error: float
    verdict: Verdict
    resamples: int

    @property
    def ratio(self) -> float:
        return self.sup_deviation / self.bound


@dataclass(frozen=True)
class SweepSummary:
    draws: int
    bound_holds: int
    bound_violated: int
    max_ratio: float | None
    total_resamples: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    summary: SweepSummary


def draw_params(
    rng: random.Random,
    q_range: tuple[float, float] = DEFAULT_Q_RANGE,
    eta_range: tuple[float, float] = DEFAULT_ETA_RANGE,
    wabs_range: tuple[float, float] = DEFAULT_WABS_RANGE,
    warg_range: tuple[float, float] = DEFAULT_WARG_RANGE,
    reject_near_singular: bool = False,
) -> tuple[CayleyParams, int]:
    """One admissible parameter draw; returns (params, resample count).

    |w| is drawn log-uniformly (it is a magnitude range), everything else
    uniformly.  Draws with q <= 1 or a forbidden w are re-sampled.
    """
    if not 0.0 <= eta_range[0] <= eta_range[1] < 0.5:
        raise ParameterError(
            f"eta range {eta_range} must sit inside [0, 0.5); eta = 1/2 is "
            "reserved to the instability analyses"
        )
    if not 0.0 < wabs_range[0] <= wabs_range[1]:
        raise ParameterError(f"|w| range {wabs_range} must be positive")
    if not 1.0 <= q_range[0] <= q_range[1]:
        raise ParameterError(f"q range {q_range} must sit above 1")
    log_lo, log_hi = math.log(wabs_range[0]), math.log(wabs_range[1])
    resamples = 0
    while True:
        q = q_range[0] + (q_range[1] - q_range[0]) * rng.random()
        eta = eta_range[0] + (eta_range[1] - eta_range[0]) * rng.random()
        wabs = math.exp(log_lo + (log_hi - log_lo) * rng.random())
        warg = warg_range[0] + (warg_range[1] - warg_range[0]) * rng.random()
        w = wabs * cmath.exp(1j * warg)
        if q > 1.0:
            params = CayleyParams(q=q, eta=eta, w=w)
            if params.validity.status is ValidityStatus.VALID or (
                not reject_near_singular
                and params.validity.status is ValidityStatus.NEAR_SINGULAR
            ):
                return params, resamples
        resamples += 1
        if resamples > _MAX_RESAMPLES:
            raise ParameterError("parameter grid rejects essentially every draw")


def run_sweep(
    draws: int,
    seed: int = DEFAULT_SEED,
    epsilon: float = 1.0,
    q_range: tuple[float, float] = DEFAULT_Q_RANGE,
    eta_range: tuple[float, float] = DEFAULT_ETA_RANGE,
    wabs_range: tuple[float, float] = DEFAULT_WABS_RANGE,
    warg_range: tuple[float, float] = DEFAULT_WARG_RANGE,
    k_max: int | None = None,
) -> SweepResult:
    if draws < 0:
        raise ParameterError(f"draws must be >= 0, got {draws}")
    if not epsilon > 0.0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    rng = random.Random(seed)
    rows: list[SweepRow] = []
    holds = violated = total_resamples = 0
    max_ratio: float | None = None
    for draw in range(draws):
        params, resamples = draw_params(
            rng, q_range, eta_range, wabs_range, warg_range
        )
        forcing_seed = rng.getrandbits(32)
        window = LatticeWindow(params.q) if k_max is None else LatticeWindow(params.q, k_max)
        spec = PerturbationSpec(epsilon=epsilon, kind=RandomPhase(forcing_seed))
        bundle = synthesize(params, window, spec, c=0j)
        report = certify(params, bundle, epsilon)
        row = SweepRow(
            draw=draw,
            params=params,
            epsilon=epsilon,
            forcing_seed=forcing_seed,
            x0=report.x0,
            sup_deviation=report.sup_deviation,
            bound=report.bound,
            identity_error=report.identity_error,
            verdict=report.verdict,
            resamples=resamples,
        )
        rows.append(row)
        total_resamples += resamples
        if report.verdict is Verdict.BOUND_HOLDS:
            holds += 1
        else:
            violated += 1
        if max_ratio is None or row.ratio > max_ratio:
            max_ratio = row.ratio
    summary = SweepSummary(
        draws=draws,
        bound_holds=holds,
        bound_violated=violated,
        max_ratio=max_ratio,
        total_resamples=total_resamples,
    )
    return SweepResult(rows=tuple(rows), summary=summary)


def sweep_csv(result: SweepResult, config: dict) -> str:
    """One row per draw plus a trailing summary row."""
    from .report_io import CsvBuilder

    builder = CsvBuilder(config)
    builder.row(
        [
            "draw", "q", "eta", "w_re", "w_im", "epsilon", "forcing_seed",
            "validity", "x0_re", "x0_im", "sup_deviation", "bound", "ratio",
            "identity_error", "verdict", "resamples",
        ]
    )
    for r in result.rows:
        builder.row(
            [
                r.draw, r.params.q, r.params.eta, r.params.w.real, r.params.w.imag,
                r.epsilon, r.forcing_seed, r.params.validity.status.value,
                r.x0.real, r.x0.imag, r.sup_deviation, r.bound, r.ratio,
                r.identity_error, r.verdict.value, r.resamples,
            ]
        )
    s = result.summary
    if s.draws:
        builder.row(
            [
                "summary", "", "", "", "", "", "", "", "", "",
                "", "", s.max_ratio, "",
                f"holds={s.bound_holds};violated={s.bound_violated}",
                s.total_resamples,
            ]
        )
    return builder.getvalue()


def sweep_json_payload(result: SweepResult) -> dict:
    from .report_io import complex_to_json, params_to_json

    return {
        "rows": [
            {
                "draw": r.draw,
                "params": params_to_json(r.params),
                "epsilon": r.epsilon,
                "forcing_seed": r.forcing_seed,
                "x0": complex_to_json(r.x0),
                "sup_deviation": r.sup_deviation,
                "bound": r.bound,
                "ratio": r.ratio,
                "identity_error": r.identity_error,
                "verdict": r.verdict.value,
                "resamples": r.resamples,
            }
            for r in result.rows
        ],
        "summary": {
            "draws": result.summary.draws,
            "bound_holds": result.summary.bound_holds,
            "bound_violated": result.summary.bound_violated,
            "max_ratio": result.summary.max_ratio,
            "total_resamples": result.summary.total_resamples,
        },
    }
