"""JSON and CSV encodings of the package's result types.

JSON is the canonical format.  Scaled values are written losslessly as
{"re": mantissa_re, "im": mantissa_im, "exp2": exponent}; plain complex
numbers as {"re", "im"}.  CSV projections carry mantissa/exponent columns so
nothing is lost outside the double range, and every artifact embeds the
resolved run configuration.
"""

from __future__ import annotations

import io
import json
import math
from typing import Any, Mapping, Sequence

from .cayley_core import CayleyParams, Trajectory, Validity
from .hus_analysis import HusReport, TruncationInfo, Verdict
from .instability import DivergenceEvidence, TwoCycleResult
from .scaled_complex import ScaledComplex, decimal_str
from .solutions import (
    ConstantComplex,
    Custom,
    PerturbationSpec,
    RandomPhase,
    SolutionBundle,
    UnitPhaseOfP,
)


def scaled_to_json(a: ScaledComplex) -> dict[str, Any]:
    return {"re": a.re, "im": a.im, "exp2": a.exp2}


def scaled_from_json(payload: Mapping[str, Any]) -> ScaledComplex:
    from .scaled_complex import _normalize

    return _normalize(float(payload["re"]), float(payload["im"]), int(payload["exp2"]))


def complex_to_json(z: complex | None) -> dict[str, float] | None:
    if z is None:
        return None
    return {"re": z.real, "im": z.imag}


def validity_to_json(v: Validity) -> dict[str, Any]:
    return {
        "status": v.status.value,
        "k": v.k,
        "branch": v.branch,
        "distance": v.distance,
    }


def params_to_json(p: CayleyParams) -> dict[str, Any]:
    return {
        "q": p.q,
        "eta": p.eta,
        "w": complex_to_json(p.w),
        "validity": validity_to_json(p.validity),
    }


def spec_to_json(spec: PerturbationSpec) -> dict[str, Any]:
    kind = spec.kind
    if isinstance(kind, ConstantComplex):
        detail: dict[str, Any] = {"kind": "constant", "value": complex_to_json(kind.value)}
    elif isinstance(kind, UnitPhaseOfP):
        detail = {"kind": "unit-phase"}
    elif isinstance(kind, RandomPhase):
        detail = {"kind": "random-phase", "seed": kind.seed}
    elif isinstance(kind, Custom):
        detail = {"kind": "custom", "values": [complex_to_json(v) for v in kind.values]}
    else:
        raise TypeError(f"unknown perturbation kind {kind!r}")
    return {"epsilon": spec.epsilon, **detail}


def trajectory_to_json(traj: Trajectory) -> dict[str, Any]:
    return {
        "q": traj.window.q,
        "k_max": traj.window.k_max,
        "values": [scaled_to_json(v) for v in traj.values],
    }


def truncation_to_json(info: TruncationInfo | None) -> dict[str, Any] | None:
    if info is None:
        return None
    return {"terms_used": info.terms_used, "tail_bound": info.tail_bound}


def bundle_to_json(bundle: SolutionBundle) -> dict[str, Any]:
    return {
        "params": params_to_json(bundle.params),
        "perturbation": spec_to_json(bundle.spec),
        "c": complex_to_json(bundle.c),
        "P": trajectory_to_json(bundle.P),
        "S": trajectory_to_json(bundle.S),
        "phi": trajectory_to_json(bundle.phi),
        "E": trajectory_to_json(bundle.E),
    }


def hus_report_to_json(report: HusReport) -> dict[str, Any]:
    return {
        "params": params_to_json(report.params),
        "epsilon": report.epsilon,
        "verdict": report.verdict.value,
        "x0": complex_to_json(report.x0),
        "sup_deviation": report.sup_deviation,
        "bound": report.bound,
        "identity_error": report.identity_error,
        "truncation": truncation_to_json(report.truncation),
    }


def two_cycle_to_json(result: TwoCycleResult) -> dict[str, Any]:
    return {
        "p_star": complex_to_json(result.p_star),
        "converged_at": result.converged_at,
        "cycle_residual": result.cycle_residual,
    }


def divergence_to_json(evidence: DivergenceEvidence) -> dict[str, Any]:
    return {
        "c_tested": complex_to_json(evidence.c_tested),
        "attained_max": _json_float(evidence.attained_max),
        "crossings": [
            {"multiple": c.multiple, "first_index": c.first_index}
            for c in evidence.crossings
        ],
        "deviations": [_json_float(d) for d in evidence.deviations],
    }


def _json_float(x: float) -> float | str:
    # json.dumps rejects infinities under allow_nan=False; stringify them.
    return x if math.isfinite(x) else repr(x)


def make_report(command: str, config: Mapping[str, Any], payload: Mapping[str, Any]) -> dict[str, Any]:
    return {"command": command, "config": dict(config), **payload}


def dumps(report: Mapping[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


# -- CSV projections ---------------------------------------------------------


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    return str(x)


def t_string(t: ScaledComplex) -> str:
    """Lattice value as text, decimal-scientific outside the double range."""
    z = t.try_complex()
    if z is not None:
        return repr(z.real)
    return decimal_str(t)


class CsvBuilder:
    """Comment-prefixed CSV with deterministic float formatting."""

    def __init__(self, config: Mapping[str, Any]):
        self._buf = io.StringIO()
        self.comment("config " + json.dumps(dict(config), sort_keys=True))

    def comment(self, text: str) -> None:
        self._buf.write(f"# {text}\n")

    def row(self, cells: Sequence[Any]) -> None:
        self._buf.write(",".join(_fmt(c) for c in cells) + "\n")

    def getvalue(self) -> str:
        return self._buf.getvalue()


def trajectory_csv(
    config: Mapping[str, Any],
    trajectories: Mapping[str, Trajectory],
    validity: Validity | None = None,
) -> str:
    """Columns k, t, then (re, im, exp2) per named trajectory."""
    builder = CsvBuilder(config)
    if validity is not None:
        builder.comment("validity " + json.dumps(validity_to_json(validity)))
    names = list(trajectories)
    first = trajectories[names[0]]
    header = ["k", "t"]
    for name in names:
        header += [f"{name}_re", f"{name}_im", f"{name}_exp2"]
    builder.row(header)
    from .lattice import scale_steps

    for k, t, _ in scale_steps(first.window):
        cells: list[Any] = [k, t_string(t)]
        for name in names:
            v = trajectories[name][k]
            cells += [v.re, v.im, v.exp2]
        builder.row(cells)
    return builder.getvalue()
