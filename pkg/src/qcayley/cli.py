"""Command-line front end.

Subcommands: solve, perturb, hus, identity, ratio, cycle, diverge, sweep.
Reports are JSON (canonical) or CSV; --plot additionally renders matplotlib
figures next to the report.  Identical configuration and seed produce byte
identical report files; no timestamps are embedded.

Exit codes: 0 success (verdict BoundHolds / completed demo), 1 usage error or
inapplicable analysis, 2 forbidden coefficient (or near-singular under
--strict), 3 truncation or convergence failure, 4 certified BoundViolated.
Every failure also emits a JSON diagnostic object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .cayley_core import CayleyParams, ValidityStatus
from .exceptions import (
    ConvergenceError,
    ForbiddenParameterError,
    NotApplicableError,
    ParameterError,
    TruncationError,
)
from .hus_analysis import (
    Verdict,
    certify,
    deviation_profile,
    psi_profile,
    term_ratio_profile,
)
from .instability import eta_half_S_divergence, two_cycle, w_zero_divergence
from .lattice import LatticeWindow, default_k_max
from .report_io import (
    CsvBuilder,
    bundle_to_json,
    divergence_to_json,
    dumps,
    hus_report_to_json,
    make_report,
    params_to_json,
    trajectory_csv,
    trajectory_to_json,
    truncation_to_json,
    two_cycle_to_json,
    validity_to_json,
)
from .solutions import (
    ConstantComplex,
    PerturbationSpec,
    RandomPhase,
    UnitPhaseOfP,
    product_solution,
    synthesize,
)
from .sweep import (
    DEFAULT_SEED,
    run_sweep,
    sweep_csv,
    sweep_json_payload,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORBIDDEN = 2
EXIT_NO_CONVERGENCE = 3
EXIT_BOUND_VIOLATED = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise _UsageError(message)


def _add_lattice_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=float, required=True, help="lattice ratio, q > 1")
    p.add_argument(
        "--kmax",
        type=int,
        default=None,
        help="window size (default: QCAYLEY_KMAX or 256)",
    )


def _add_coeff_args(p: argparse.ArgumentParser, eta_default: float | None = None) -> None:
    if eta_default is None:
        p.add_argument("--eta", type=float, required=True, help="averaging weight in [0, 1/2]")
    else:
        p.add_argument("--eta", type=float, default=eta_default)
    p.add_argument("--w-re", type=float, default=0.0, help="Re w")
    p.add_argument("--w-im", type=float, default=0.0, help="Im w")


def _add_perturbation_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=1.0, help="perturbation budget, > 0")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="forcing seed")
    p.add_argument("--c-re", type=float, default=0.0, help="Re of the initial value phi(1)")
    p.add_argument("--c-im", type=float, default=0.0)
    p.add_argument(
        "--perturbation",
        choices=["random-phase", "unit-phase", "constant"],
        default="random-phase",
    )
    p.add_argument("--constant-re", type=float, default=None, help="Re E for --perturbation constant")
    p.add_argument("--constant-im", type=float, default=0.0)


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", default="-", help="report path, '-' for stdout")
    p.add_argument("--plot", action="store_true", help="render figures next to the report")
    p.add_argument("--plot-dir", default=None, help="directory for figures (default: report directory)")
    p.add_argument("--strict", action="store_true", help="treat near-singular coefficients as errors")


def build_parser() -> _Parser:
    parser = _Parser(prog="qcayley", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qcayley {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", parents=[], help="exact product solution P")
    _add_lattice_args(sp)
    _add_coeff_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("perturb", help="synthesize a perturbed trajectory bundle")
    _add_lattice_args(sp)
    _add_coeff_args(sp)
    _add_perturbation_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("hus", help="stability certificate against epsilon/|w|")
    _add_lattice_args(sp)
    _add_coeff_args(sp)
    _add_perturbation_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("identity", help="tail-sum identity table w*psi - 1")
    _add_lattice_args(sp)
    _add_coeff_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("ratio", help="forced-series term-ratio profile")
    _add_lattice_args(sp)
    _add_coeff_args(sp)
    _add_output_args(sp)

    sp = sub.add_parser("cycle", help="two-cycle limit of P at eta = 1/2")
    _add_lattice_args(sp)
    _add_coeff_args(sp, eta_default=0.5)
    _add_output_args(sp)

    sp = sub.add_parser("diverge", help="instability evidence (w = 0 or eta = 1/2)")
    _add_lattice_args(sp)
    _add_coeff_args(sp)
    sp.add_argument("--epsilon", type=float, default=1.0)
    sp.add_argument("--c-re", type=float, default=0.0, help="Re of the candidate solution coefficient")
    sp.add_argument("--c-im", type=float, default=0.0)
    _add_output_args(sp)

    sp = sub.add_parser("sweep", help="randomized certification sweep")
    sp.add_argument("--draws", type=int, required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--epsilon", type=float, default=1.0)
    sp.add_argument("--q-min", type=float, default=1.0)
    sp.add_argument("--q-max", type=float, default=3.0)
    sp.add_argument("--eta-min", type=float, default=0.0)
    sp.add_argument("--eta-max", type=float, default=0.45)
    sp.add_argument("--wabs-min", type=float, default=0.1)
    sp.add_argument("--wabs-max", type=float, default=10.0)
    sp.add_argument("--warg-min", type=float, default=0.0)
    sp.add_argument("--warg-max", type=float, default=2.0 * math.pi)
    sp.add_argument("--kmax", type=int, default=None)
    _add_output_args(sp)

    return parser


def _resolved_config(args: argparse.Namespace) -> dict:
    skip = {"command"}
    return {
        key.replace("_", "-"): value
        for key, value in sorted(vars(args).items())
        if key not in skip
    }


def _k_max(args: argparse.Namespace) -> int:
    k_max = args.kmax if args.kmax is not None else default_k_max()
    if k_max < 1:
        raise _UsageError(f"kmax must be >= 1, got {k_max}")
    return k_max


def _params(args: argparse.Namespace) -> CayleyParams:
    try:
        params = CayleyParams(q=args.q, eta=args.eta, w=complex(args.w_re, args.w_im))
    except ParameterError as exc:
        raise _UsageError(str(exc)) from exc
    params.require_valid()
    if args.strict and params.validity.status is ValidityStatus.NEAR_SINGULAR:
        v = params.validity
        raise ForbiddenParameterError(
            f"near-singular coefficient rejected under --strict: relative "
            f"distance {v.distance:.3e} to the forbidden value at k={v.k}",
            k=v.k,
            branch=v.branch,
        )
    return params


def _perturbation_spec(args: argparse.Namespace) -> PerturbationSpec:
    if args.perturbation == "random-phase":
        kind = RandomPhase(seed=args.seed)
    elif args.perturbation == "unit-phase":
        kind = UnitPhaseOfP()
    else:
        value = complex(
            args.constant_re if args.constant_re is not None else -args.epsilon,
            args.constant_im,
        )
        kind = ConstantComplex(value)
    return PerturbationSpec(epsilon=args.epsilon, kind=kind)


def _write_report(text: str, args: argparse.Namespace) -> None:
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")


def _figure_path(args: argparse.Namespace, name: str) -> Path:
    if args.plot_dir is not None:
        base = Path(args.plot_dir)
    elif args.output != "-":
        base = Path(args.output).parent
    else:
        base = Path(".")
    base.mkdir(parents=True, exist_ok=True)
    if args.output != "-":
        stem = Path(args.output).stem
        return base / f"{stem}_{name}.png"
    return base / f"qcayley_{args.command}_{name}.png"


# -- subcommand handlers -----------------------------------------------------


def _cmd_solve(args) -> int:
    params = _params(args)
    window = LatticeWindow(args.q, _k_max(args))
    P = product_solution(params, window)
    config = _resolved_config(args)
    if args.format == "json":
        report = make_report(
            "solve",
            config,
            {
                "params": params_to_json(params),
                "validity": validity_to_json(params.validity),
                "P": trajectory_to_json(P),
            },
        )
        _write_report(dumps(report), args)
    else:
        _write_report(trajectory_csv(config, {"P": P}, params.validity), args)
    if args.plot:
        from . import plots

        plots.trajectory_magnitude(P, _figure_path(args, "magnitude"))
    return EXIT_OK


def _cmd_perturb(args) -> int:
    params = _params(args)
    window = LatticeWindow(args.q, _k_max(args))
    spec = _perturbation_spec(args)
    bundle = synthesize(params, window, spec, c=complex(args.c_re, args.c_im))
    config = _resolved_config(args)
    if args.format == "json":
        report = make_report(
            "perturb",
            config,
            {
                "validity": validity_to_json(params.validity),
                "bundle": bundle_to_json(bundle),
            },
        )
        _write_report(dumps(report), args)
    else:
        _write_report(
            trajectory_csv(
                config,
                {"P": bundle.P, "S": bundle.S, "phi": bundle.phi, "E": bundle.E},
                params.validity,
            ),
            args,
        )
    if args.plot:
        from . import plots

        plots.bundle_overview(bundle, _figure_path(args, "bundle"))
    return EXIT_OK


def _cmd_hus(args) -> int:
    params = _params(args)
    window = LatticeWindow(args.q, _k_max(args))
    spec = _perturbation_spec(args)
    bundle = synthesize(params, window, spec, c=complex(args.c_re, args.c_im))
    report = certify(params, bundle, args.epsilon)
    if report.verdict is Verdict.NOT_APPLICABLE:
        raise NotApplicableError(
            "the stability certificate needs w != 0 and eta < 1/2"
        )
    config = _resolved_config(args)
    devs = deviation_profile(params, bundle)
    if args.format == "json":
        payload = hus_report_to_json(report)
        payload["deviations"] = devs
        out = make_report(
            "hus",
            config,
            {"validity": validity_to_json(params.validity), "report": payload},
        )
        _write_report(dumps(out), args)
    else:
        builder = CsvBuilder(config)
        builder.comment("validity " + json.dumps(validity_to_json(params.validity)))
        builder.comment(
            "summary "
            + json.dumps(
                {
                    "verdict": report.verdict.value,
                    "sup_deviation": report.sup_deviation,
                    "bound": report.bound,
                    "identity_error": report.identity_error,
                    "x0": {"re": report.x0.real, "im": report.x0.imag},
                    "truncation": truncation_to_json(report.truncation),
                },
                sort_keys=True,
            )
        )
        builder.row(["k", "deviation", "bound"])
        for k, dev in enumerate(devs):
            builder.row([k, dev, report.bound])
        _write_report(builder.getvalue(), args)
    if args.plot:
        from . import plots

        plots.deviation_vs_bound(devs, report, _figure_path(args, "deviation"))
    return EXIT_OK if report.verdict is Verdict.BOUND_HOLDS else EXIT_BOUND_VIOLATED


def _cmd_identity(args) -> int:
    params = _params(args)
    ks = list(range(min(_k_max(args), 32) + 1))
    values, info = psi_profile(params, ks)
    errors = {k: abs(params.w * values[k] - 1.0) for k in ks}
    config = _resolved_config(args)
    if args.format == "json":
        report = make_report(
            "identity",
            config,
            {
                "params": params_to_json(params),
                "validity": validity_to_json(params.validity),
                "truncation": truncation_to_json(info),
                "table": [
                    {
                        "k": k,
                        "psi": {"re": values[k].real, "im": values[k].imag},
                        "identity_error": errors[k],
                    }
                    for k in ks
                ],
            },
        )
        _write_report(dumps(report), args)
    else:
        builder = CsvBuilder(config)
        builder.comment("validity " + json.dumps(validity_to_json(params.validity)))
        builder.row(["k", "psi_re", "psi_im", "identity_error"])
        for k in ks:
            builder.row([k, values[k].real, values[k].imag, errors[k]])
        _write_report(builder.getvalue(), args)
    if args.plot:
        from . import plots

        plots.identity_errors(ks, [errors[k] for k in ks], _figure_path(args, "identity"))
    return EXIT_OK


def _cmd_ratio(args) -> int:
    params = _params(args)
    window = LatticeWindow(args.q, _k_max(args))
    ratios = term_ratio_profile(params, window)
    limit = params.eta / (1.0 - params.eta)
    config = _resolved_config(args)
    if args.format == "json":
        report = make_report(
            "ratio",
            config,
            {
                "params": params_to_json(params),
                "validity": validity_to_json(params.validity),
                "limit": limit,
                "ratios": ratios,
            },
        )
        _write_report(dumps(report), args)
    else:
        builder = CsvBuilder(config)
        builder.comment("validity " + json.dumps(validity_to_json(params.validity)))
        builder.comment(f"limit {limit!r}")
        builder.row(["m", "ratio"])
        for m, r in enumerate(ratios):
            builder.row([m, r])
        _write_report(builder.getvalue(), args)
    if args.plot:
        from . import plots

        plots.ratio_profile(ratios, limit, _figure_path(args, "ratio"))
    return EXIT_OK


def _cmd_cycle(args) -> int:
    params = _params(args)
    if params.eta != 0.5:
        raise _UsageError("cycle requires --eta 0.5")
    window = LatticeWindow(args.q, _k_max(args))
    result = two_cycle(params, window)
    config = _resolved_config(args)
    if args.format == "json":
        report = make_report(
            "cycle",
            config,
            {
                "params": params_to_json(params),
                "validity": validity_to_json(params.validity),
                "result": two_cycle_to_json(result),
            },
        )
        _write_report(dumps(report), args)
    else:
        builder = CsvBuilder(config)
        builder.comment("validity " + json.dumps(validity_to_json(params.validity)))
        builder.row(["p_star_re", "p_star_im", "converged_at", "cycle_residual"])
        builder.row(
            [result.p_star.real, result.p_star.imag, result.converged_at, result.cycle_residual]
        )
        _write_report(builder.getvalue(), args)
    if args.plot:
        from . import plots

        P = product_solution(params, window)
        plots.cycle_plane(P, result, _figure_path(args, "plane"))
    return EXIT_OK


def _cmd_diverge(args) -> int:
    params = _params(args)
    window = LatticeWindow(args.q, _k_max(args))
    c = complex(args.c_re, args.c_im)
    if params.eta == 0.5:
        evidence = eta_half_S_divergence(params, window, args.epsilon, c)
        mode = "eta-half"
    elif params.w == 0:
        evidence = w_zero_divergence(args.q, window, args.epsilon, c)
        mode = "w-zero"
    else:
        raise _UsageError("diverge demonstrates instability: needs --eta 0.5 or w = 0")
    config = _resolved_config(args)
    if args.format == "json":
        report = make_report(
            "diverge",
            config,
            {
                "params": params_to_json(params),
                "validity": validity_to_json(params.validity),
                "mode": mode,
                "evidence": divergence_to_json(evidence),
            },
        )
        _write_report(dumps(report), args)
    else:
        builder = CsvBuilder(config)
        builder.comment("validity " + json.dumps(validity_to_json(params.validity)))
        builder.comment(f"mode {mode}")
        for crossing in evidence.crossings:
            builder.comment(
                f"crossing M={crossing.multiple:g} first_index="
                f"{'' if crossing.first_index is None else crossing.first_index}"
            )
        builder.row(["k", "deviation"])
        for k, d in enumerate(evidence.deviations):
            builder.row([k, d])
        _write_report(builder.getvalue(), args)
    if args.plot:
        from . import plots

        plots.divergence(evidence, _figure_path(args, "divergence"))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.draws < 0:
        raise _UsageError(f"draws must be >= 0, got {args.draws}")
    if not args.eta_max < 0.5:
        raise _UsageError(
            "sweep eta range must stay below 0.5; eta = 1/2 is reserved to "
            "cycle/diverge"
        )
    k_max = args.kmax if args.kmax is not None else default_k_max()
    try:
        result = run_sweep(
            draws=args.draws,
            seed=args.seed,
            epsilon=args.epsilon,
            q_range=(args.q_min, args.q_max),
            eta_range=(args.eta_min, args.eta_max),
            wabs_range=(args.wabs_min, args.wabs_max),
            warg_range=(args.warg_min, args.warg_max),
            k_max=k_max,
        )
    except ParameterError as exc:
        raise _UsageError(str(exc)) from exc
    config = _resolved_config(args)
    if args.format == "json":
        report = make_report("sweep", config, sweep_json_payload(result))
        _write_report(dumps(report), args)
    else:
        _write_report(sweep_csv(result, config), args)
    if args.plot:
        from . import plots

        plots.sweep_ratios(result, _figure_path(args, "ratios"))
    if result.summary.bound_violated:
        return EXIT_BOUND_VIOLATED
    return EXIT_OK


_HANDLERS = {
    "solve": _cmd_solve,
    "perturb": _cmd_perturb,
    "hus": _cmd_hus,
    "identity": _cmd_identity,
    "ratio": _cmd_ratio,
    "cycle": _cmd_cycle,
    "diverge": _cmd_diverge,
    "sweep": _cmd_sweep,
}


def _diagnostic(kind: str, message: str, **extra) -> None:
    payload = {"error": {"kind": kind, "message": message, **extra}}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        _diagnostic("usage", str(exc))
        return EXIT_USAGE
    except NotApplicableError as exc:
        _diagnostic("not_applicable", str(exc))
        return EXIT_USAGE
    except ForbiddenParameterError as exc:
        _diagnostic("forbidden", str(exc), k=exc.k, branch=exc.branch)
        return EXIT_FORBIDDEN
    except TruncationError as exc:
        _diagnostic("truncation", str(exc), terms_used=exc.terms_used)
        return EXIT_NO_CONVERGENCE
    except ConvergenceError as exc:
        _diagnostic("no_convergence", str(exc))
        return EXIT_NO_CONVERGENCE
    except ParameterError as exc:
        _diagnostic("usage", str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
