"""Figure rendering for the report path.

Each function takes already-computed report data and writes one PNG next to
the delimited output.  Kept separate from the analysis modules so headless
runs never pay the matplotlib import unless figures were requested.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .cayley_core import Trajectory
from .hus_analysis import HusReport
from .instability import DivergenceEvidence, TwoCycleResult
from .solutions import SolutionBundle
from .sweep import SweepResult

_FIGSIZE = (6.4, 4.0)


def _finish(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def trajectory_magnitude(traj: Trajectory, path: Path, label: str = "P") -> Path:
    """log2 |value| against the lattice index."""
    ks = list(range(traj.window.k_max + 1))
    mags = [traj[k].mag2() for k in ks]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(ks, mags, marker=".", lw=1)
    ax.set_xlabel("k")
    ax.set_ylabel(f"log2 |{label}(q^k)|")
    ax.set_title(f"q = {traj.window.q}")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def bundle_overview(bundle: SolutionBundle, path: Path) -> Path:
    """Magnitudes of P, S, phi and the forcing on one axis set."""
    ks = list(range(bundle.window.k_max + 1))
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name, traj in (("P", bundle.P), ("S", bundle.S), ("phi", bundle.phi), ("E", bundle.E)):
        ax.plot(ks, [traj[k].mag2() for k in ks], lw=1, label=name)
    ax.set_xlabel("k")
    ax.set_ylabel("log2 magnitude")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def deviation_vs_bound(
    deviations: Sequence[float], report: HusReport, path: Path
) -> Path:
    """Per-index deviation from the shadowing solution with the bound line."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ks = list(range(len(deviations)))
    ax.plot(ks, deviations, marker=".", lw=1, label="|phi - x0 P|")
    ax.axhline(report.bound, color="tab:red", ls="--", label="epsilon/|w|")
    ax.set_xlabel("k")
    ax.set_ylabel("deviation")
    ax.set_title(f"verdict: {report.verdict.value}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def identity_errors(ks: Sequence[int], errors: Sequence[float], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.semilogy(list(ks), [max(e, 1e-18) for e in errors], marker="o", lw=1)
    ax.set_xlabel("k")
    ax.set_ylabel("|w psi(q^k) - 1|")
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def ratio_profile(ratios: Sequence[float], limit: float, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(list(range(len(ratios))), ratios, marker=".", lw=1, label="a_{m+1}/a_m")
    ax.axhline(limit, color="tab:red", ls="--", label="eta/(1-eta)")
    ax.set_xlabel("m")
    ax.set_ylabel("term ratio")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def cycle_plane(traj: Trajectory, result: TwoCycleResult, path: Path) -> Path:
    """Iterates of P in the complex plane, the limit pair marked."""
    zs = [traj[k].try_complex() for k in range(traj.window.k_max + 1)]
    zs = [z for z in zs if z is not None]
    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    ax.plot([z.real for z in zs], [z.imag for z in zs], ".-", lw=0.5, alpha=0.6)
    for sign in (1, -1):
        p = sign * result.p_star
        ax.plot(p.real, p.imag, "r*", ms=14)
    ax.set_xlabel("Re P")
    ax.set_ylabel("Im P")
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def divergence(evidence: DivergenceEvidence, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    devs = [max(d, 1e-18) if math.isfinite(d) else float("nan") for d in evidence.deviations]
    ax.semilogy(list(range(len(devs))), devs, marker=".", lw=1, label="|phi - c P|")
    for crossing in evidence.crossings:
        ax.axhline(crossing.multiple, ls=":", color="gray")
        if crossing.first_index is not None:
            ax.axvline(crossing.first_index, ls=":", color="tab:orange", alpha=0.7)
    ax.set_xlabel("k")
    ax.set_ylabel("deviation")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def sweep_ratios(result: SweepResult, path: Path) -> Path:
    """Deviation-to-bound ratio against |w| for every draw."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    if result.rows:
        xs = [abs(r.params.w) for r in result.rows]
        ys = [r.ratio for r in result.rows]
        colors = ["tab:blue" if r.ratio <= 1.0 + 1e-9 else "tab:red" for r in result.rows]
        ax.scatter(xs, ys, s=12, c=colors, alpha=0.7)
        ax.set_xscale("log")
    ax.axhline(1.0, color="tab:red", ls="--", label="bound")
    ax.set_xlabel("|w|")
    ax.set_ylabel("sup deviation / (epsilon/|w|)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)
