"""Exact product solutions, forced sums, and perturbed-trajectory synthesis.

The homogeneous recurrence has the product solution

    P(q^n) = prod_{k=0}^{n-1} r(q^k),        P(1) = 1,

and a forcing E with |E| <= epsilon enters through

    phi(q t) = r(t) phi(t) + (q-1) t E(t) / (1 - w eta (q-1) t),

whose solutions are exactly phi = P*S + c*P with the discrete
variation-of-parameters sum

    S(q^n) = sum_{m=0}^{n-1} (q-1) q^m E(q^m)
             / ((1 + w (1-eta) (q-1) q^m) P(q^m)).

phi is generated by the forward recurrence; the P*S + c*P identity is a
consequence checked by the tests, not the constructor, because the recurrence
avoids multiplying enormous P by tiny S.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass

from .cayley_core import CayleyParams, Trajectory, _ratio_parts
from .exceptions import ParameterError
from .lattice import LatticeWindow, scale_steps
from .scaled_complex import ONE, ScaledComplex


# -- perturbation specifications -------------------------------------------


@dataclass(frozen=True)
class ConstantComplex:
    """E is one complex constant with |value| <= epsilon."""

    value: complex


@dataclass(frozen=True)
class UnitPhaseOfP:
    """E(t) = epsilon * P(t)/|P(t)|: full-strength forcing aligned with P."""


@dataclass(frozen=True)
class RandomPhase:
    """E(q^m) = epsilon * exp(i theta_m) with theta_m drawn from a seeded RNG."""

    seed: int


@dataclass(frozen=True)
class Custom:
    """Tabulated complex forcing values, |value| <= epsilon each.

    Beyond the end of the table the forcing is taken to be zero.
    """

    values: tuple[complex, ...]


PerturbationKind = ConstantComplex | UnitPhaseOfP | RandomPhase | Custom


@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float
    kind: PerturbationKind

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if isinstance(self.kind, ConstantComplex):
            if abs(self.kind.value) > self.epsilon * (1.0 + 1e-12):
                raise ParameterError(
                    f"constant perturbation |{self.kind.value}| exceeds "
                    f"epsilon = {self.epsilon}"
                )
        elif isinstance(self.kind, Custom):
            for m, v in enumerate(self.kind.values):
                if abs(v) > self.epsilon * (1.0 + 1e-12):
                    raise ParameterError(
                        f"custom perturbation value at index {m} exceeds "
                        f"epsilon = {self.epsilon}"
                    )

    def sampler(self) -> "ForcingSampler":
        return ForcingSampler(self)


class ForcingSampler:
    """Deterministic access to E(q^m) for arbitrary m >= 0.

    Random phases are materialized in index order and cached, so the stream
    is a pure function of the seed regardless of how far the tail sums probe.
    """

    def __init__(self, spec: PerturbationSpec):
        self.spec = spec
        kind = spec.kind
        self._phases: list[complex] = []
        self._rng = random.Random(kind.seed) if isinstance(kind, RandomPhase) else None

    def value(self, m: int, p_m: ScaledComplex) -> ScaledComplex:
        """E(q^m); p_m is the product solution there (used by unit-phase)."""
        kind = self.spec.kind
        eps = self.spec.epsilon
        if isinstance(kind, ConstantComplex):
            return ScaledComplex.from_complex(kind.value)
        if isinstance(kind, UnitPhaseOfP):
            unit = p_m / p_m.abs()
            return unit.scale_float(eps)
        if isinstance(kind, RandomPhase):
            while len(self._phases) <= m:
                self._phases.append(cmath.exp(2j * math.pi * self._rng.random()))
            return ScaledComplex.from_complex(eps * self._phases[m])
        if isinstance(kind, Custom):
            if m < len(kind.values):
                return ScaledComplex.from_complex(kind.values[m])
            return ScaledComplex.zero()
        raise TypeError(f"unknown perturbation kind {kind!r}")


# -- solution construction --------------------------------------------------


@dataclass(frozen=True)
class SolutionBundle:
    """A perturbed trajectory phi = P*S + c*P together with its parts."""

    params: CayleyParams
    spec: PerturbationSpec
    c: complex
    P: Trajectory
    S: Trajectory
    phi: Trajectory
    E: Trajectory

    @property
    def window(self) -> LatticeWindow:
        return self.P.window


def product_solution(params: CayleyParams, window: LatticeWindow) -> Trajectory:
    """The normalized exact solution P, P(1) = 1, by the one-step recurrence."""
    params.require_valid()
    values = [ONE]
    acc = ONE
    for k, t, _ in scale_steps(window):
        if k >= window.k_max:
            break
        num, den = _ratio_parts(params, t)
        acc = acc * (num / den)
        values.append(acc)
    return Trajectory(window, tuple(values))


def variation_sum(
    params: CayleyParams,
    window: LatticeWindow,
    forcing: Trajectory,
    product: Trajectory,
) -> Trajectory:
    """Partial sums S of the forced series; S(1) = 0."""
    params.require_valid()
    values = [ScaledComplex.zero()]
    acc = ScaledComplex.zero()
    for k, t, g in scale_steps(window):
        if k >= window.k_max:
            break
        num, _ = _ratio_parts(params, t)
        acc = acc + g * forcing[k] / (num * product[k])
        values.append(acc)
    return Trajectory(window, tuple(values))


def synthesize(
    params: CayleyParams,
    window: LatticeWindow,
    spec: PerturbationSpec,
    c: complex = 0j,
) -> SolutionBundle:
    """Build phi from phi(1) = c by the forward non-homogeneous recurrence."""
    params.require_valid()
    sampler = spec.sampler()
    p_values = [ONE]
    phi_values = [ScaledComplex.from_complex(c)]
    e_values = []
    p_acc = ONE
    phi_acc = phi_values[0]
    for k, t, g in scale_steps(window):
        e_k = sampler.value(k, p_acc)
        e_values.append(e_k)
        if k >= window.k_max:
            break
        num, den = _ratio_parts(params, t)
        ratio = num / den
        phi_acc = ratio * phi_acc + g * e_k / den
        phi_values.append(phi_acc)
        p_acc = p_acc * ratio
        p_values.append(p_acc)
    P = Trajectory(window, tuple(p_values))
    E = Trajectory(window, tuple(e_values))
    S = variation_sum(params, window, E, P)
    phi = Trajectory(window, tuple(phi_values))
    return SolutionBundle(params=params, spec=spec, c=complex(c), P=P, S=S, phi=phi, E=E)
