"""The geometric lattice {1, q, q^2, ...} with index <-> value bookkeeping.

Indices k are the canonical coordinate; the value t = q^k is derived and kept
as a scaled real so that large k never overflows.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .exceptions import ParameterError
from .scaled_complex import ONE, ScaledComplex

DEFAULT_K_MAX = 256
K_MAX_ENV_VAR = "QCAYLEY_KMAX"


def default_k_max() -> int:
    """Default window size, overridable through the environment."""
    raw = os.environ.get(K_MAX_ENV_VAR)
    if raw is None:
        return DEFAULT_K_MAX
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"{K_MAX_ENV_VAR} must be an integer, got {raw!r}")
    if value < 1:
        raise ParameterError(f"{K_MAX_ENV_VAR} must be >= 1, got {value}")
    return value


@dataclass(frozen=True)
class LatticePoint:
    """Index k and its lattice value t = q^k (scaled real)."""

    k: int
    t: ScaledComplex


@dataclass(frozen=True)
class LatticeWindow:
    """Finite prefix of the lattice: indices 0..k_max for a fixed q > 1.

    k_max = 0 (a single point) is tolerated so that derived windows, such as
    the one-shorter residual window, stay representable.
    """

    q: float
    k_max: int = field(default_factory=default_k_max)

    def __post_init__(self):
        if not self.q > 1.0:
            raise ParameterError(f"lattice ratio q must be > 1, got {self.q}")
        if self.k_max < 0:
            raise ParameterError(f"k_max must be >= 0, got {self.k_max}")


def point(q: float, k: int) -> LatticePoint:
    """The lattice point (k, q^k), computed by binary exponentiation."""
    if not q > 1.0:
        raise ParameterError(f"lattice ratio q must be > 1, got {q}")
    if k < 0:
        raise ParameterError(f"lattice index must be >= 0, got {k}")
    base = ScaledComplex.from_complex(q)
    acc = ONE
    n = k
    while n:
        if n & 1:
            acc = acc * base
        base = base * base
        n >>= 1
    return LatticePoint(k, acc)


def iterate(window: LatticeWindow) -> list[LatticePoint]:
    """All points of the window in index order; t advances by one multiply."""
    q = ScaledComplex.from_complex(window.q)
    points = [LatticePoint(0, ONE)]
    t = ONE
    for k in range(1, window.k_max + 1):
        t = t * q
        points.append(LatticePoint(k, t))
    return points


def weights(q: float):
    """Unbounded generator of (k, t, g) with g = (q-1)*q^k, k = 0, 1, 2, ..."""
    q_sc = ScaledComplex.from_complex(q)
    qm1 = q - 1.0
    t = ONE
    k = 0
    while True:
        yield k, t, t.scale_float(qm1)
        t = t * q_sc
        k += 1


def scale_steps(window: LatticeWindow):
    """(k, t, g) for the window's indices 0..k_max."""
    gen = weights(window.q)
    for _ in range(window.k_max + 1):
        yield next(gen)
