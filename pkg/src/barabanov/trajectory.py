"""Extremal trajectories ``x_{n+1} = A_{sigma_n} x_n`` in a Barabanov norm.

At each step the matrix with the larger norm image is applied, so the norm
grows by exactly ``rho`` per step (up to the accuracy of the polygon).  The
state is divided by ``rho`` after each step to avoid overflow; the true
log-norms are kept separately.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .angular import AngularProfile
from .linalg import MatrixPair, polar_angle
from .norm import BarabanovResult

TIE_TOL = 1e-9
DEFAULT_START = (math.cos(1.0), math.sin(1.0))


class TieRule(str, enum.Enum):
    PREFER_ONE = "prefer-one"
    PREFER_ZERO = "prefer-zero"

    @property
    def symbol(self) -> int:
        return 1 if self is TieRule.PREFER_ONE else 0


@dataclass(frozen=True)
class Trajectory:
    start: tuple[float, float]
    angles: np.ndarray
    log_norms: np.ndarray
    indices: str
    tie_events: tuple[int, ...]
    rho: float

    def __len__(self) -> int:
        return len(self.indices)

    def rows(self):
        """``(n, phi_n, ln||x_n||, sigma_n)``; ``sigma`` is empty for the last point."""
        for k, (phi, ln) in enumerate(zip(self.angles.tolist(), self.log_norms.tolist())):
            yield k, phi, ln, self.indices[k] if k < len(self.indices) else ""


def _choose(poly, a0, a1, x: float, y: float, hx: float, rho: float, rule: TieRule):
    (p, q), (r, t) = a0
    x0, y0 = p * x + q * y, r * x + t * y
    (p, q), (r, t) = a1
    x1, y1 = p * x + q * y, r * x + t * y
    g0 = poly.gauge_xy(x0, y0)
    g1 = poly.gauge_xy(x1, y1)
    tied = abs(g0 - g1) <= TIE_TOL * rho * hx
    if tied:
        s = rule.symbol
    else:
        s = 0 if g0 > g1 else 1
    return (x0, y0) if s == 0 else (x1, y1), s, tied


def step(pair: MatrixPair, norm: BarabanovResult, x, tie_rule: TieRule = TieRule.PREFER_ONE):
    """One application of the generator: returns ``(A_sigma x / rho, sigma, tied)``."""
    x = np.asarray(x, dtype=float)
    if not x.any():
        raise ValueError("extremal step from the zero vector")
    rule = TieRule(tie_rule)
    poly = norm.polygon
    hx = poly.gauge_xy(float(x[0]), float(x[1]))
    (nx, ny), s, tied = _choose(poly, pair.a0.tolist(), pair.a1.tolist(), float(x[0]), float(x[1]), hx, norm.rho, rule)
    return np.array([nx, ny]) / norm.rho, s, tied


def run(
    pair: MatrixPair,
    norm: BarabanovResult,
    x0=DEFAULT_START,
    n: int = 10_000,
    tie_rule: TieRule = TieRule.PREFER_ONE,
) -> Trajectory:
    """Iterate :func:`step` ``n`` times from ``x0``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    x, y = (float(c) for c in x0)
    if x == 0.0 and y == 0.0:
        raise ValueError("extremal trajectory from the zero vector")
    rule = TieRule(tie_rule)
    poly = norm.polygon
    rho = norm.rho
    ln_rho = math.log(rho)
    a0, a1 = pair.a0.tolist(), pair.a1.tolist()

    angles = [polar_angle((x, y))]
    hx = poly.gauge_xy(x, y)
    logs = [math.log(hx)]
    bits = []
    ties = []
    for k in range(n):
        (x, y), s, tied = _choose(poly, a0, a1, x, y, hx, rho, rule)
        x /= rho
        y /= rho
        bits.append("1" if s else "0")
        if tied:
            ties.append(k)
        hx = poly.gauge_xy(x, y)
        angles.append(polar_angle((x, y)))
        logs.append(math.log(hx) + (k + 1) * ln_rho)
    return Trajectory(
        start=(float(x0[0]), float(x0[1])),
        angles=np.array(angles),
        log_norms=np.array(logs),
        indices="".join(bits),
        tie_events=tuple(ties),
        rho=rho,
    )


def angular_run(
    profile: AngularProfile,
    pair: MatrixPair | None = None,
    phi0: float = 1.0,
    n: int = 10_000,
    tie_rule: TieRule = TieRule.PREFER_ONE,
) -> str:
    """Index sequence of the orbit of ``phi0`` under the angular map alone.

    No norms are propagated: each step only compares ``h(A_0 x)`` and
    ``h(A_1 x)`` at the unit vector of the current angle.
    """
    pair = pair or profile.pair
    poly = profile.polygon
    rho = profile.rho
    rule = TieRule(tie_rule)
    a0, a1 = pair.a0.tolist(), pair.a1.tolist()
    phi = float(phi0)
    bits = []
    for _ in range(n):
        x, y = math.cos(phi), math.sin(phi)
        hx = poly.gauge_xy(x, y)
        (nx, ny), s, _ = _choose(poly, a0, a1, x, y, hx, rho, rule)
        bits.append("1" if s else "0")
        phi = math.atan2(ny, nx) % math.pi
    return "".join(bits)
