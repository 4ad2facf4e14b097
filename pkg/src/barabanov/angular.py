"""Direction dynamics of the generator of extremal trajectories.

On the unit sphere of a Barabanov norm the generator picks, at direction
``phi``, whichever matrix ``A_i`` maximizes ``||A_i x(phi)||``.  Projected to
angles modulo ``pi`` this is a piecewise monotone circle map ``Phi~`` whose two
branches are the angular actions of ``A_0`` and ``A_1``.

The analysis runs on a circle given by an arc ``[lo, hi)`` of ``[0, pi)``
that ``Phi~`` maps into itself: the whole ``[0, pi)`` by default, or for
instance the first quadrant ``[0, pi/2)`` for a pair of nonnegative matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import MatrixPair
from .norm import BarabanovResult
from .polygon import SymmetricPolygon

PI = math.pi
DEFAULT_GRID = 8192
BISECTION_TOL = 1e-12
# Jumps of Phi~ below this many radians are not reported as discontinuities.
# It is a plotting-resolution cut: near-tuned parameters leave ~1e-3 gaps.
JUMP_TOL = 1e-2
INVARIANCE_TOL = 1e-9


class NotConvergedError(ValueError):
    pass


class NotInvariantError(ValueError):
    """``Phi~`` does not map the requested arc into itself."""


def _mod(a, period: float):
    r = np.mod(a, period)
    if isinstance(r, np.ndarray):
        return np.where(r >= period, 0.0, r)
    return 0.0 if r >= period else float(r)


def branch_angles(pair: MatrixPair, phi) -> tuple:
    """``(Phi_0(phi), Phi_1(phi))``: polar angles of ``A_i (cos phi, sin phi)`` mod pi."""
    c, s = np.cos(phi), np.sin(phi)
    out = []
    for a in pair.matrices:
        x = a[0, 0] * c + a[0, 1] * s
        y = a[1, 0] * c + a[1, 1] * s
        out.append(_mod(np.arctan2(y, x), PI))
    return tuple(out)


def gauge_gap(pair: MatrixPair, poly: SymmetricPolygon, phi) -> np.ndarray:
    """``h(A_0 x) - h(A_1 x)`` at ``x = (cos phi, sin phi)``."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    x = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    return poly.gauge(x @ pair.a0.T) - poly.gauge(x @ pair.a1.T)


def circular_distance(a: float, b: float, period: float = PI) -> float:
    d = (a - b) % period
    return min(d, period - d)


@dataclass(frozen=True)
class SwitchingSets:
    """Angle intervals of the analyzed arc where branch 0 (resp. 1) attains the max."""

    omega0: tuple[tuple[float, float], ...]
    omega1: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class AngularProfile:
    grid: np.ndarray
    branch: np.ndarray
    phi_next: np.ndarray
    switching_angles: tuple[float, ...]
    orientation_preserving: bool
    discontinuities: tuple[float, ...]
    rotation_number: float | None
    jumps: tuple[float, ...] = ()
    degree: int = 1
    domain: tuple[float, float] = (0.0, PI)
    rho: float = 1.0
    pair: MatrixPair | None = field(default=None, repr=False, compare=False)
    polygon: SymmetricPolygon | None = field(default=None, repr=False, compare=False)

    @property
    def period(self) -> float:
        return self.domain[1] - self.domain[0]

    def evaluate(self, phi: float, tie_rule: int = 1) -> tuple[float, int]:
        """Exact ``(Phi~(phi), sigma)``, branch chosen by gauge comparison."""
        return evaluate(self.pair, self.polygon, phi, tie_rule)

    def to_rows(self):
        return zip(self.grid.tolist(), self.branch.tolist(), self.phi_next.tolist())


def evaluate(pair: MatrixPair, poly: SymmetricPolygon, phi: float, tie_rule: int = 1) -> tuple[float, int]:
    c, s = math.cos(phi), math.sin(phi)
    (p, q), (r, t) = pair.a0.tolist()
    x0, y0 = p * c + q * s, r * c + t * s
    (p, q), (r, t) = pair.a1.tolist()
    x1, y1 = p * c + q * s, r * c + t * s
    d = poly.gauge_xy(x0, y0) - poly.gauge_xy(x1, y1)
    sigma = 0 if d > 0 else 1 if d < 0 else tie_rule
    x, y = (x0, y0) if sigma == 0 else (x1, y1)
    return _mod(math.atan2(y, x), PI), sigma


def _bisect(pair, poly, lo: float, hi: float, d_lo: float) -> float:
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        d_mid = float(gauge_gap(pair, poly, mid)[0])
        if d_mid == 0.0:
            return mid
        if (d_mid > 0) == (d_lo > 0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _forward_degree(values: list[float], period: float) -> int:
    """Half-turns travelled by a closed chain of circle points when every step
    between consecutive points is taken in the forward direction."""
    v = np.asarray(values)
    steps = np.mod(np.diff(np.append(v, v[0])), period)
    return int(round(float(steps.sum()) / period))


def angular_function(
    pair: MatrixPair,
    norm: BarabanovResult,
    n: int = DEFAULT_GRID,
    *,
    domain: tuple[float, float] = (0.0, PI),
    allow_unconverged: bool = False,
    rotation_iterations: int = 10_000,
    rotation_burn_in: int = 1000,
) -> AngularProfile:
    """Sample ``Phi~`` on a uniform ``n``-grid of ``domain`` and locate its structure.

    Switching angles are sign changes of ``h(A_0 x) - h(A_1 x)`` refined by
    bisection.  A switching angle is a discontinuity when the two branch images
    there differ by more than ``JUMP_TOL``.  The map preserves orientation iff
    a forward walk around the arc, jumps included, has images travelling
    exactly once around it.
    """
    if not norm.converged and not allow_unconverged:
        raise NotConvergedError("angular analysis needs a converged norm")
    lo, hi = map(float, domain)
    if not (0.0 <= lo < hi <= PI):
        raise ValueError("domain must be an arc inside [0, pi)")
    period = hi - lo
    poly = norm.polygon
    grid = lo + period * np.arange(n) / n
    d = gauge_gap(pair, poly, grid)
    phi0, phi1 = branch_angles(pair, grid)

    branch = np.where(d > 0, 0, 1)
    for j in np.nonzero(d == 0.0)[0]:  # tie: left limit
        branch[j] = branch[j - 1]
    phi_next = np.where(branch == 0, phi0, phi1)
    if period < PI:
        off = np.mod(phi_next - lo, PI)
        if np.any((off > period + INVARIANCE_TOL) & (off < PI - INVARIANCE_TOL)):
            raise NotInvariantError(f"Phi~ does not map [{lo}, {hi}) into itself")

    d_end = float(gauge_gap(pair, poly, hi)[0]) if period < PI else float(d[0])
    d_next = np.append(d[1:], d_end)
    edges = np.append(grid[1:], hi)
    switching: list[float] = []
    for j in np.nonzero(d * d_next < 0.0)[0]:
        w = _bisect(pair, poly, float(grid[j]), float(edges[j]), float(d[j]))
        switching.append(w)
    for j in np.nonzero(d == 0.0)[0]:
        if j > 0 and d[j - 1] * d_next[j] < 0:
            switching.append(float(grid[j]))
    switching.sort()

    jumps, discont = [], []
    walk = [(float(g), float(v)) for g, v in zip(grid, phi_next)]
    for w in switching:
        b = branch_angles(pair, w)
        jump = circular_distance(float(b[0]), float(b[1]))
        jumps.append(jump)
        if jump > JUMP_TOL:
            discont.append(w)
        left_is_0 = float(gauge_gap(pair, poly, w - 1e-9)[0]) > 0
        first, second = (0, 1) if left_is_0 else (1, 0)
        walk.append((w - 1e-13, float(b[first])))
        walk.append((w + 1e-13, float(b[second])))
    walk.sort()
    degree = _forward_degree([v - lo for _, v in walk], period)

    profile = AngularProfile(
        grid=grid,
        branch=branch.astype(np.int8),
        phi_next=phi_next,
        switching_angles=tuple(switching),
        orientation_preserving=degree == 1,
        discontinuities=tuple(discont),
        rotation_number=None,
        jumps=tuple(jumps),
        degree=degree,
        domain=(lo, hi),
        rho=norm.rho,
        pair=pair,
        polygon=poly,
    )
    if profile.orientation_preserving and rotation_iterations > 0:
        kappa = rotation_number_estimate(profile, rotation_iterations, rotation_burn_in)
        object.__setattr__(profile, "rotation_number", kappa)
    return profile


def switching_lines(profile: AngularProfile) -> int:
    """Number of switching directions; each is a full line through the origin."""
    return len(profile.switching_angles)


def switching_sets(profile: AngularProfile) -> SwitchingSets:
    """Maximal branch intervals of the arc, cut at switching angles and its ends."""
    lo, hi = profile.domain
    cuts = [lo, *profile.switching_angles, hi]
    regions: list[list[list[float]]] = [[], []]
    last = None
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        s = profile.evaluate(0.5 * (a + b))[1]
        if s == last:
            regions[s][-1][1] = b
        else:
            regions[s].append([a, b])
        last = s
    return SwitchingSets(*(tuple((a, b) for a, b in r) for r in regions))


def rotation_number_estimate(
    profile: AngularProfile, iterations: int = 100_000, burn_in: int = 1000, phi0: float | None = None
) -> float | None:
    """Mean displacement per step of the monotone lift, as a fraction of the arc, mod 1.

    Returns ``None`` when the map does not preserve orientation (such maps have
    a rotation interval instead of a number).
    """
    if not profile.orientation_preserving:
        return None
    lo = profile.domain[0]
    period = profile.period
    pair, poly = profile.pair, profile.polygon
    # lift anchored at F(lo) in [lo, lo+period): F(t) = c + ((Phi~(t) - c) mod period)
    c = profile.evaluate(lo)[0] - lo

    def lift(t: float) -> float:
        k = math.floor(t / period)
        base = t - k * period
        if base >= period:
            base, k = 0.0, k + 1
        v = evaluate(pair, poly, lo + base)[0] - lo
        return c + ((v - c) % period) + k * period

    t = 0.0 if phi0 is None else float(phi0) - lo
    for _ in range(burn_in):
        t = lift(t)
    start = t
    for _ in range(iterations):
        t = lift(t)
    return ((t - start) / (iterations * period)) % 1.0
