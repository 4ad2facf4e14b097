"""Polygonal approximation of a Barabanov norm and certified bounds on the JSR.

For a norm ``h`` with unit ball ``P`` the operator ``(T h)(x) = max_i h(A_i x)``
has unit ball ``A_0^{-1} P  ∩  A_1^{-1} P``, which is again a symmetric polygon,
so the iteration can be carried out exactly on vertex lists.  Whatever ``P`` is,

    min_x (T h)(x) / h(x)  <=  rho(A)  <=  max_x (T h)(x) / h(x),

and both extrema are attained at vertex directions of ``P`` or ``T P`` because
the ratio is monotone inside every sector where both gauges are linear.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linalg import MatrixPair, spectral_radius
from .polygon import (
    DegenerateBallError,
    SymmetricPolygon,
    intersect,
    linear_preimage,
    normalize,
    prune,
    regular_polygon,
)

log = logging.getLogger(__name__)

MIN_RELATIVE_RADIUS = 1e-9
MAX_BRUTE_FORCE_LENGTH = 24


class Scheme(str, enum.Enum):
    POWER = "power"
    MAX_RELAXATION = "max-relaxation"


class NonConvergenceError(RuntimeError):
    """``max_iter`` was reached; ``result`` still carries valid bounds."""

    def __init__(self, result: "BarabanovResult"):
        super().__init__(
            f"gap {result.rho_upper - result.rho_lower:.3e} after {result.iterations} iterations"
        )
        self.result = result


@dataclass(frozen=True)
class IterationConfig:
    tol: float = 1e-8
    max_iter: int = 5000
    initial_vertices: int = 64
    prune_eps: float = 0.0
    scheme: Scheme = Scheme.MAX_RELAXATION
    reference_direction: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.initial_vertices < 4 or self.initial_vertices % 2:
            raise ValueError("initial_vertices must be even and >= 4")
        if self.prune_eps < 0:
            raise ValueError("prune_eps must be nonnegative")
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        d = tuple(float(c) for c in self.reference_direction)
        if len(d) != 2 or d == (0.0, 0.0):
            raise ValueError("reference_direction must be a nonzero 2-vector")
        object.__setattr__(self, "reference_direction", d)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    lower: float
    upper: float
    vertices: int


@dataclass(frozen=True)
class BarabanovResult:
    polygon: SymmetricPolygon
    rho_lower: float
    rho_upper: float
    iterations: int
    residual: float
    converged: bool
    history: tuple[IterationRecord, ...] = field(default=(), repr=False)

    @property
    def rho(self) -> float:
        """Midpoint estimate of the joint spectral radius."""
        return 0.5 * (self.rho_lower + self.rho_upper)

    @property
    def gap(self) -> float:
        return self.rho_upper - self.rho_lower


def barabanov_operator(pair: MatrixPair, poly: SymmetricPolygon) -> SymmetricPolygon:
    """Unit ball of ``x -> max(h(A_0 x), h(A_1 x))`` where ``h`` is the gauge of ``poly``."""
    return intersect(linear_preimage(poly, pair.a0), linear_preimage(poly, pair.a1))


def _ratio_bounds(poly: SymmetricPolygon, image: SymmetricPolygon) -> tuple[float, float]:
    dirs = np.concatenate([poly.half, image.half])
    g = image.gauge(dirs) / poly.gauge(dirs)
    return float(g.min()), float(g.max())


def ratio_bounds(pair: MatrixPair, poly: SymmetricPolygon) -> tuple[float, float]:
    """Certified ``(lower, upper)`` with ``lower <= rho(pair) <= upper``."""
    return _ratio_bounds(poly, barabanov_operator(pair, poly))


def barabanov_residual(pair: MatrixPair, poly: SymmetricPolygon, rho: float) -> float:
    """``max_v |max_i h(A_i v) - rho*h(v)| / rho`` over the polygon's vertices."""
    v = poly.vertices
    hv = poly.gauge(v)
    m = np.maximum(poly.gauge(v @ pair.a0.T), poly.gauge(v @ pair.a1.T))
    return float(np.max(np.abs(m - rho * hv)) / rho)


def _check_ball(poly: SymmetricPolygon) -> None:
    r = poly.radii()
    if not np.all(np.isfinite(r)) or r.min() <= MIN_RELATIVE_RADIUS * r.max():
        raise DegenerateBallError(
            "unit ball collapsed; the pair may be reducible (common invariant subspace)"
        )


def compute_barabanov(
    pair: MatrixPair,
    cfg: IterationConfig | None = None,
    initial: SymmetricPolygon | None = None,
    on_iteration: Callable[[IterationRecord], None] | None = None,
    raise_on_nonconvergence: bool = False,
) -> BarabanovResult:
    """Iterate the max-operator on polygons until the certified gap is ``<= tol``.

    With ``Scheme.POWER`` every step replaces the ball by the normalized
    operator image.  With ``Scheme.MAX_RELAXATION`` the new ball is
    ``P ∩ r*T(P)`` (the unit ball of ``max(h, T h / r)``) where ``r`` is the
    current midpoint estimate, raised to the upper bound whenever the ball
    shrinks by more than a factor 10 between resets.
    """
    cfg = cfg or IterationConfig()
    ref = np.asarray(cfg.reference_direction)
    poly = initial if initial is not None else regular_polygon(cfg.initial_vertices)
    poly, _ = normalize(poly, ref)

    best_lo, best_hi = 0.0, math.inf
    best_poly = poly
    history: list[IterationRecord] = []
    shrink = 1.0
    r_floor = 0.0
    converged = False
    k = 0
    for k in range(1, cfg.max_iter + 1):
        image = barabanov_operator(pair, poly)
        lo, hi = _ratio_bounds(poly, image)
        rec = IterationRecord(k, lo, hi, len(poly))
        history.append(rec)
        if on_iteration is not None:
            on_iteration(rec)
        if hi - lo <= best_hi - best_lo:
            best_poly = poly
        best_lo, best_hi = max(best_lo, lo), min(best_hi, hi)
        if best_hi - best_lo <= cfg.tol:
            converged = True
            break

        if cfg.scheme is Scheme.POWER:
            nxt = image
        else:
            r = max(0.5 * (lo + hi), r_floor)
            nxt = intersect(poly, image.scaled(r))
        nxt, scale = normalize(nxt, ref)
        if cfg.scheme is Scheme.MAX_RELAXATION:
            shrink *= scale
            if shrink > 10.0:
                r_floor = best_hi
                shrink = 1.0
        if cfg.prune_eps > 0:
            nxt = prune(nxt, cfg.prune_eps)
        _check_ball(nxt)
        poly = nxt

    rho_hat = 0.5 * (best_lo + best_hi)
    result = BarabanovResult(
        polygon=best_poly,
        rho_lower=best_lo,
        rho_upper=best_hi,
        iterations=k,
        residual=barabanov_residual(pair, best_poly, rho_hat),
        converged=converged,
        history=tuple(history),
    )
    if not converged:
        log.warning("no convergence: gap %.3e after %d iterations", result.gap, k)
        if raise_on_nonconvergence:
            raise NonConvergenceError(result)
    return result


def brute_force_bounds(pair: MatrixPair, n: int) -> tuple[float, float, float]:
    """Exhaustive ``(rho_bar_n, min_w ||A_w||^(1/n), rho_n)`` over all ``2**n`` words.

    ``rho_bar_n = max rho(A_w)^(1/n)`` is a lower bound and
    ``rho_n = max ||A_w||_2^(1/n)`` an upper bound for the JSR.
    """
    if n < 1 or n > MAX_BRUTE_FORCE_LENGTH:
        raise ValueError(f"n must be in [1, {MAX_BRUTE_FORCE_LENGTH}]")
    # products of all words, built level by level: P_{w+s} = A_s @ P_w
    prods = np.eye(2)[None]
    mats = np.stack([pair.a0, pair.a1])
    for _ in range(n):
        prods = np.einsum("sij,wjk->wsik", mats, prods).reshape(-1, 2, 2)
    tr = prods[:, 0, 0] + prods[:, 1, 1]
    dt = prods[:, 0, 0] * prods[:, 1, 1] - prods[:, 0, 1] * prods[:, 1, 0]
    disc = 0.25 * tr * tr - dt
    sq = np.sqrt(np.abs(disc))
    spr = np.where(disc < 0, np.sqrt(np.abs(dt)), np.maximum(np.abs(0.5 * tr + sq), np.abs(0.5 * tr - sq)))
    # Euclidean operator norm of a 2x2 matrix in closed form
    fro2 = np.einsum("wij,wij->w", prods, prods)
    op = np.sqrt(0.5 * (fro2 + np.sqrt(np.maximum(fro2 * fro2 - 4 * dt * dt, 0.0))))
    inv_n = 1.0 / n
    return (
        float(spr.max() ** inv_n),
        float(op.min() ** inv_n),
        float(op.max() ** inv_n),
    )


def all_words(n: int):
    return itertools.product((0, 1), repeat=n)


def max_word_spectral_radius(pair: MatrixPair, words: Sequence[Sequence[int]]) -> float:
    from .linalg import word_product

    return max(spectral_radius(word_product(pair, w)) ** (1.0 / len(w)) for w in words)
