"""Centrally symmetric convex polygons used as unit balls of norms.

A :class:`SymmetricPolygon` stores only the vertices whose polar angle lies in
``[0, pi)`` (sorted by angle); the other half is their exact negation, so
central symmetry holds bit-for-bit and never drifts across iterations.

The gauge (Minkowski functional) of the polygon is the norm it defines::

    gauge(P, x) = min {t >= 0 : x in t*P}
"""

from __future__ import annotations

import bisect
import json
import math
import os
import tempfile
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .linalg import invert

GEOM_TOL = 1e-10
VALIDATOR_TOL = 1e-9
MIN_RADIUS = 1e-9
FORMAT_NAME = "symmetric-polygon"
FORMAT_VERSION = 1
SNAP_TOL = 64.0 * np.finfo(float).eps
WRAP_ANGLE = 2.0 * math.pi - 16.0 * np.finfo(float).eps


class DegenerateBallError(ValueError):
    """The point set does not span a ball with the origin strictly inside."""


class InvalidPolygonError(ValueError):
    pass


def _angles(points: np.ndarray) -> np.ndarray:
    ang = np.arctan2(points[:, 1], points[:, 0])
    ang = np.where(ang < 0.0, ang + 2.0 * math.pi, ang)
    # -tiny + 2*pi rounds to (or just below) 2*pi; those directions are angle 0
    return np.where(ang >= WRAP_ANGLE, 0.0, ang)


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


class SymmetricPolygon:
    """Unit ball of a polygonal norm.

    ``half`` holds the vertices with polar angle in ``[0, pi)`` in increasing
    angular order; ``vertices`` is the full CCW cycle ``half ++ (-half)``.
    Construct through :func:`new_polygon` unless the half is already canonical.
    """

    __slots__ = ("half", "half_angles", "vertices", "angles", "_functionals", "_scalar")

    def __init__(self, half: np.ndarray):
        half = np.array(half, dtype=float)
        if half.ndim != 2 or half.shape[1] != 2 or len(half) < 2:
            raise InvalidPolygonError("need at least two half-vertices of shape (k, 2)")
        half.setflags(write=False)
        self.half = half
        ha = _angles(half)
        ha.setflags(write=False)
        self.half_angles = ha
        full = np.concatenate([half, -half])
        full.setflags(write=False)
        self.vertices = full
        ang = np.concatenate([ha, ha + math.pi])
        ang.setflags(write=False)
        self.angles = ang
        self._functionals = None
        self._scalar = None

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"SymmetricPolygon(n={len(self)})"

    @property
    def functionals(self) -> np.ndarray:
        """Row ``j`` is the linear form equal to 1 on edge ``V[j] -> V[j+1]``."""
        if self._functionals is None:
            v = self.vertices
            w = np.roll(v, -1, axis=0)
            e = w - v
            # cross(v, e) equals cross(v, w) but keeps its digits on short edges
            cr = _cross(v, e)
            f = np.stack([e[:, 1], -e[:, 0]], axis=1) / cr[:, None]
            f.setflags(write=False)
            self._functionals = f
        return self._functionals

    def edge_index(self, x: np.ndarray) -> np.ndarray:
        """Index of the boundary edge cut by the ray through each row of ``x``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        j = np.searchsorted(self.angles, _angles(x), side="right") - 1
        return np.where(j < 0, len(self.angles) - 1, j)

    def gauge(self, x) -> float | np.ndarray:
        """Gauge of a single point (float) or of each row of an ``(m, 2)`` array."""
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        pts = np.atleast_2d(arr)
        j = self.edge_index(pts)
        val = np.einsum("ij,ij->i", self.functionals[j], pts)
        zero = (pts[:, 0] == 0.0) & (pts[:, 1] == 0.0)
        val = np.where(zero, 0.0, np.maximum(val, 0.0))
        return float(val[0]) if single else val

    def gauge_xy(self, x: float, y: float) -> float:
        """Scalar fast path of :meth:`gauge` for one point given as two floats."""
        if self._scalar is None:
            self._scalar = (self.angles.tolist(), self.functionals.tolist())
        angles, funcs = self._scalar
        if x == 0.0 and y == 0.0:
            return 0.0
        a = math.atan2(y, x)
        if a < 0.0:
            a += 2.0 * math.pi
            if a >= WRAP_ANGLE:
                a = 0.0
        j = bisect.bisect_right(angles, a) - 1
        fx, fy = funcs[j]  # j == -1 wraps to the last edge
        return max(fx * x + fy * y, 0.0)

    def gauge_with_edge(self, x) -> tuple[float, int]:
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        if not pts.any():
            return 0.0, 0
        j = int(self.edge_index(pts)[0])
        return float(self.functionals[j] @ pts[0]), j

    def scaled(self, t: float) -> "SymmetricPolygon":
        return SymmetricPolygon(t * self.half)

    def radii(self) -> np.ndarray:
        return np.hypot(self.half[:, 0], self.half[:, 1])

    def inradius(self) -> float:
        return float(1.0 / np.max(np.hypot(self.functionals[:, 0], self.functionals[:, 1])))


def gauge(poly: SymmetricPolygon, x) -> float | np.ndarray:
    return poly.gauge(x)


def _canonical_half(points: np.ndarray, dedupe_tol: float = 1e-13) -> np.ndarray:
    """Fold points to angles in ``[0, pi)``, sort, and drop near-duplicates
    and rounding-level reflex vertices."""
    pts = np.asarray(points, dtype=float)
    ang = _angles(pts)
    # angles a few ulps below pi also flip: their antipodes would round to 2*pi
    flip = ang >= math.pi - 8.0 * np.finfo(float).eps
    pts = np.where(flip[:, None], -pts, pts)
    ang = _angles(pts)
    order = np.argsort(ang, kind="stable")
    pts = pts[order]
    scale = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
    tol = dedupe_tol * scale

    keep: list[np.ndarray] = []
    for p in pts:
        if keep and math.hypot(p[0] - keep[-1][0], p[1] - keep[-1][1]) <= tol:
            continue
        keep.append(p)
    if len(keep) > 1 and math.hypot(keep[-1][0] + keep[0][0], keep[-1][1] + keep[0][1]) <= tol:
        keep.pop()
    half = np.array(keep)

    changed = True
    while changed and len(half) > 2:
        changed = False
        full = np.concatenate([half, -half])
        prev = np.roll(full, 1, axis=0)
        nxt = np.roll(full, -1, axis=0)
        turn = _cross(full - prev, nxt - full)
        bad = np.nonzero(turn[: len(half)] < 0.0)[0]
        if len(bad):
            half = np.delete(half, bad[0], axis=0)
            changed = True
    return half


def new_polygon(points: Iterable[Sequence[float]]) -> SymmetricPolygon:
    """Symmetric convex hull of ``points`` and their antipodes."""
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    cloud = np.concatenate([pts, -pts])
    try:
        hull = ConvexHull(cloud)
    except QhullError as exc:
        raise DegenerateBallError("points are collinear through the origin") from exc
    half = _canonical_half(cloud[hull.vertices])
    if len(half) < 2:
        raise DegenerateBallError("points are collinear through the origin")
    poly = SymmetricPolygon(half)
    if np.min(poly.radii()) <= MIN_RADIUS:
        raise DegenerateBallError("origin is not strictly inside the hull")
    return poly


def regular_polygon(n: int = 64, radius: float = 1.0, phase: float = 0.0) -> SymmetricPolygon:
    """Regular ``n``-gon (``n`` even) inscribed in the circle of given radius."""
    if n < 4 or n % 2:
        raise ValueError("n must be even and >= 4")
    t = phase + 2.0 * math.pi * np.arange(n // 2) / n
    return SymmetricPolygon(radius * np.stack([np.cos(t), np.sin(t)], axis=1))


def linear_preimage(poly: SymmetricPolygon, a: np.ndarray) -> SymmetricPolygon:
    """``{x : A x in P}``, i.e. the image of ``P`` under ``A^{-1}``."""
    a_inv = invert(np.asarray(a, dtype=float))
    return SymmetricPolygon(_canonical_half(poly.half @ a_inv.T))


def linear_image(poly: SymmetricPolygon, a: np.ndarray) -> SymmetricPolygon:
    invert(np.asarray(a, dtype=float))
    return SymmetricPolygon(_canonical_half(poly.half @ np.asarray(a, dtype=float).T))


def _edge_crossings(p: SymmetricPolygon, q: SymmetricPolygon, jp: np.ndarray, jq: np.ndarray) -> np.ndarray:
    """Crossing points of edge ``jp`` of ``p`` with edge ``jq`` of ``q``.

    Nearly coincident edges make any single formula lose digits, so the
    closed-form solve and the segment form anchored at each of the four
    endpoints are all tried and the candidate with the smallest residual
    on both gauges is kept.
    """
    fp, fq = p.functionals[jp], q.functionals[jq]
    cands = []
    det = _cross(fp, fq)
    with np.errstate(divide="ignore", invalid="ignore"):
        cands.append(np.stack([fq[:, 1] - fp[:, 1], fp[:, 0] - fq[:, 0]], axis=1) / det[:, None])
        vp, vq = p.vertices, q.vertices
        edges = [
            (vp[jp], np.roll(vp, -1, axis=0)[jp], vq[jq], np.roll(vq, -1, axis=0)[jq]),
            (vq[jq], np.roll(vq, -1, axis=0)[jq], vp[jp], np.roll(vp, -1, axis=0)[jp]),
        ]
        for a, b, c, e in edges:
            for start, end in ((a, b), (b, a)):
                t = _cross(c - start, e - c) / _cross(end - start, e - c)
                cands.append(start + t[:, None] * (end - start))
    cands = np.stack(cands)  # (candidates, m, 2)
    with np.errstate(invalid="ignore"):
        res = np.maximum(
            np.abs(np.einsum("ij,cij->ci", fp, cands) - 1.0), np.abs(np.einsum("ij,cij->ci", fq, cands) - 1.0)
        )
    res = np.where(np.isfinite(res), res, np.inf)
    best = np.argmin(res, axis=0)
    return cands[best, np.arange(cands.shape[1])]


def intersect(p: SymmetricPolygon, q: SymmetricPolygon) -> SymmetricPolygon:
    """Intersection of two symmetric convex polygons.

    Works sector by sector over the merged vertex directions: inside a sector
    both gauges are linear, so the boundary of the intersection (the unit set
    of ``max(gauge_p, gauge_q)``) gains a vertex at the dominating polygon's
    vertices and at each sign change of ``gauge_p - gauge_q``.
    """
    ang = np.concatenate([p.half_angles, q.half_angles])
    src = np.concatenate([np.zeros(len(p.half), int), np.ones(len(q.half), int)])
    pts = np.concatenate([p.half, q.half])
    order = np.argsort(ang, kind="stable")
    ang, src, pts = ang[order], src[order], pts[order]

    hp = p.gauge(pts)
    hq = q.gauge(pts)
    d = hp - hq
    # differences at rounding level mean the point lies on both boundaries
    d = np.where(np.abs(d) <= SNAP_TOL * np.maximum(hp, hq), 0.0, d)
    # a vertex of one polygon survives when it lies inside (or on) the other
    alive = np.where(src == 0, d >= 0.0, d <= 0.0)

    m = len(ang)
    d_next = np.append(d[1:], d[0])  # gauges are even, so the antipode of pts[0] has d[0]
    ang_next = np.append(ang[1:], ang[0] + math.pi)
    cross_at = np.nonzero(d * d_next < 0.0)[0]
    mid = 0.5 * (ang[cross_at] + ang_next[cross_at])
    u = np.stack([np.cos(mid), np.sin(mid)], axis=1)
    xs = _edge_crossings(p, q, p.edge_index(u), q.edge_index(u))
    # Rounding can put the solution just outside its sector when the crossing
    # sits at a sector end; clamp it to the nearer end, on the boundary of the
    # intersection.  Exactly parallel edges coincide and need no extra vertex.
    finite = np.all(np.isfinite(xs), axis=1)
    span = ang_next[cross_at] - ang[cross_at]
    rel = np.mod(_angles(np.where(finite[:, None], xs, 1.0)) - ang[cross_at], 2.0 * math.pi)
    outside = finite & (rel > span)
    if np.any(outside):
        past_end = rel[outside] - span[outside] < 2.0 * math.pi - rel[outside]
        t = np.where(past_end, ang_next[cross_at[outside]], ang[cross_at[outside]])
        u = np.stack([np.cos(t), np.sin(t)], axis=1)
        xs[outside] = u / np.maximum(p.gauge(u), q.gauge(u))[:, None]
    xs, cross_at = xs[finite], cross_at[finite]

    keys = np.concatenate([np.nonzero(alive)[0].astype(float), cross_at + 0.5])
    cand = np.concatenate([pts[alive], xs])
    out = cand[np.argsort(keys, kind="stable")]
    return SymmetricPolygon(_canonical_half(out))


def normalize(poly: SymmetricPolygon, direction: Sequence[float] = (1.0, 0.0)) -> tuple[SymmetricPolygon, float]:
    """Rescale so that ``gauge(P', direction) == 1``; returns ``(P', scale)``."""
    s = poly.gauge(np.asarray(direction, dtype=float))
    if s <= 0.0:
        raise ValueError("direction must be nonzero")
    if s == 1.0:
        return poly, 1.0
    return poly.scaled(s), s


def _seg_dist(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    L2 = float(ab @ ab)
    t = np.clip(((p - a) @ ab) / L2, 0.0, 1.0) if L2 > 0 else np.zeros(len(p))
    proj = a + t[:, None] * ab
    return np.hypot(*(p - proj).T)


def prune(poly: SymmetricPolygon, eps: float) -> SymmetricPolygon:
    """Drop vertices lying within ``eps`` of the chord that would replace them.

    Every dropped vertex stays within ``eps`` of the final boundary, so the
    Hausdorff distance to the input is at most ``eps``.  Antipodal pairs are
    dropped together; ``eps == 0`` returns the input unchanged.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0 or len(poly.half) <= 2:
        return poly
    chain = np.concatenate([poly.half, -poly.half[:1]])
    n = len(chain) - 1
    kept = [0]
    anchor = 0
    j = 1
    while j < n:
        # try to skip chain[j]: it and all skipped since anchor must hug the chord
        if _seg_dist(chain[anchor + 1 : j + 1], chain[anchor], chain[j + 1]).max() < eps:
            j += 1
            continue
        kept.append(j)
        anchor = j
        j += 1
    if len(kept) < 2:
        kept = [0, n // 2]
    return SymmetricPolygon(poly.half[kept])


def validate(poly: SymmetricPolygon, tol: float = VALIDATOR_TOL) -> list[str]:
    """Return the list of violated polygon invariants (empty when valid)."""
    problems = []
    v = poly.vertices
    k = len(poly.half)
    if len(v) < 4 or len(v) % 2:
        problems.append(f"vertex count {len(v)} is not even and >= 4")
    if not np.all(np.isfinite(v)):
        problems.append("non-finite vertex")
        return problems
    if np.max(np.abs(v[:k] + v[k:])) > tol:
        problems.append("central symmetry violated")
    prev = np.roll(v, 1, axis=0)
    nxt = np.roll(v, -1, axis=0)
    turn = _cross(v - prev, nxt - v)
    if np.min(turn) <= -1e-12:
        problems.append(f"non-convex turn {np.min(turn):.3e}")
    if np.min(np.hypot(v[:, 0], v[:, 1])) <= MIN_RADIUS:
        problems.append("origin not strictly interior")
    if np.any(np.diff(poly.angles) <= 0.0) or poly.angles[0] < 0 or poly.angles[-1] >= 2 * math.pi:
        problems.append("vertex angles not strictly increasing over one turn")
    return problems


def hausdorff(p: SymmetricPolygon, q: SymmetricPolygon) -> float:
    """Hausdorff distance between the two polygon boundaries (convex bodies)."""

    def one_side(a: SymmetricPolygon, b: SymmetricPolygon) -> float:
        bv = b.vertices
        bw = np.roll(bv, -1, axis=0)
        best = np.full(len(a.vertices), np.inf)
        for s, e in zip(bv, bw):
            best = np.minimum(best, _seg_dist(a.vertices, s, e))
        return float(best.max())

    return max(one_side(p, q), one_side(q, p))


def to_document(poly: SymmetricPolygon, **meta) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        **meta,
        "vertices": [[float(x), float(y)] for x, y in poly.vertices],
    }


def from_document(doc: dict) -> SymmetricPolygon:
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported polygon format version {doc.get('version')!r}")
    v = np.asarray(doc["vertices"], dtype=float)
    k = len(v) // 2
    if len(v) % 2 or not np.array_equal(v[k:], -v[:k]):
        raise ValueError("stored vertices are not an exact antipodal cycle")
    return SymmetricPolygon(v[:k])


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_polygon(poly: SymmetricPolygon, path, **meta) -> None:
    atomic_write(path, json.dumps(to_document(poly, **meta), indent=1) + "\n")


def load_polygon(path) -> SymmetricPolygon:
    with open(path) as fh:
        return from_document(json.load(fh))
