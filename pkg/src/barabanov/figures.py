"""SVG figures: the unit sphere with level sets, trajectory points, and the graph of Phi~.

Each ``*_data`` function returns the rows a figure is drawn from so the caller
can store them next to the picture.  SVG output is made reproducible by fixing
the id salt and dropping the date metadata.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .angular import JUMP_TOL, AngularProfile, branch_angles  # noqa: E402
from .linalg import MatrixPair  # noqa: E402
from .norm import BarabanovResult  # noqa: E402
from .polygon import linear_preimage  # noqa: E402

SVG_META = {"Date": None}
SALT = "barabanov"

LEVEL_STYLES = {"unit_sphere": ("k", "-"), "level_A0": ("tab:blue", ":"), "level_A1": ("tab:red", "--")}


def _save(fig, path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": SALT}):
        fig.savefig(path, format="svg", metadata=SVG_META)
    plt.close(fig)


def _closed(v: np.ndarray) -> np.ndarray:
    return np.vstack([v, v[:1]])


def sphere_data(pair: MatrixPair, norm: BarabanovResult, switching_angles=()) -> list[tuple]:
    """Rows ``(curve, x, y)``: unit sphere, the sets ``h(A_i x) = rho``, switching lines."""
    poly = norm.polygon
    rows = [("unit_sphere", x, y) for x, y in _closed(poly.vertices).tolist()]
    for i, a in enumerate(pair.matrices):
        level = linear_preimage(poly, a / norm.rho)
        rows += [(f"level_A{i}", x, y) for x, y in _closed(level.vertices).tolist()]
    r = 1.2 * float(poly.radii().max())
    for k, w in enumerate(switching_angles):
        c, s = math.cos(w), math.sin(w)
        rows += [(f"switch_{k}", -r * c, -r * s), (f"switch_{k}", r * c, r * s)]
    return rows


def plot_sphere(rows, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    curves: dict[str, list] = {}
    for name, x, y in rows:
        curves.setdefault(name, []).append((x, y))
    for name, pts in curves.items():
        p = np.asarray(pts)
        if name.startswith("switch"):
            ax.plot(p[:, 0], p[:, 1], color="0.4", ls="-.", lw=0.8,
                    label="switching line" if name == "switch_0" else None)
        else:
            color, ls = LEVEL_STYLES[name]
            label = {"unit_sphere": "unit sphere", "level_A0": "h(A0 x) = rho", "level_A1": "h(A1 x) = rho"}[name]
            ax.plot(p[:, 0], p[:, 1], color=color, ls=ls, lw=1.2, label=label)
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=7)
    ax.set_title(title, fontsize=9)
    _save(fig, path)


def plot_trajectory(pair: MatrixPair, norm: BarabanovResult, angles, indices: str, switching_angles, path, title: str = "") -> None:
    """Normalized trajectory points on the unit sphere, branch sectors shaded."""
    poly = norm.polygon
    fig, ax = plt.subplots(figsize=(5, 5))
    v = _closed(poly.vertices)
    ax.plot(v[:, 0], v[:, 1], "k-", lw=0.8)
    # shade the sectors where each matrix attains the max
    r = 1.1 * float(poly.radii().max())
    cuts = sorted(w % math.pi for w in switching_angles)
    if cuts:
        edges = cuts + [cuts[0] + math.pi]
        for a, b in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (a + b)
            u = np.array([math.cos(mid), math.sin(mid)])
            g0 = poly.gauge(pair.a0 @ u)
            g1 = poly.gauge(pair.a1 @ u)
            color = "tab:blue" if g0 > g1 else "tab:red"
            for off in (0.0, math.pi):
                t = np.linspace(a + off, b + off, 32)
                ax.fill(np.r_[0, r * np.cos(t)], np.r_[0, r * np.sin(t)], color=color, alpha=0.12, lw=0)
    phi = np.asarray(angles, dtype=float)[: len(indices)]
    u = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    pts = u / poly.gauge(u)[:, None]
    sig = np.frombuffer(indices.encode(), dtype=np.uint8) - ord("0")
    for s, color in ((0, "tab:blue"), (1, "tab:red")):
        # periodic orbits revisit the same points; draw each once
        m = np.unique(np.round(pts[sig == s], 6), axis=0)
        ax.plot(m[:, 0], m[:, 1], ".", ms=2, color=color, label=f"sigma = {s}")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=7)
    ax.set_title(title, fontsize=9)
    _save(fig, path)


def _broken(y: np.ndarray, gap: float) -> np.ndarray:
    """Copy of ``y`` with NaN inserted before jumps so lines are not drawn across them."""
    y = np.array(y, dtype=float)
    jump = np.abs(np.diff(y)) > gap
    y[1:][jump] = np.nan
    return y


def plot_angular(profile: AngularProfile, path, title: str = "") -> None:
    """Graph of Phi~ (thick) over both branches (thin); discontinuities marked."""
    fig, ax = plt.subplots(figsize=(5, 5))
    g = profile.grid
    b0, b1 = branch_angles(profile.pair, g)
    for b, color in ((b0, "tab:blue"), (b1, "tab:red")):
        ax.plot(g, _broken(b, 0.5), color=color, lw=0.5, alpha=0.4)
    for s, color in ((0, "tab:blue"), (1, "tab:red")):
        y = np.where(profile.branch == s, profile.phi_next, np.nan)
        ax.plot(g, _broken(y, JUMP_TOL), color=color, lw=1.8, label=f"Phi_{s}")
    for w in profile.discontinuities:
        ax.axvline(w, color="0.3", ls=":", lw=0.8)
    lo, hi = profile.domain
    ax.plot([lo, hi], [lo, hi], color="0.6", lw=0.5)
    ax.set_xlim(lo, hi)
    ax.set_ylim(0, math.pi)
    ax.set_xlabel("phi")
    ax.set_ylabel("Phi~(phi)")
    ax.legend(loc="upper left", fontsize=7)
    ax.set_title(title, fontsize=9)
    _save(fig, path)
