"""Deterministic result files: JSON records, CSV tables and sequence strings.

All writers go through :func:`atomic_write`, so a reader never sees a partial
file.  Floats are written with ``repr`` and therefore round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import Iterable, Sequence

from .angular import AngularProfile, switching_sets
from .linalg import MatrixPair
from .norm import BarabanovResult, barabanov_residual
from .polygon import atomic_write, from_document, to_document
from .symbolic import SequenceStats, check_sequence
from .trajectory import Trajectory


def write_json(path, doc) -> None:
    atomic_write(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    atomic_write(path, buf.getvalue())


def write_sequence(path, s: str) -> None:
    atomic_write(path, check_sequence(s) + "\n")


def read_sequence(path) -> str:
    with open(path) as fh:
        s = "".join(fh.read().split())
    return check_sequence(s)


def pair_doc(pair: MatrixPair) -> dict:
    return {"a0": pair.a0.tolist(), "a1": pair.a1.tolist()}


def bounds_doc(result: BarabanovResult) -> dict:
    return {
        "rho_lower": result.rho_lower,
        "rho_upper": result.rho_upper,
        "rho": result.rho,
        "gap": result.gap,
        "iterations": result.iterations,
        "residual": result.residual,
        "converged": result.converged,
        "vertices": len(result.polygon),
    }


def save_result(result: BarabanovResult, pair: MatrixPair, out: Path) -> dict[str, Path]:
    """Polygon file (with its bounds), bounds record and iteration log."""
    paths = {"polygon": out / "polygon.json", "bounds": out / "bounds.json", "iterations": out / "iterations.csv"}
    doc = to_document(result.polygon, rho_lower=result.rho_lower, rho_upper=result.rho_upper,
                      iterations=result.iterations, converged=result.converged, pair=pair_doc(pair))
    atomic_write(paths["polygon"], json.dumps(doc, indent=1) + "\n")
    write_json(paths["bounds"], {**bounds_doc(result), "pair": pair_doc(pair)})
    write_csv(paths["iterations"], ("k", "lower", "upper", "vertices"),
              ((r.k, r.lower, r.upper, r.vertices) for r in result.history))
    return paths


def load_result(path, pair: MatrixPair) -> BarabanovResult:
    """Rebuild a :class:`BarabanovResult` from a polygon file written by :func:`save_result`.

    The stored bounds are reused verbatim; the residual is recomputed.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"polygon file not found: {path}")
    doc = read_json(path)
    poly = from_document(doc)
    try:
        lo, hi = float(doc["rho_lower"]), float(doc["rho_upper"])
    except KeyError:
        raise ValueError("polygon file carries no JSR bounds") from None
    stored = doc.get("pair")
    if stored is not None and stored != pair_doc(pair):
        raise ValueError("polygon file was computed for a different matrix pair")
    return BarabanovResult(
        polygon=poly,
        rho_lower=lo,
        rho_upper=hi,
        iterations=int(doc.get("iterations", 0)),
        residual=barabanov_residual(pair, poly, 0.5 * (lo + hi)),
        converged=bool(doc.get("converged", True)),
    )


def save_trajectory(traj: Trajectory, out: Path) -> dict[str, Path]:
    paths = {"trajectory": out / "trajectory.csv", "sequence": out / "sequence.txt"}
    write_csv(paths["trajectory"], ("n", "phi", "ln_norm", "sigma"), traj.rows())
    write_sequence(paths["sequence"], traj.indices)
    return paths


def angular_doc(profile: AngularProfile) -> dict:
    sets = switching_sets(profile)
    return {
        "domain": list(profile.domain),
        "grid": len(profile.grid),
        "switching_angles": list(profile.switching_angles),
        "jumps": list(profile.jumps),
        "discontinuities": list(profile.discontinuities),
        "degree": profile.degree,
        "orientation_preserving": profile.orientation_preserving,
        "rotation_number": profile.rotation_number,
        "omega0": [list(iv) for iv in sets.omega0],
        "omega1": [list(iv) for iv in sets.omega1],
        "rho": profile.rho,
    }


def save_angular(profile: AngularProfile, out: Path) -> dict[str, Path]:
    paths = {"angular": out / "angular.csv", "summary": out / "angular.json"}
    write_csv(paths["angular"], ("phi", "sigma", "phi_next"), profile.to_rows())
    write_json(paths["summary"], angular_doc(profile))
    return paths


def save_stats(stats: SequenceStats, out: Path, prefix: str = "") -> dict[str, Path]:
    paths = {"stats": out / f"{prefix}stats.json", "complexity": out / f"{prefix}complexity.csv"}
    write_json(paths["stats"], stats.report())
    write_csv(paths["complexity"], ("n", "p", "balance_defect"),
              ((n, p, b) for n, (p, b) in enumerate(zip(stats.complexity, stats.balance_defect), start=1)))
    return paths
