"""Command-line front end.

Every subcommand is a batch run that reads a preset or a JSON config, writes
its results into ``--out`` and exits with a status a pipeline can test:

    0  success
    2  usage or configuration error (nothing computed, nothing written)
    3  the norm iteration did not reach the requested gap
    4  the iterated unit ball degenerated (reducible pair)

Examples:
    barabanov norm --preset eqM1-mycase --out runs/m1
    barabanov trajectory --preset case2 --steps 10000 --out runs/c2
    barabanov angular --preset case2 --polygon runs/c2/polygon.json --out runs/c2
    barabanov analyze runs/c2/sequence.txt --out runs/c2
    barabanov generate sturmian --theta 0.5 -n 20
    barabanov bruteforce --preset eqM1-mycase -n 12 --bounds runs/m1/bounds.json
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

from . import figures, outputs
from .angular import NotConvergedError, NotInvariantError, angular_function, switching_lines
from .config import ConfigError, ExperimentConfig, PRESETS, load_config, parse_config
from .linalg import MatrixPair
from .norm import (
    MAX_BRUTE_FORCE_LENGTH,
    BarabanovResult,
    DegenerateBallError,
    NonConvergenceError,
    brute_force_bounds,
    compute_barabanov,
)
from .symbolic import (
    analyze,
    compare,
    gen_double_rotation,
    gen_mismatched_coding,
    gen_rotation_coding,
    gen_sturmian,
)
from .trajectory import TieRule, run

log = logging.getLogger("barabanov")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_DEGENERATE = 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- config


def resolve_config(args) -> ExperimentConfig:
    """Config from ``--config`` or ``--preset`` with command-line overrides applied."""
    if args.config and args.preset:
        raise UsageError("use either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = parse_config({"pair": {"preset": args.preset}})
    else:
        raise UsageError("a matrix pair is required: pass --preset or --config")
    if getattr(args, "tol", None) is not None:
        try:
            cfg = dataclasses.replace(cfg, iteration=dataclasses.replace(cfg.iteration, tol=args.tol))
        except ValueError as exc:
            raise ConfigError(f"--tol: {exc}") from exc
    if getattr(args, "steps", None) is not None:
        if args.steps < 1:
            raise ConfigError("--steps must be >= 1")
        cfg = dataclasses.replace(cfg, trajectory=dataclasses.replace(cfg.trajectory, steps=args.steps))
    if getattr(args, "tie_rule", None) is not None:
        cfg = dataclasses.replace(cfg, trajectory=dataclasses.replace(cfg.trajectory, tie_rule=TieRule(args.tie_rule)))
    if getattr(args, "no_figures", False):
        cfg = dataclasses.replace(cfg, emit=dataclasses.replace(cfg.emit, figures=False))
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out=args.out)
    return cfg


def _outdir(cfg_out: str) -> Path:
    out = Path(cfg_out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _title(cfg: ExperimentConfig) -> str:
    p = cfg.pair
    if p.preset:
        return p.preset
    if p.family == "matrices":
        return "custom pair"
    return ", ".join(f"{k}={v:g}" for k, v in p.params.items())


def _norm_for(cfg: ExperimentConfig, pair: MatrixPair, polygon_path: str | None) -> BarabanovResult:
    if polygon_path:
        try:
            return outputs.load_result(polygon_path, pair)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from exc
    return compute_barabanov(pair, cfg.iteration, raise_on_nonconvergence=True)


def _manifest(out: Path, command: str, cfg: ExperimentConfig | None, files, **extra) -> None:
    doc = {"command": command, "files": sorted(str(Path(f).name) for f in files), **extra}
    if cfg is not None:
        doc["config"] = cfg.to_doc()
    outputs.write_json(out / f"{command}.run.json", doc)


# ---------------------------------------------------------------- commands


def cmd_norm(args) -> int:
    cfg = resolve_config(args)
    pair = cfg.pair.build()
    result = compute_barabanov(pair, cfg.iteration)
    out = _outdir(cfg.out)
    files = list(outputs.save_result(result, pair, out).values())
    if cfg.emit.figures and result.converged:
        prof = angular_function(pair, result, cfg.angular.grid, rotation_iterations=0)
        rows = figures.sphere_data(pair, result, prof.switching_angles)
        outputs.write_csv(out / "sphere.csv", ("curve", "x", "y"), rows)
        figures.plot_sphere(rows, out / "sphere.svg", _title(cfg))
        files += [out / "sphere.csv", out / "sphere.svg"]
    _manifest(out, "norm", cfg, files)
    print(f"rho in [{result.rho_lower:.12g}, {result.rho_upper:.12g}]  gap {result.gap:.3e}  "
          f"iterations {result.iterations}  vertices {len(result.polygon)}")
    if not result.converged:
        print(f"not converged to tol {cfg.iteration.tol:g}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_trajectory(args) -> int:
    cfg = resolve_config(args)
    if cfg.emit.stats and cfg.trajectory.steps < cfg.analysis.n_max:
        raise ConfigError("trajectory.steps is shorter than analysis.n_max")
    pair = cfg.pair.build()
    norm = _norm_for(cfg, pair, args.polygon)
    out = _outdir(cfg.out)
    files = []
    if not args.polygon and (cfg.emit.polygon or cfg.emit.figures):
        files += outputs.save_result(norm, pair, out).values()
    traj = run(pair, norm, cfg.trajectory.start, cfg.trajectory.steps, cfg.trajectory.tie_rule)
    files += outputs.save_trajectory(traj, out).values()
    if cfg.emit.stats:
        stats = analyze(traj.indices, cfg.analysis.n_max, cfg.analysis.window)
        files += outputs.save_stats(stats, out).values()
        print(f"freq0 {stats.freq0:.4f}  verdict {stats.verdict.value}  missing digram {stats.missing_digram}")
    if cfg.emit.figures:
        prof = angular_function(pair, norm, cfg.angular.grid, rotation_iterations=0, allow_unconverged=True)
        figures.plot_trajectory(pair, norm, traj.angles, traj.indices, prof.switching_angles,
                                out / "trajectory.svg", _title(cfg))
        files.append(out / "trajectory.svg")
    _manifest(out, "trajectory", cfg, files, polygon_input=args.polygon, tie_events=len(traj.tie_events))
    print(f"{len(traj)} steps, rho {norm.rho:.12g}, {len(traj.tie_events)} tie events")
    return EXIT_OK


def cmd_angular(args) -> int:
    cfg = resolve_config(args)
    pair = cfg.pair.build()
    norm = _norm_for(cfg, pair, args.polygon)
    out = _outdir(cfg.out)
    files = []
    if not args.polygon and (cfg.emit.polygon or cfg.emit.figures):
        files += outputs.save_result(norm, pair, out).values()
    prof = angular_function(pair, norm, cfg.angular.grid, domain=cfg.angular_domain(pair),
                            rotation_iterations=cfg.angular.rotation_iterations)
    files += outputs.save_angular(prof, out).values()
    if cfg.emit.figures:
        figures.plot_angular(prof, out / "angular.svg", _title(cfg))
        full = prof if prof.domain == (0.0, math.pi) else angular_function(
            pair, norm, cfg.angular.grid, rotation_iterations=0)
        rows = figures.sphere_data(pair, norm, full.switching_angles)
        outputs.write_csv(out / "sphere.csv", ("curve", "x", "y"), rows)
        figures.plot_sphere(rows, out / "sphere.svg", _title(cfg))
        files += [out / "angular.svg", out / "sphere.csv", out / "sphere.svg"]
    _manifest(out, "angular", cfg, files, polygon_input=args.polygon)
    kappa = "n/a" if prof.rotation_number is None else f"{prof.rotation_number:.6f}"
    print(f"domain [{prof.domain[0]:.6f}, {prof.domain[1]:.6f})  switching lines {switching_lines(prof)}  "
          f"discontinuities {len(prof.discontinuities)}  orientation preserving {prof.orientation_preserving}  "
          f"rotation number {kappa}")
    return EXIT_OK


def _analysis_settings(args) -> tuple[int, int, str]:
    if args.config:
        cfg = load_config(args.config)
        n_max, window, out = cfg.analysis.n_max, cfg.analysis.window, cfg.out
    else:
        n_max, window, out = 20, 4, "out"
    n_max = args.n_max if args.n_max is not None else n_max
    window = args.window if args.window is not None else window
    if n_max < 1 or window < 1:
        raise ConfigError("--n-max and --window must be >= 1")
    return n_max, window, args.out or out


def _read_sequence(path) -> str:
    try:
        return outputs.read_sequence(path)
    except OSError as exc:
        raise UsageError(f"cannot read sequence: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_analyze(args) -> int:
    n_max, window, out_dir = _analysis_settings(args)
    s = _read_sequence(args.sequence)
    if len(s) < n_max:
        raise UsageError(f"sequence of length {len(s)} is shorter than n_max = {n_max}")
    stats = analyze(s, n_max, window)
    out = _outdir(out_dir)
    files = list(outputs.save_stats(stats, out).values())
    _manifest(out, "analyze", None, files, sequence=str(args.sequence), n_max=n_max, window=window)
    print(f"length {stats.length}  freq0 {stats.freq0:.4f}  verdict {stats.verdict.value}  "
          f"missing digram {stats.missing_digram}")
    return EXIT_OK


def cmd_generate(args) -> int:
    need = {
        "sturmian": ("theta",),
        "rotation": ("theta",),
        "double-rotation": ("theta1", "theta2", "theta"),
        "mismatched": ("theta", "theta0"),
    }[args.kind]
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{args.kind} needs --{', --'.join(missing)}")
    if args.length < 1:
        raise UsageError("-n must be >= 1")
    try:
        if args.kind == "sturmian":
            s = gen_sturmian(args.theta, args.eta, args.length)
        elif args.kind == "rotation":
            s = gen_rotation_coding(args.theta, args.phi0, args.length)
        elif args.kind == "double-rotation":
            s = gen_double_rotation(args.theta1, args.theta2, args.theta, args.phi0, args.length)
        else:
            s = gen_mismatched_coding(args.theta, args.theta0, args.phi0, args.length)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.output:
        outputs.write_sequence(args.output, s)
    else:
        print(s)
    return EXIT_OK


def cmd_compare(args) -> int:
    n_max, window, out_dir = _analysis_settings(args)
    s, t = _read_sequence(args.left), _read_sequence(args.right)
    if min(len(s), len(t)) < n_max:
        raise UsageError(f"both sequences must be at least n_max = {n_max} long")
    cmp = compare(s, t, window, n_max)
    out = _outdir(out_dir)
    outputs.write_json(out / "compare.json", cmp.report())
    _manifest(out, "compare", None, [out / "compare.json"], left=str(args.left), right=str(args.right))
    print(f"max word-frequency gap {cmp.max_gap:.4f}  "
          f"verdicts {cmp.left.verdict.value} / {cmp.right.verdict.value}")
    return EXIT_OK


def cmd_bruteforce(args) -> int:
    cfg = resolve_config(args)
    if not 1 <= args.n <= MAX_BRUTE_FORCE_LENGTH:
        raise UsageError(f"-n must be in [1, {MAX_BRUTE_FORCE_LENGTH}]")
    pair = cfg.pair.build()
    lower, min_norm, upper = brute_force_bounds(pair, args.n)
    doc = {"n": args.n, "rho_bar_n": lower, "min_norm_n": min_norm, "rho_n": upper, "pair": outputs.pair_doc(pair)}
    if args.bounds:
        try:
            b = outputs.read_json(args.bounds)
            lo, hi = float(b["rho_lower"]), float(b["rho_upper"])
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read bounds record: {exc}") from exc
        doc["certified"] = [lo, hi]
        doc["consistent"] = lower <= hi and lo <= upper
    out = _outdir(cfg.out)
    outputs.write_json(out / "bruteforce.json", doc)
    _manifest(out, "bruteforce", cfg, [out / "bruteforce.json"])
    print(f"n={args.n}: {lower:.12g} <= rho <= {upper:.12g}"
          + (f"  consistent with certified interval: {doc['consistent']}" if args.bounds else ""))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _pair_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--preset", choices=sorted(PRESETS), help="named matrix pair")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--out", help="output directory (default from config, else ./out)")
    p.add_argument("--tol", type=float, help="target gap between certified JSR bounds")
    p.add_argument("--seedless", action="store_true",
                   help="accepted for pipeline compatibility; every computation is deterministic")
    p.add_argument("--no-figures", action="store_true", help="skip SVG output")
    return p


def _trajectory_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--steps", type=int, help="trajectory length")
    p.add_argument("--tie-rule", choices=[t.value for t in TieRule], help="index chosen on exact ties")
    p.add_argument("--polygon", help="reuse a polygon file written by 'norm' instead of recomputing")
    return p


def _analysis_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON experiment config (its analysis section and out are used)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--n-max", type=int, help="largest factor length for complexity (default 20)")
    p.add_argument("--window", type=int, help="longest word in the frequency table (default 4)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barabanov",
        description="Barabanov norms, extremal trajectories and their index sequences for pairs of 2x2 matrices.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Examples:" + __doc__.split("Examples:", 1)[1],
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log iteration progress")
    sub = parser.add_subparsers(dest="command", required=True)
    pair, traj, ana = _pair_options(), _trajectory_options(), _analysis_options()

    p = sub.add_parser("norm", parents=[pair], help="polygonal Barabanov norm and certified JSR bounds")
    p.set_defaults(func=cmd_norm)
    p = sub.add_parser("trajectory", parents=[pair, traj], help="extremal trajectory and its index sequence")
    p.set_defaults(func=cmd_trajectory)
    p = sub.add_parser("angular", parents=[pair, traj], help="angular map, switching lines, rotation number")
    p.set_defaults(func=cmd_angular)

    p = sub.add_parser("analyze", parents=[ana], help="statistics and Sturmian verdict of a 0/1 sequence")
    p.add_argument("sequence", help="file holding a 0/1 string")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="reference circle-map codings")
    p.add_argument("kind", choices=["sturmian", "rotation", "double-rotation", "mismatched"])
    p.add_argument("--theta", type=float)
    p.add_argument("--theta0", type=float, help="coding arc length (mismatched)")
    p.add_argument("--theta1", type=float, help="shift on [0, theta) (double-rotation)")
    p.add_argument("--theta2", type=float, help="shift on [theta, 1) (double-rotation)")
    p.add_argument("--eta", type=float, default=0.0, help="intercept (sturmian)")
    p.add_argument("--phi0", type=float, default=0.0, help="initial point")
    p.add_argument("-n", "--length", type=int, default=1000)
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compare", parents=[ana], help="word statistics of two sequences side by side")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bruteforce", parents=[pair], help="exhaustive bounds over all products of length n")
    p.add_argument("-n", type=int, default=12)
    p.add_argument("--bounds", help="bounds.json from 'norm' to check consistency against")
    p.set_defaults(func=cmd_bruteforce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"barabanov {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotInvariantError as exc:
        print(f"barabanov {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergenceError, NotConvergedError) as exc:
        print(f"barabanov {args.command}: norm iteration did not converge ({exc})", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except DegenerateBallError as exc:
        print(f"barabanov {args.command}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
