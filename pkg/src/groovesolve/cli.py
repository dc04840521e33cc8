"""Command-line interface: solve, sweep, compare and selftest."""

from __future__ import annotations

import argparse
import csv
import json
import math
import subprocess
import sys
import time
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .fixed_point import ConfigError, ProfileResult, SolveConfig, solve_profile, solve_spacetime
from .fixed_point.nonlinearity import SlopeCapError, source
from .fixed_point.config import SmallnessError
from .linear_solver import u1_profile

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2
CSV_COLUMNS = ("y", "W", "W1", "W2", "W3", "F")

# flag name -> SolveConfig field
FLAG_FIELDS = {
    "beta": "beta", "gamma": "gamma", "L": "L", "ny": "n_y", "T": "T", "nt": "n_t",
    "tol": "tol", "max_iter": "max_iter", "mode": "mode", "M_cap": "M_cap",
}
CONFIG_KEYS = {f.name for f in fields(SolveConfig)} | set(FLAG_FIELDS) | {
    "tan_beta", "out", "kernel_cache"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit with 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- configuration ----------------------------------------------------------------

def _normalise_key(key: str) -> str:
    return key.strip().replace("-", "_")


def read_config_file(path: str | Path) -> dict[str, str]:
    """``key = value`` lines with ``#`` comments, or a JSON manifest's config echo."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return {k: str(v) for k, v in data.items() if k in {f.name for f in fields(SolveConfig)}}
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = _normalise_key(key)
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(name: str, value):
    kind = {f.name: f.type for f in fields(SolveConfig)}[name]
    if kind in ("int", int):
        return int(float(value))
    if kind in ("str", str):
        return str(value)
    return float(value)


def build_config(args: argparse.Namespace) -> tuple[SolveConfig, dict]:
    """Merge the config file (if any) with flags; flags win."""
    settings: dict[str, str] = {}
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for flag in list(FLAG_FIELDS) + ["tan_beta", "out", "kernel_cache"]:
        value = getattr(args, flag, None)
        if value is not None:
            settings[flag] = value
    # a flag given on the command line overrides the other angle form from the file
    if getattr(args, "beta", None) is not None:
        settings.pop("tan_beta", None)
    elif getattr(args, "tan_beta", None) is not None:
        settings.pop("beta", None)
    if "tan_beta" in settings:
        if "beta" in settings:
            raise UsageError("config sets both beta and tan_beta")
        settings["beta"] = math.atan(float(settings.pop("tan_beta")))
    if "beta" not in settings:
        raise UsageError("one of --beta or --tan-beta is required")
    values = {}
    for key, value in settings.items():
        name = FLAG_FIELDS.get(key, key)
        if name in {f.name for f in fields(SolveConfig)}:
            values[name] = _coerce(name, value)
    extras = {k: settings[k] for k in ("out", "kernel_cache") if k in settings}
    try:
        return SolveConfig(**values), extras
    except (ConfigError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    angle = p.add_mutually_exclusive_group(required=False)
    angle.add_argument("--beta", type=float, help="contact angle in radians")
    angle.add_argument("--tan-beta", dest="tan_beta", type=float, help="tan of the contact angle")
    p.add_argument("--gamma", type=float)
    p.add_argument("--L", dest="L", type=float, help="domain length in the similarity variable")
    p.add_argument("--ny", type=int, help="number of y nodes")
    p.add_argument("--T", dest="T", type=float, help="time horizon (spacetime mode)")
    p.add_argument("--nt", type=int, help="time nodes (spacetime mode)")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--mode", choices=("profile", "spacetime"))
    p.add_argument("--M-cap", dest="M_cap", type=float, help=argparse.SUPPRESS)
    p.add_argument("--config", help="key = value file or a previous manifest.json")
    p.add_argument("--kernel-cache", dest="kernel_cache", help="binary kernel table cache")


# -- output ---------------------------------------------------------------------

def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(["git", "describe", "--tags", "--always", "--dirty"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _num(x: float):
    x = float(x)
    return x if math.isfinite(x) else None


def write_profile_csv(path: Path, result: ProfileResult) -> None:
    p = result.profile
    F = result.source_values if result.source_values is not None else source(p).F
    cols = (p.y_nodes, p.W, p.W1, p.W2, p.W3, F)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_profile_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected header {header}")
    return {name: body[:, i] for i, name in enumerate(header)}


def manifest(result: ProfileResult, cfg: SolveConfig, seconds: float) -> dict:
    out: dict = dict(cfg.as_dict())
    out["tan_beta"] = cfg.tan_beta
    out["version"] = version_string()
    out["converged"] = bool(result.converged)
    out["iterations"] = int(result.iterations)
    out["contraction_history"] = [_num(v) for v in result.contraction_history]
    out["update_norms"] = [_num(v) for v in result.update_norms]
    out["residual_bc_angle"] = _num(result.residual_bc_angle)
    out["residual_noflux"] = _num(result.residual_noflux)
    out["depth_coefficient"] = _num(result.depth_coefficient)
    out["collapse_error"] = _num(result.collapse_error)
    out["weak_residuals"] = [_num(v) for v in result.weak_residuals]
    if result.norm_report is not None:
        out["b_norm"] = _num(result.norm_report.b_norm)
        out["c_norm"] = _num(result.norm_report.c_norm)
        out["z_norm"] = _num(result.norm_report.z_norm)
    out["wall_clock_seconds"] = seconds
    return out


def run_solve(cfg: SolveConfig, out_dir: Path) -> ProfileResult:
    t0 = time.perf_counter()
    result = solve_spacetime(cfg) if cfg.mode == "spacetime" else solve_profile(cfg)
    seconds = time.perf_counter() - t0
    out_dir.mkdir(parents=True, exist_ok=True)
    write_profile_csv(out_dir / "profile.csv", result)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest(result, cfg, seconds), fh, indent=2)
        fh.write("\n")
    return result


def _apply_kernel_cache(path) -> None:
    if path:
        from .kernel import set_kernel_cache
        set_kernel_cache(path)


# -- subcommands ----------------------------------------------------------------

def cmd_solve(args: argparse.Namespace) -> int:
    try:
        cfg, extras = build_config(args)
    except UsageError as exc:
        print(f"groovesolve solve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = extras.get("out")
    if not out:
        print("groovesolve solve: --out is required", file=sys.stderr)
        return EXIT_USAGE
    _apply_kernel_cache(extras.get("kernel_cache"))
    try:
        result = run_solve(cfg, Path(out))
    except (SmallnessError, SlopeCapError) as exc:
        print(f"groovesolve solve: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    if not result.converged:
        print(f"groovesolve solve: not converged after {result.iterations} iterations; "
              f"last update {result.update_norms[-1]:.3e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print(f"converged in {result.iterations} iterations; W(0) = {result.profile.W[0]:.10g}; "
          f"output in {out}")
    return EXIT_OK


def _parse_list(text: str | None) -> list[float]:
    if not text:
        return []
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


SWEEP_COLUMNS = ("beta", "tan_beta", "iterations", "final_contraction_ratio",
                 "depth_coefficient", "residual_bc_angle", "residual_noflux", "converged", "error")


def cmd_sweep(args: argparse.Namespace) -> int:
    betas = _parse_list(args.betas)
    tans = _parse_list(args.tan_betas)
    angles = betas + [math.atan(v) for v in tans]
    if not angles:
        print("groovesolve sweep: empty beta list", file=sys.stderr)
        return EXIT_USAGE
    if not args.out:
        print("groovesolve sweep: --out is required", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        base, extras = build_config(argparse.Namespace(**{**vars(args), "beta": angles[0],
                                                           "tan_beta": None}))
    except UsageError as exc:
        print(f"groovesolve sweep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _apply_kernel_cache(extras.get("kernel_cache"))
    rows, any_ok = [], False
    for i, beta in enumerate(angles):
        row = dict.fromkeys(SWEEP_COLUMNS, "")
        row.update(beta=f"{beta:.17g}", tan_beta=f"{math.tan(beta):.17g}")
        try:
            cfg = replace(base, beta=beta)
            res = run_solve(cfg, out / f"run_{i:03d}")
            hist = res.contraction_history
            row.update(iterations=res.iterations,
                       final_contraction_ratio=f"{hist[-1]:.6g}" if hist.size else "",
                       depth_coefficient=f"{res.depth_coefficient:.17g}",
                       residual_bc_angle=f"{res.residual_bc_angle:.3e}",
                       residual_noflux=f"{res.residual_noflux:.3e}",
                       converged=int(res.converged))
            any_ok |= res.converged
        except (ConfigError, SmallnessError, SlopeCapError) as exc:
            row.update(converged=0, error=str(exc))
        rows.append(row)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    with open(out / "sweep.csv") as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK if any_ok else EXIT_NOT_CONVERGED


def linear_deviation(y: np.ndarray, W: np.ndarray, tan_beta: float) -> tuple[np.ndarray, float]:
    """W - tan(beta) U1 per node and sup|W/tan(beta) - U1| / sup|U1|."""
    u1 = u1_profile(0, y)
    diff = W - tan_beta * u1
    if tan_beta == 0.0:
        return diff, float(np.max(np.abs(diff)))
    return diff, float(np.max(np.abs(diff)) / (tan_beta * np.max(np.abs(u1))))


def cmd_compare(args: argparse.Namespace) -> int:
    run = Path(args.run_dir)
    try:
        with open(run / "manifest.json") as fh:
            info = json.load(fh)
        data = read_profile_csv(run / "profile.csv")
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"groovesolve compare: cannot read run in {run}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    tb = math.tan(float(info["beta"]))
    diff, dev = linear_deviation(data["y"], data["W"], tb)
    target = Path(args.out) if args.out else run / "compare.csv"
    with open(target, "w") as fh:
        fh.write("y,W,W_linear,difference\n")
        for y, w, d in zip(data["y"], data["W"], diff):
            fh.write(f"{y:.17g},{w:.17g},{w - d:.17g},{d:.17g}\n")
    print(f"sup-relative deviation from tan(beta) U1: {dev:.6e}")
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    from .acceptance import run_all
    only = [int(v) for v in _parse_list(args.only)] or None
    results = run_all(only=only, stream=sys.stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="groovesolve",
                     description="Self-similar thermal grooving profiles by Picard iteration.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("solve", help="solve one configuration")
    _add_solve_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("sweep", help="solve a list of angles")
    _add_solve_flags(p)
    p.add_argument("--betas", help="comma-separated angles in radians")
    p.add_argument("--tan-betas", dest="tan_betas", help="comma-separated tan(beta) values")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("compare", help="compare a run with the linearized profile")
    p.add_argument("run_dir")
    p.add_argument("--out", help="CSV destination (default RUN_DIR/compare.csv)")
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
