"""Command-line entry point: runs, certificates, sweeps, convergence studies.

Subcommands:

    mowave simulate CONFIG    one run; writes energy.csv, identity.csv,
                              decay.svg, manifest.json (and trajectory.csv
                              with --trajectory) into the output directory
    mowave certify CONFIG     prints the decay certificate as JSON
    mowave convergence CONFIG refinement studies; prints observed orders
    mowave sweep CONFIG       Cartesian parameter sweep; writes sweep.csv

Exit codes: 0 success, 2 validation or config failure, 3 blow-up,
4 decay-bound violation, 5 empty certificate window, 6 convergence order
below 1.8. Diagnostics go to standard error; results go to files and
standard output.

The output directory is --outdir, else $MOWAVE_OUTDIR, else the working
directory. Identical configs and flags produce bit-identical energy.csv
(floats are written with repr and the pipeline is deterministic); sweep
cells run in separate processes when --jobs > 1 with results merged in a
fixed order, so the jobs setting never changes the CSV content.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .certify import build_certificate, check_decay_bound, fit_decay, window_edges
from .energy import (
    EnergySeries,
    energy_rate_residual,
    multiplier_identity_residual,
    write_energy_csv,
    write_identity_csv,
)
from .errors import (
    BlowUpError,
    ConfigError,
    DegenerateDataError,
    MowaveError,
    ResourceLimitError,
    ValidationError,
)
from .model import (
    AffineAlpha,
    ConstantAlpha,
    DampingParams,
    ConstantBeta,
    ExponentialBeta,
    ManufacturedField,
    ProblemSpec,
    SaturatingAlpha,
    SineMode,
    load_config,
    spec_from_dict,
    spec_to_dict,
    validate_assumptions,
)
from .solver import Grid, exact_reference_fields, simulate, step_size
from .svgplot import write_decay_svg

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BLOWUP = 3
EXIT_BOUND = 4
EXIT_EMPTY_WINDOW = 5
EXIT_ORDER = 6

_MIN_ORDER = 1.8


def _err(msg: str) -> None:
    print(f"mowave: {msg}", file=sys.stderr)


def _outdir(arg) -> Path:
    base = arg or os.environ.get("MOWAVE_OUTDIR") or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def write_manifest(path: Path, config: dict, grid_info: dict, outputs: list[Path], checks: dict, wall_clock: float) -> None:
    manifest = {
        "config_hash": config_hash(config),
        "config": config,
        "grid": grid_info,
        "outputs": {
            p.name: {"sha256": _sha256(p), "bytes": p.stat().st_size} for p in outputs
        },
        "checks": checks,
        "wall_clock_s": wall_clock,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def verify_manifest(manifest_path) -> list[str]:
    """Re-check a manifest against the files next to it; returns mismatches."""
    manifest_path = Path(manifest_path)
    problems: list[str] = []
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return [f"cannot read manifest: {exc}"]
    if config_hash(manifest.get("config", {})) != manifest.get("config_hash"):
        problems.append("config_hash does not match the embedded config")
    for name, entry in manifest.get("outputs", {}).items():
        target = manifest_path.parent / name
        if not target.exists():
            problems.append(f"{name}: missing")
            continue
        if _sha256(target) != entry.get("sha256"):
            problems.append(f"{name}: checksum mismatch")
        elif target.stat().st_size != entry.get("bytes"):
            problems.append(f"{name}: size mismatch")
    return problems


def _write_trajectory_csv(traj, path: Path) -> None:
    rows = ["t,y,v,w"]
    y = traj.grid.y
    for state in traj.states:
        for i in range(y.size):
            rows.append(
                f"{repr(float(state.t))},{repr(float(y[i]))},"
                f"{repr(float(state.v[i]))},{repr(float(state.w[i]))}"
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


# ---------------------------------------------------------------------------
# simulate


def run_simulation(
    spec: ProblemSpec,
    outdir: Path,
    grid_n: int = 200,
    cfl: float = 0.5,
    sample_every: int = 10,
    paper_literal: bool = False,
    write_trajectory: bool = False,
) -> tuple[int, dict]:
    """Full single-run pipeline; returns (exit_code, summary dict).

    Writes energy.csv, identity.csv, decay.svg, manifest.json (and
    trajectory.csv on request) into outdir. The summary carries the
    certificate edges and the measured decay for sweep aggregation.
    """
    started = time.perf_counter()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary: dict = {
        "lambda_lo": None,
        "lambda_hi": None,
        "lambda_fit": None,
        "C": None,
        "bound_holds": None,
        "window_empty": None,
        "exit": EXIT_OK,
    }

    report = validate_assumptions(spec)
    if not report.ok:
        _err("assumption checks failed:\n" + report.summary())
        summary["exit"] = EXIT_VALIDATION
        return EXIT_VALIDATION, summary

    grid = Grid(grid_n)
    try:
        traj = simulate(spec, grid, sample_every=sample_every, cfl=cfl)
    except BlowUpError as exc:
        _err(str(exc))
        summary["exit"] = EXIT_BLOWUP
        return EXIT_BLOWUP, summary
    except ResourceLimitError as exc:
        _err(str(exc))
        summary["exit"] = EXIT_VALIDATION
        return EXIT_VALIDATION, summary

    series_exact = EnergySeries.from_trajectory(traj)
    series_out = (
        EnergySeries.from_trajectory(traj, paper_literal=True) if paper_literal else series_exact
    )

    lo, hi = window_edges(spec.damping, spec.beta, spec.alpha, spec.horizon)
    summary["lambda_lo"], summary["lambda_hi"] = lo, hi
    cert = build_certificate(spec.damping, spec.beta, spec.alpha, spec.horizon)
    summary["window_empty"] = cert is None
    if cert is not None:
        summary["C"] = cert.C

    lam = cert.lam if cert is not None else 0.1
    identity = multiplier_identity_residual(traj, lam=lam, phi_rate=lam)

    bound_report = None
    if cert is not None:
        bound_report = check_decay_bound(
            series_exact, cert, dt=traj.dt, rate_residual=identity.residual_rate
        )
        summary["bound_holds"] = bound_report.holds

    try:
        fit = fit_decay(series_exact)
        summary["lambda_fit"] = fit.lambda_fit
    except DegenerateDataError:
        fit = None

    bound_values = cert.bound_values(series_out.t, series_exact.e0) if cert is not None else None
    energy_path = outdir / "energy.csv"
    write_energy_csv(series_out, energy_path, bound=bound_values)
    identity_path = outdir / "identity.csv"
    write_identity_csv(identity, identity_path)
    svg_path = outdir / "decay.svg"
    write_decay_svg(svg_path, series_out.t, series_out.E, bound=bound_values)
    outputs = [energy_path, identity_path, svg_path]
    if write_trajectory:
        traj_path = outdir / "trajectory.csv"
        _write_trajectory_csv(traj, traj_path)
        outputs.append(traj_path)

    exit_code = EXIT_OK
    if bound_report is not None and not bound_report.holds:
        _err(
            f"decay bound violated: worst margin {bound_report.worst_margin:.6g} "
            f"first at t = {bound_report.first_violation:.6g}"
        )
        exit_code = EXIT_BOUND
    summary["exit"] = exit_code

    checks = {
        "validation": "pass",
        "blow_up": False,
        "certificate": "ok" if cert is not None else "empty",
        "lambda_lo": summary["lambda_lo"],
        "lambda_hi": summary["lambda_hi"],
        "C": summary["C"],
        "bound_holds": summary["bound_holds"],
        "lambda_fit": summary["lambda_fit"],
        "relative_plu_residual": identity.relative_residual,
        "rate_residual": identity.residual_rate,
        "exit_code": exit_code,
    }
    grid_info = {
        "n": grid_n,
        "cfl": cfl,
        "dt": traj.dt,
        "sample_every": sample_every,
        "snapshots": len(traj.states),
    }
    write_manifest(
        outdir / "manifest.json",
        spec_to_dict(spec),
        grid_info,
        outputs,
        checks,
        time.perf_counter() - started,
    )
    return exit_code, summary


def cmd_simulate(args) -> int:
    try:
        spec = load_config(args.config)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    outdir = _outdir(args.outdir)
    try:
        code, summary = run_simulation(
            spec,
            outdir,
            grid_n=args.grid_n,
            cfl=args.cfl,
            sample_every=args.sample_every,
            paper_literal=args.paper_literal_energy,
            write_trajectory=args.trajectory,
        )
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    if code == EXIT_OK:
        parts = [f"wrote {outdir / 'energy.csv'}"]
        if summary["lambda_hi"] is not None:
            parts.append(f"lambda window [{summary['lambda_lo']:.6g}, {summary['lambda_hi']:.6g}]")
        if summary["lambda_fit"] is not None:
            parts.append(f"lambda_fit {summary['lambda_fit']:.6g}")
        print("; ".join(parts))
    return code


# ---------------------------------------------------------------------------
# certify


def cmd_certify(args) -> int:
    try:
        spec = load_config(args.config)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    report = validate_assumptions(spec)
    if not report.ok:
        _err("assumption checks failed:\n" + report.summary())
        return EXIT_VALIDATION
    try:
        cert = build_certificate(spec.damping, spec.beta, spec.alpha, spec.horizon)
    except MowaveError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    if cert is None:
        lo, hi = window_edges(spec.damping, spec.beta, spec.alpha, spec.horizon)
        _err(
            f"empty window: lambda_lo = {lo:.6g} exceeds lambda_hi = {hi:.6g}; "
            "beta grows too fast for any certified rate"
        )
        return EXIT_EMPTY_WINDOW
    print(json.dumps(cert.to_json(), indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# convergence


def _l2_error(traj, v_exact) -> float:
    from .model import eval_alpha

    last = traj.states[-1]
    grid = traj.grid
    al = eval_alpha(traj.spec.alpha, last.t)[0]
    diff = last.v - v_exact(grid.y, last.t)
    return math.sqrt(float((grid.quad_weights * al) @ diff**2))


def _orders(ns, errors) -> list[float]:
    out = []
    for (n1, e1), (n2, e2) in zip(zip(ns, errors), zip(ns[1:], errors[1:])):
        if e2 <= 0.0 or e1 <= 0.0:
            out.append(float("inf"))
        else:
            out.append(math.log(e1 / e2) / math.log(n2 / n1))
    return out


def _modal_spec() -> ProblemSpec:
    return ProblemSpec(
        damping=DampingParams(a=1.0, b=1.0, rho=1.0),
        beta=ConstantBeta(c=1.0),
        alpha=ConstantAlpha(),
        init=SineMode(m=1, amp_u0=1.0, amp_u1=-0.5),
        horizon=2.0,
        linear_mode=True,
    )


def _modal_exact():
    omega = math.sqrt(math.pi**2 + 1.0 - 0.25)

    def v_exact(y, t):
        return math.exp(-0.5 * t) * math.cos(omega * t) * np.sin(math.pi * y)

    return v_exact


def cmd_convergence(args) -> int:
    try:
        spec = load_config(args.config)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    try:
        ns = [int(part) for part in str(args.grid_n).split(",")]
    except ValueError:
        _err(f"--grid-n expects a comma-separated integer list, got {args.grid_n!r}")
        return EXIT_VALIDATION
    if len(ns) < 2:
        _err("--grid-n needs at least two grid sizes for observed orders")
        return EXIT_VALIDATION
    if spec.source is None:
        spec = replace(spec, source=ManufacturedField())
    report = validate_assumptions(spec)
    if not report.ok:
        _err("assumption checks failed:\n" + report.summary())
        return EXIT_VALIDATION

    studies = [
        ("manufactured", spec, exact_reference_fields(spec.source, spec)[0]),
        ("modal", _modal_spec(), _modal_exact()),
    ]
    worst = float("inf")
    for name, study_spec, v_exact in studies:
        errors, rates, plus = [], [], []
        for n in ns:
            traj = simulate(study_spec, Grid(n), sample_every=1, cfl=args.cfl)
            identity = multiplier_identity_residual(traj, lam=0.1, phi_rate=0.1)
            errors.append(_l2_error(traj, v_exact))
            rates.append(identity.residual_rate)
            plus.append(identity.relative_residual)
        for metric, values in (
            ("solution_error", errors),
            ("rate_residual", rates),
            ("plu_residual", plus),
        ):
            for (n1, n2), order in zip(zip(ns, ns[1:]), _orders(ns, values)):
                print(f"{name} {metric} N={n1}->N={n2} order {order:.3f}")
                worst = min(worst, order)
    print(f"minimum observed order {worst:.3f}")
    if worst < _MIN_ORDER:
        _err(f"observed order {worst:.3f} below {_MIN_ORDER}")
        return EXIT_ORDER
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


_SWEEP_AXES = ("a", "b", "k", "mu", "rho")


def _apply_overrides(base: dict, overrides: dict) -> dict:
    cfg = json.loads(json.dumps(base))  # deep copy
    for axis, value in overrides.items():
        if axis == "mu":
            if cfg.get("beta", {}).get("variant") != "exponential":
                raise ConfigError("sweep axis 'mu' requires the base beta to be exponential")
            cfg["beta"]["mu"] = value
        elif axis == "k":
            if cfg.get("alpha", {}).get("variant") not in ("affine", "saturating"):
                raise ConfigError("sweep axis 'k' requires an affine or saturating base alpha")
            cfg["alpha"]["k"] = value
        elif axis in ("a", "b", "rho"):
            cfg["damping"][axis] = value
        else:
            raise ConfigError(f"unknown sweep axis {axis!r}")
    return cfg


def _sweep_cell(payload: dict) -> dict:
    """One sweep cell: simulate + certify in an isolated directory."""
    cfg = payload["config"]
    row = {
        "mu": cfg["beta"].get("mu", "") if cfg["beta"]["variant"] == "exponential" else "",
        "rho": cfg["damping"]["rho"],
        "k": cfg["alpha"].get("k", ""),
        "a": cfg["damping"]["a"],
        "b": cfg["damping"]["b"],
        "lambda_lo": "",
        "lambda_hi": "",
        "lambda_fit": "",
        "C": "",
        "bound_holds": "",
        "exit": EXIT_OK,
    }
    celldir = Path(payload["celldir"])
    celldir.mkdir(parents=True, exist_ok=True)
    try:
        spec = spec_from_dict(cfg)
        code, summary = run_simulation(
            spec,
            celldir,
            grid_n=payload["grid_n"],
            cfl=payload["cfl"],
            sample_every=payload["sample_every"],
        )
    except MowaveError:
        row["exit"] = EXIT_VALIDATION
        return row
    for key in ("lambda_lo", "lambda_hi", "lambda_fit", "C"):
        if summary[key] is not None:
            row[key] = summary[key]
    if summary["bound_holds"] is not None:
        row["bound_holds"] = "true" if summary["bound_holds"] else "false"
    if code == EXIT_OK and summary["window_empty"]:
        code = EXIT_EMPTY_WINDOW
    row["exit"] = code
    return row


def _format_cell(value) -> str:
    if value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def cmd_sweep(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            sweep_cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _err(f"cannot read sweep config: {exc}")
        return EXIT_VALIDATION
    if not isinstance(sweep_cfg, dict) or "base" not in sweep_cfg:
        _err("sweep config must be an object with a 'base' config")
        return EXIT_VALIDATION
    unknown = sorted(set(sweep_cfg) - {"base", "axes"})
    if unknown:
        _err(f"sweep config: unknown keys {unknown}")
        return EXIT_VALIDATION
    axes = sweep_cfg.get("axes", {})
    if not isinstance(axes, dict):
        _err("sweep config: 'axes' must be an object of axis -> value list")
        return EXIT_VALIDATION
    bad_axes = sorted(set(axes) - set(_SWEEP_AXES))
    if bad_axes:
        _err(f"sweep config: unknown axes {bad_axes}; allowed {list(_SWEEP_AXES)}")
        return EXIT_VALIDATION

    try:
        spec_from_dict(sweep_cfg["base"])
    except ConfigError as exc:
        _err(f"sweep base config invalid: {exc}")
        return EXIT_VALIDATION

    names = sorted(axes)
    value_lists = []
    for name in names:
        values = axes[name]
        if not isinstance(values, list) or not values:
            _err(f"sweep axis {name!r} must be a nonempty list")
            return EXIT_VALIDATION
        value_lists.append(values)

    outdir = _outdir(args.outdir)
    payloads = []
    for idx, combo in enumerate(itertools.product(*value_lists)):
        overrides = dict(zip(names, combo))
        try:
            cfg = _apply_overrides(sweep_cfg["base"], overrides)
        except ConfigError as exc:
            _err(str(exc))
            return EXIT_VALIDATION
        payloads.append(
            {
                "config": cfg,
                "celldir": str(outdir / f"cell_{idx:04d}"),
                "grid_n": args.grid_n,
                "cfl": args.cfl,
                "sample_every": args.sample_every,
            }
        )

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, payloads))
    else:
        rows = [_sweep_cell(p) for p in payloads]

    columns = ["mu", "rho", "k", "a", "b", "lambda_lo", "lambda_hi", "lambda_fit", "C", "bound_holds", "exit"]
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    sweep_path = outdir / "sweep.csv"
    with open(sweep_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {sweep_path} ({len(rows)} cells)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mowave",
        description="Damped nonlinear waves on expanding intervals: simulate, certify, study.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one config and write outputs")
    sim.add_argument("config", help="path to a JSON problem config")
    sim.add_argument("--grid-n", type=int, default=200, help="grid intervals N (default 200)")
    sim.add_argument("--cfl", type=float, default=0.5, help="CFL number (default 0.5)")
    sim.add_argument("--sample-every", type=int, default=10, help="snapshot stride (default 10)")
    sim.add_argument("--outdir", default=None, help="output directory (default $MOWAVE_OUTDIR or .)")
    sim.add_argument("--trajectory", action="store_true", help="also write trajectory.csv")
    sim.add_argument(
        "--paper-literal-energy",
        action="store_true",
        help="report the literal 1/2 u^2 restoring term instead of b/2 u^2",
    )
    sim.set_defaults(func=cmd_simulate)

    cert = sub.add_parser("certify", help="print the decay certificate for a config")
    cert.add_argument("config", help="path to a JSON problem config")
    cert.set_defaults(func=cmd_certify)

    conv = sub.add_parser("convergence", help="refinement studies against exact solutions")
    conv.add_argument("config", help="path to a JSON problem config")
    conv.add_argument(
        "--grid-n",
        default="50,100,200",
        help="comma-separated grid sizes (default 50,100,200)",
    )
    conv.add_argument("--cfl", type=float, default=0.5, help="CFL number (default 0.5)")
    conv.set_defaults(func=cmd_convergence)

    swp = sub.add_parser("sweep", help="Cartesian parameter sweep, one directory per cell")
    swp.add_argument("config", help="path to a JSON sweep config ({base, axes})")
    swp.add_argument("--jobs", type=int, default=1, help="concurrent cells (default 1)")
    swp.add_argument("--grid-n", type=int, default=200, help="grid intervals N (default 200)")
    swp.add_argument("--cfl", type=float, default=0.5, help="CFL number (default 0.5)")
    swp.add_argument("--sample-every", type=int, default=10, help="snapshot stride (default 10)")
    swp.add_argument("--outdir", default=None, help="output directory (default $MOWAVE_OUTDIR or .)")
    swp.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_VALIDATION
    except ValidationError as exc:
        _err("assumption checks failed:\n" + exc.report.summary())
        return EXIT_VALIDATION
    except BlowUpError as exc:
        _err(str(exc))
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
