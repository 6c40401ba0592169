"""Command-line entry point: ``vpbwaves {riemann,ansatz,simulate,kinetic-check,fit}``.

Every command writes ``<command>.json`` (status, effective config, version,
results) and ``config.ini`` (the effective configuration) into ``--out``.
Exit codes: 0 success, 1 computational failure, 2 configuration error.
Progress and timings go to stderr so the files stay deterministic.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, parse_config, SCENARIOS
from .errors import NoSolution, ValidationError, VPBError
from .threads import ENV_VAR, configure_threads

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def write_json(path: Path, data: dict) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(_clean(data), fh, indent=2, sort_keys=False, allow_nan=False)
        fh.write("\n")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(c)) for c in r])


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _time_tag(t: float) -> str:
    return f"{t:g}".replace(".", "p")


# --------------------------------------------------------------------------- commands

def cmd_riemann(cfg: RunConfig, out: Path) -> dict:
    from .eos_riemann import solve_star_states, wave_strengths
    from .wave_profiles import c0_constant, contact_selfsimilar_solve, region_speeds

    ends = cfg.ends
    stars = solve_star_states(ends)
    cd = contact_selfsimilar_solve(stars.theta_minus_star, stars.theta_plus_star, stars.p_star,
                                   cfg.transport, cfg.ansatz.contact_half_width,
                                   cfg.ansatz.contact_points, u_star=stars.u_star)
    lm, lp = region_speeds(stars)
    return {
        "stars": {"v_minus_star": stars.v_minus_star, "v_plus_star": stars.v_plus_star,
                  "u_star": stars.u_star, "theta_minus_star": stars.theta_minus_star,
                  "theta_plus_star": stars.theta_plus_star, "p_star": stars.p_star,
                  "iterations": stars.iterations},
        "strengths": wave_strengths(ends, stars),
        "region_speeds": {"lambda_minus_star": lm, "lambda_plus_star": lp},
        "contact_constants": {"c1": cd.c1_est, "c2": cd.c2_est},
        "c0": c0_constant(stars, cd.c1_est),
    }


def cmd_ansatz(cfg: RunConfig, out: Path) -> dict:
    from .diagnostics import decay_fit
    from .wave_profiles import build_composite, composite_eval, composite_residuals

    a = cfg.ansatz
    wave = build_composite(cfg.ends, cfg.transport, L=a.contact_half_width, n=a.contact_points)
    x = np.linspace(-a.half_width, a.half_width, a.points)
    tables = []
    for t in a.times:
        S = composite_eval(wave, x, t)
        name = f"ansatz_t{_time_tag(t)}.csv"
        write_csv(out / name, ["x", "v", "u1", "theta"], zip(x, S.v, S.u, S.theta))
        tables.append(name)
    wave.contact.to_csv(out / "contact_profile.csv")

    times = np.geomspace(max(a.fit_t_min, 1e-3), a.fit_t_max, a.fit_points)
    rows = []
    for t in times:
        xr = np.linspace(-10.0, 10.0, a.points) * np.sqrt(1.0 + t)
        R = composite_residuals(wave, xr, float(t))
        rows.append((t, np.abs(R.contact_R1).max(), np.abs(R.contact_R2).max(),
                     np.abs(R.mass).max(), np.abs(R.momentum).max(), np.abs(R.energy).max()))
    write_csv(out / "residual_decay.csv",
              ["t", "max_R1", "max_R2", "max_mass", "max_momentum", "max_energy"], rows)
    arr = np.array(rows)
    fits = {}
    for k, name in ((1, "R1"), (2, "R2")):
        if np.all(arr[:, k] > 0):
            f = decay_fit(arr[:, [0, k]])
            fits[name] = {"exponent": f.exponent, "halfwidth": f.halfwidth, "points": f.n}
    far = {}
    for t in a.times:
        S = composite_eval(wave, np.array([-a.half_width, a.half_width]), t)
        L, R = cfg.ends.left, cfg.ends.right
        far[_time_tag(t)] = {
            "left": float(np.abs([S.v[0] - L.v, S.u[0] - L.u1, S.theta[0] - L.theta]).max()),
            "right": float(np.abs([S.v[1] - R.v, S.u[1] - R.u1, S.theta[1] - R.theta]).max())}
    return {"tables": tables, "contact_profile": "contact_profile.csv",
            "residual_table": "residual_decay.csv", "fits": fits,
            "max_mass_residual": float(arr[:, 3].max()), "far_field_mismatch": far,
            "strengths": wave.strengths,
            "contact_constants": {"c1": wave.contact.c1_est, "c2": wave.contact.c2_est}}


def cmd_simulate(cfg: RunConfig, out: Path) -> dict:
    from .diagnostics import records_to_csv, stability_criteria
    from .fluid_solver import run, snapshot_csv
    from .wave_profiles import build_composite

    wave = build_composite(cfg.ends, cfg.transport, L=cfg.ansatz.contact_half_width,
                           n=cfg.ansatz.contact_points)
    t0 = time.perf_counter()
    every = max(1, int(round(10.0 / cfg.solver.output_every)))
    counter = {"n": 0}

    def progress(rec):
        counter["n"] += 1
        if counter["n"] % every == 0:
            _log(f"  t={rec.t:8.2f}  |pert|_inf={rec.linf_pert:.3e}  "
                 f"|charge|_inf={rec.linf_charge:.3e}  ({time.perf_counter() - t0:.0f}s)")

    try:
        res = run(cfg.solver, wave, cfg.perturbation, progress=progress)
    except VPBError as exc:
        last = getattr(exc, "last_good", None)
        if last is not None:
            path = out / "snapshot_last_good.csv"
            snapshot_csv(last[1], last[2], path)
            exc.snapshot = str(path)
            exc.snapshot_time = last[0]
        raise
    records_to_csv(res.records, out / "diagnostics.csv")
    snaps = []
    for t, (f, c) in sorted(res.snapshots.items()):
        name = f"snapshot_t{_time_tag(t)}.csv"
        snapshot_csv(f, c, out / name)
        snaps.append(name)
    crit = stability_criteria(res.records) if len(res.records) > 1 else {}
    return {"diagnostics": "diagnostics.csv", "snapshots": snaps, "steps": res.steps,
            "final_time": res.t, "records": len(res.records), "criteria": crit,
            "all_criteria_passed": bool(crit) and all(c["passed"] for c in crit.values()),
            "strengths": wave.strengths}


def cmd_kinetic_check(cfg: RunConfig, out: Path) -> dict:
    from .kinetic_core import MaxwellParams, hermite_grid, maxwellian, moments, run_suite

    k = cfg.kinetic
    # sanity of the configured single state before the expensive suite
    p = MaxwellParams(k.rho, (k.u, 0.0, 0.0), k.theta)
    m = moments(maxwellian(p, hermite_grid(p, k.hermite_order)))
    sanity = max(abs(m.rho - p.rho), abs(m.u[0] - k.u), abs(m.theta - p.theta))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results = run_suite(cfg.seed, hermite_order=k.hermite_order,
                            conservation_grid=k.conservation_grid,
                            conservation_pairs=k.conservation_pairs, refinement=k.refinement,
                            linear_grid=k.linear_grid, samples=k.samples,
                            inverse_samples=k.inverse_samples,
                            progress=lambda r: _log(f"  {r.name}: {r.value:.3e} (bound {r.bound:.0e}) "
                                                    f"{'pass' if r.passed else 'FAIL'} "
                                                    f"[{r.seconds:.1f}s]"))
    warn = [str(w.message) for w in caught if issubclass(w.category, UserWarning)]
    for w in warn:
        _log(f"warning: {w}")
    checks = {}
    for r in results:
        d = r.as_dict()
        d.pop("seconds")
        checks[r.name] = d
    return {"state_moment_error": sanity, "checks": checks, "warnings": warn,
            "all_passed": all(r.passed for r in results)}


def cmd_fit(cfg: RunConfig, out: Path, base: Path) -> dict:
    from .diagnostics import decay_fit

    f = cfg.fit
    src = Path(f.input)
    if not src.is_absolute():
        src = base / src
    if not src.is_file():
        raise ValidationError(f"fit input {str(src)!r} does not exist")
    with open(src, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "t" not in rows[0]:
        raise ValidationError("fit input needs a header row with a 't' column")
    fits = {}
    for col in f.columns:
        if col not in rows[0]:
            raise ValidationError(f"fit input has no column {col!r}")
        series = np.array([(float(r["t"]), float(r[col])) for r in rows])
        d = decay_fit(series, (f.t_min, f.t_max))
        fits[col] = {"exponent": d.exponent, "halfwidth": d.halfwidth, "points": d.n}
    return {"input": str(f.input), "window": [f.t_min, f.t_max], "fits": fits}


# --------------------------------------------------------------------------- driver

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vpbwaves",
        description="Composite-wave laboratory: Riemann star states, wave ansatz, "
                    "perturbation runs and velocity-space checks.",
        epilog=f"Thread count for compiled kernels: environment variable {ENV_VAR}. "
               "Exit codes: 0 ok, 1 computational failure, 2 configuration error.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {"riemann": "star states, wave strengths and region constants",
             "ansatz": "profile tables and residual decay of the composite ansatz",
             "simulate": "perturbation run of the fluid/Poisson system",
             "kinetic-check": "invariant suite for the collision operators",
             "fit": "log-log decay fits on a diagnostics CSV"}
    for name in SCENARIOS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", type=Path, help="configuration file (INI-style)")
        p.add_argument("--out", type=Path, default=Path("vpbwaves_out"),
                       help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=None, help="overrides [run] seed")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    out: Path = args.out
    summary = {"command": args.command, "version": __version__}
    try:
        configure_threads()
        cfg = parse_config(args.config) if args.config is not None else RunConfig()
        cfg = cfg.with_scenario(args.command)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.command in ("riemann", "ansatz", "simulate"):
            cfg.ends  # noqa: B018 - validates presence before any computation
    except ValidationError as exc:
        _log(f"configuration error: {exc}")
        return EXIT_CONFIG
    out.mkdir(parents=True, exist_ok=True)
    summary.update(seed=cfg.seed, config=cfg.to_dict())
    (out / "config.ini").write_text(cfg.to_text())
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        if args.command == "riemann":
            results = cmd_riemann(cfg, out)
        elif args.command == "ansatz":
            results = cmd_ansatz(cfg, out)
        elif args.command == "simulate":
            results = cmd_simulate(cfg, out)
        elif args.command == "kinetic-check":
            results = cmd_kinetic_check(cfg, out)
        else:
            base = args.config.parent if args.config is not None else Path.cwd()
            results = cmd_fit(cfg, out, base)
        summary.update(status="ok", results=results)
    except ValidationError as exc:
        summary.update(status="config_error", error={"type": type(exc).__name__, "message": str(exc)})
        code = EXIT_CONFIG
    except (VPBError, ArithmeticError, RuntimeError, ValueError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, NoSolution):
            err["diagnosis"] = exc.diagnosis
        if getattr(exc, "snapshot", None):
            err["snapshot"] = Path(exc.snapshot).name
            err["snapshot_time"] = getattr(exc, "snapshot_time", None)
        summary.update(status="failed", error=err)
        code = EXIT_FAILURE
    write_json(out / f"{args.command}.json", summary)
    if code != EXIT_OK:
        _log(f"{args.command} failed: {summary['error']['type']}: {summary['error']['message']}")
    _log(f"{args.command}: {summary['status']} in {time.perf_counter() - t0:.1f}s -> {out}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
