"""Scenario-driven command line: JSON scenarios in, CSV/JSON artifacts out.

Exit codes: 0 success, 1 failed verification, 2 schema/usage problems,
3 numeric overflow (message carries the step index).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import bench as bench_mod
from .aap import aap_decompose, c0_test
from .acceptance import format_report
from .acceptance import run as run_criteria
from .model import seq_norms
from .scenario import (
    Scenario,
    ScenarioError,
    Tolerances,
    complex_to_pair,
    read_trajectory_csv,
    write_trajectory_csv,
)
from .seqspec import abel_test, estimate_spectrum, estimate_z_spectrum, quotient_norm
from .solver import SolverOverflow, resolvent, solve, solve_fast
from .spectral import boundedness_profile, classify, find_sigma, scan_circle
from .ztransform import (
    convolution_rule_check,
    initial_value_check,
    shift_rule_check,
    zt_kernel,
    zt_sequence,
)

__all__ = ["main"]

EXIT_VERIFY = 1
EXIT_SCHEMA = 2
EXIT_OVERFLOW = 3

# verify selectors: names forward to criterion ids
_SELECTOR_ALIASES = {
    "resolvent": [1],
    "kt": [2],
    "decay": [3],
    "transform": [4],
    "separation": [5],
    "inclusion": [6],
    "gallery": [7],
    "forced": [8],
    "fast": [9],
    "shift-bound": [10],
}


def _load_scenario(args):
    try:
        scenario = Scenario.load(args.config)
    except OSError as e:
        raise ScenarioError(str(e), args.config)
    if getattr(args, "n_steps", None) is not None:
        if args.n_steps < 0:
            raise ScenarioError("N must be nonnegative", "--n-steps")
        scenario.N = args.n_steps
    for pair in getattr(args, "tol", None) or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ScenarioError(f"expected KEY=VAL, got {pair!r}", "--tol")
        scenario.tolerances.override(key, value)
    return scenario


def _outdir(args):
    path = getattr(args, "out", None) or "."
    os.makedirs(path, exist_ok=True)
    return path


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _vector_pairs(v):
    return [complex_to_pair(z) for z in np.asarray(v).ravel()]


def cmd_simulate(args):
    scenario = _load_scenario(args)
    x = (solve_fast if args.fast else solve)(
        scenario.system, scenario.forcing, scenario.x0, scenario.N
    )
    out = _outdir(args)
    csv_path = os.path.join(out, "trajectory.csv")
    write_trajectory_csv(csv_path, x.values)
    _write_json(
        os.path.join(out, "simulate.json"),
        {
            "scenario": scenario.name or os.path.basename(args.config),
            "dim": scenario.system.dim,
            "N": scenario.N,
            "fast": bool(args.fast),
            "supNorm": float(np.max(x.norms())),
            "final": _vector_pairs(x.values[-1]),
            "trajectory": csv_path,
        },
    )
    print(f"wrote {csv_path}")
    return 0


def cmd_resolvent(args):
    scenario = _load_scenario(args)
    X = resolvent(scenario.system, scenario.N, fast=args.fast)
    out = _outdir(args)
    csv_path = os.path.join(out, "resolvent.csv")
    write_trajectory_csv(csv_path, X.values)
    norms = X.norms()
    diffs = np.linalg.norm(
        (X.values[1:] - X.values[:-1]).reshape(scenario.N, -1), axis=1
    ) if scenario.N else np.zeros(0)
    _write_json(
        os.path.join(out, "resolvent.json"),
        {
            "scenario": scenario.name or os.path.basename(args.config),
            "dim": scenario.system.dim,
            "N": scenario.N,
            "supNorm": float(np.max(norms)),
            "finalNorm": float(norms[-1]),
            "finalDifference": float(diffs[-1]) if diffs.size else 0.0,
            "resolvent": csv_path,
        },
    )
    print(f"wrote {csv_path}")
    return 0


def cmd_spectrum(args):
    scenario = _load_scenario(args)
    tol = scenario.tolerances
    grid = args.grid or 2048
    sigma = find_sigma(
        scenario.system, tol.singular_tol, tol.root_circle_tol, grid_size=grid
    )
    thetas, smin = scan_circle(scenario.system, grid_size=grid)
    out = _outdir(args)
    csv_path = os.path.join(out, "profile.csv")
    with open(csv_path, "w") as fh:
        fh.write("theta,sigma_min\n")
        for th, s in zip(thetas, smin):
            fh.write(f"{th!r},{s!r}\n")
    points = sorted(
        (
            {"angle": p.angle, "residual": p.residual, "radius": p.radius}
            for p in sigma.points
        ),
        key=lambda p: p["angle"],
    )
    _write_json(
        os.path.join(out, "spectrum.json"),
        {
            "scenario": scenario.name or os.path.basename(args.config),
            "method": sigma.method,
            "points": points,
            "profile": csv_path,
        },
    )
    print(f"{len(points)} singular point(s) via {sigma.method}")
    return 0


def _abel_payload(result):
    return {
        "angle": result.target_angle,
        "limit": result.limit,
        "passed": result.passed,
        "tol": result.tol,
        "samples": [[s, v] for s, v in result.samples],
    }


def cmd_classify(args):
    scenario = _load_scenario(args)
    tol = scenario.tolerances
    report = classify(
        scenario.system,
        N=scenario.N,
        singular_tol=tol.singular_tol,
        root_circle_tol=tol.root_circle_tol,
        abel_tol=tol.abel_tol,
        slope_tol=tol.slope_tol,
        K0=tol.K0,
        window=tol.window,
        grid_size=args.grid or 2048,
    )
    out = _outdir(args)
    _write_json(
        os.path.join(out, "classify.json"),
        {
            "scenario": scenario.name or os.path.basename(args.config),
            "verdict": report.verdict,
            "sigmaAngles": sorted(report.sigma.angles()),
            "sigmaEmpty": report.sigma_empty,
            "sigmaSubsetOne": report.sigma_subset_one,
            "resolventBounded": report.resolvent_bounded_empirical,
            "supNorm": report.sup_norm,
            "growthSlope": report.growth_slope,
            "abel": [_abel_payload(r) for _, r in sorted(report.abel_results.items())],
            "horizon": report.horizon,
            "overflowStep": report.overflow_step,
        },
    )
    print(report.verdict)
    return 0


def cmd_zt(args):
    scenario = _load_scenario(args)
    if args.radius <= 1.0:
        raise ScenarioError("evaluation radius must exceed 1", "--radius")
    x = solve(scenario.system, scenario.forcing, scenario.x0, scenario.N)
    m = args.grid or 8
    samples = []
    for k in range(m):
        z = args.radius * np.exp(2j * np.pi * k / m)
        fx = zt_sequence(x.values, z)
        bz = zt_kernel(scenario.system.kernel, z)
        shift = shift_rule_check(x.values, z)
        conv = convolution_rule_check(scenario.system.kernel, x.values, z)
        samples.append(
            {
                "z": complex_to_pair(z),
                "value": _vector_pairs(fx.value),
                "truncationBound": fx.truncation_error_bound,
                "kernelBound": bz.truncation_error_bound,
                "shiftResidual": shift.residual,
                "shiftAllowance": shift.allowance,
                "shiftPassed": shift.passed,
                "convResidual": conv.residual,
                "convAllowance": conv.allowance,
                "convPassed": conv.passed,
            }
        )
    ivc = initial_value_check(x.values)
    out = _outdir(args)
    _write_json(
        os.path.join(out, "zt.json"),
        {
            "scenario": scenario.name or os.path.basename(args.config),
            "radius": args.radius,
            "samples": samples,
            "initialValue": {
                "gaps": ivc.gaps,
                "monotone": ivc.monotone,
                "residual": ivc.residual,
                "allowance": ivc.allowance,
                "passed": ivc.passed,
            },
        },
    )
    ok = all(s["shiftPassed"] and s["convPassed"] for s in samples) and ivc.passed
    print(f"transform identities {'hold' if ok else 'FAIL'} at {m} points")
    return 0


def cmd_seqspec(args):
    scenario = _load_scenario(args)
    tol = scenario.tolerances
    x = solve(scenario.system, scenario.forcing, scenario.x0, scenario.N)
    L = x.values.shape[0]
    grid = args.grid or 64
    est = estimate_spectrum(x.values, angle_grid=grid, K0=tol.K0, window=tol.window)
    zest = estimate_z_spectrum(x.values, angle_grid=grid)
    k0 = min(tol.K0, (L - 1) // 2)
    q = quotient_norm(x.values, k0, min(L - 1, k0 + tol.window))
    abel = [
        _abel_payload(abel_test(x.values, th, K0=tol.K0, window=tol.window, tol=tol.abel_tol))
        for th in est.detected
    ]
    out = _outdir(args)
    csv_path = os.path.join(out, "scores.csv")
    with open(csv_path, "w") as fh:
        fh.write("theta,gamma,z_ratio\n")
        zscores = np.interp(est.grid, zest.grid, zest.scores, period=2 * np.pi)
        for th, g, zr in zip(est.grid, est.scores, zscores):
            fh.write(f"{th!r},{g!r},{zr!r}\n")
    _write_json(
        os.path.join(out, "seqspec.json"),
        {
            "scenario": scenario.name or os.path.basename(args.config),
            "quotientNorm": q.value,
            "window": [q.window_start, q.window_end],
            "detected": list(est.detected),
            "zDetected": list(zest.detected),
            "abel": abel,
            "scores": csv_path,
        },
    )
    print(
        f"spectrum {len(est.detected)} angle(s), "
        f"z-spectrum {len(zest.detected)} angle(s)"
    )
    return 0


def cmd_classify_trajectory(args):
    if args.csv:
        values = read_trajectory_csv(args.csv)
        tolerances = Tolerances()
        for pair in args.tol or []:
            key, sep, value = pair.partition("=")
            if not sep:
                raise ScenarioError(f"expected KEY=VAL, got {pair!r}", "--tol")
            tolerances.override(key, value)
        label = os.path.basename(args.csv)
    elif args.config:
        scenario = _load_scenario(args)
        values = solve(scenario.system, scenario.forcing, scenario.x0, scenario.N).values
        tolerances = scenario.tolerances
        label = scenario.name or os.path.basename(args.config)
    else:
        raise ScenarioError("need --config or --csv", "classify-trajectory")
    c0 = c0_test(values, tol=tolerances.c0_tol)
    dec = aap_decompose(values, tol=tolerances.aap_tol)
    bounded, slope, _ = boundedness_profile(
        seq_norms(values) if values.ndim > 1 else np.abs(values),
        slope_tol=tolerances.slope_tol,
    )
    if not bounded:
        verdict = "growing"
    elif c0.passed:
        verdict = "vanishing"
    elif dec.is_aap:
        verdict = "asymptotically-almost-periodic"
    else:
        verdict = "bounded-irregular"
    out = _outdir(args)
    _write_json(
        os.path.join(out, "classify_trajectory.json"),
        {
            "input": label,
            "verdict": verdict,
            "vanishing": c0.passed,
            "isAAP": dec.is_aap,
            "bounded": bounded,
            "growthSlope": slope,
            "frequencies": list(dec.frequencies),
            "coefficients": [_vector_pairs(c) for c in dec.coefficients],
        },
    )
    print(verdict)
    return 0


def _resolve_selectors(selectors):
    if not selectors or "all" in selectors:
        return None
    ids = []
    for sel in selectors:
        if sel.isdigit() and int(sel) in range(1, 11):
            ids.append(int(sel))
        elif sel in _SELECTOR_ALIASES:
            ids.extend(_SELECTOR_ALIASES[sel])
        else:
            raise KeyError(sel)
    return ids


def cmd_verify(args):
    try:
        ids = _resolve_selectors(args.selector)
    except KeyError as e:
        print(f"unknown selector {e.args[0]!r}", file=sys.stderr)
        return EXIT_SCHEMA
    reports = run_criteria(ids)
    for report in reports:
        print(format_report(report))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "verify.json"), {"criteria": reports})
    return 0 if all(r["passed"] for r in reports) else EXIT_VERIFY


def cmd_bench(args):
    result = bench_mod.run_bench(
        N=args.n_steps or 4096, d=args.dim, repeats=args.repeats, seed=args.seed or 7
    )
    print(bench_mod.format_table(result))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "bench.json"), result)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="volspec",
        description="simulate and analyze linear Volterra difference systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: cwd)")
    common.add_argument("--n-steps", type=int, default=None, help="override horizon N")
    common.add_argument("--grid", type=int, default=None, help="grid size override")
    common.add_argument(
        "--tol", action="append", metavar="KEY=VAL", help="tolerance override"
    )
    common.add_argument("--fast", action="store_true", help="use the FFT solver path")
    common.add_argument("--seed", type=int, default=None)

    scen = argparse.ArgumentParser(add_help=False, parents=[common])
    scen.add_argument("--config", required=True, help="scenario JSON path")

    p = sub.add_parser("simulate", parents=[scen], help="solve and dump the trajectory")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("resolvent", parents=[scen], help="operator trajectory X(n)")
    p.set_defaults(func=cmd_resolvent)
    p = sub.add_parser("spectrum", parents=[scen], help="singular set on the circle")
    p.set_defaults(func=cmd_spectrum)
    p = sub.add_parser("classify", parents=[scen], help="stability classification")
    p.set_defaults(func=cmd_classify)
    p = sub.add_parser("zt", parents=[scen], help="transform identities at sample points")
    p.add_argument("--radius", type=float, default=1.5)
    p.set_defaults(func=cmd_zt)
    p = sub.add_parser("seqspec", parents=[scen], help="solution spectrum estimates")
    p.set_defaults(func=cmd_seqspec)
    p = sub.add_parser(
        "classify-trajectory",
        parents=[common],
        help="classify a solution sequence (scenario or CSV)",
    )
    p.add_argument("--config", help="scenario JSON path")
    p.add_argument("--csv", help="trajectory CSV path")
    p.set_defaults(func=cmd_classify_trajectory)
    p = sub.add_parser("verify", parents=[common], help="run acceptance criteria")
    p.add_argument("selector", nargs="*", default=["all"])
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("bench", parents=[common], help="time naive vs fast solver")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except SolverOverflow as e:
        print(f"overflow at step {e.step}: {e}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    raise SystemExit(main())
