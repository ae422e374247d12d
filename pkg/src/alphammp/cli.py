"""Command-line front end: configuration, orchestration, artifact emission.

This is the only module with I/O side effects.  Structured results go out
as JSON with rationals rendered "p/q"; numeric series go out as CSV with
deterministic decimal strings.  Every --emit write is accompanied by a
manifest (<path>.manifest.json) recording the command, config hash, input
and output paths, tool version, and timestamp; re-running a manifest's
command reproduces the symbolic artifacts byte for byte (the manifest's
own timestamp is the one exception).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .alpha import alpha_on_curve, best_curve, verify_report
from .lab import (
    estimate_alpha_point,
    estimate_alpha_sequence,
)
from .lattice import (
    MINUS_ONE_COUNTS,
    DivisorClass,
    build_surface,
    enumerate_minus_one_classes,
    surface_to_json,
)
from .mmp import contract, pushforward, run_mmp, strict_transform_class
from .points import BranchData, PointRecord
from .rationals import frac_to_decimal_str, format_rational, parse_rational
from .targets import ProjectivePoint, TargetPoint, convergents


class CliError(Exception):
    def __init__(self, kind: str, message: str, **extra):
        super().__init__(message)
        self.payload = {"error": {"type": kind, "message": message, **extra}}


PRESETS = {
    "sqrt2": {
        "mode": "sequence",
        "target": {"kind": "sqrt", "n": 2},
        "points": "convergents",
        "count": 50,
        "degree": 1,
        "window": 25,
    },
    "rational": {
        "mode": "point",
        "target": {"kind": "rational", "value": "2/1"},
        "height_bound": 100000,
        "degree": 1,
    },
    "liouville": {
        "mode": "sequence",
        "target": {"kind": "liouville"},
        "points": "partial_sums",
        "count": 5,
        "degree": 1,
        "window": 25,
    },
}


def _load_config(path: str) -> tuple[dict, bytes]:
    p = Path(path)
    if not p.is_file():
        raise CliError("config", f"config file not found: {path}")
    raw = p.read_bytes()
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as e:
        raise CliError(
            "config",
            f"{path}:{e.lineno}:{e.colno}: {e.msg}",
            line=e.lineno,
            column=e.colno,
        )
    if not isinstance(cfg, dict):
        raise CliError("config", f"{path}: top-level JSON object expected")
    return cfg, raw


def _require(cfg: dict, key: str, path: str) -> object:
    if key not in cfg:
        raise CliError("config", f"{path}: missing required key {key!r}")
    return cfg[key]


def _surface_from(cfg: dict, path: str):
    descriptor = cfg.get("surface", cfg)
    if not isinstance(descriptor, dict) or "model" not in descriptor:
        raise CliError("config", f"{path}: need a surface descriptor with a 'model' key")
    try:
        return build_surface(descriptor)
    except (ValueError, TypeError) as e:
        raise CliError("surface", f"{path}: {e}")


def _point_from(cfg: dict, path: str):
    if "point" not in cfg:
        return None
    try:
        return PointRecord.from_json(cfg["point"])
    except (ValueError, TypeError, KeyError) as e:
        raise CliError("config", f"{path}: bad point record: {e}")


def _emit_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(emit: str, argv: list[str], config_path: str,
                    config_bytes: bytes, outputs: list[str]) -> None:
    manifest = {
        "command": argv,
        "config_hash": "sha256:" + hashlib.sha256(config_bytes).hexdigest(),
        "input_paths": [config_path],
        "output_paths": outputs,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    Path(emit + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _dec(q: Fraction, sig: int = 6) -> str:
    return frac_to_decimal_str(q, sig)


def _iv_out(iv) -> list[str]:
    return [
        frac_to_decimal_str(iv.lo, rounding="floor"),
        frac_to_decimal_str(iv.hi, rounding="ceil"),
    ]


def _cls(c: DivisorClass) -> str:
    return "(" + ", ".join(format_rational(q) for q in c.coeffs) + ")"


# -- subcommands ---------------------------------------------------------------


def cmd_surface(args, argv) -> int:
    cfg, raw = _load_config(args.config)
    model = _surface_from(cfg, args.config)
    print(f"surface: {model.tag}")
    print(f"  rank rho = {model.rank}")
    print(f"  K^2 = {format_rational(model.k_squared)}")
    if model.kind in ("p2", "blowup_p2"):
        count = len(enumerate_minus_one_classes(model))
        print(f"  (-1)-classes: {count}")
    else:
        print("  (-1)-classes: n/a for this model kind")
    if args.emit:
        _emit_json(args.emit, surface_to_json(model))
        _write_manifest(args.emit, argv, args.config, raw, [args.emit])
        print(f"wrote {args.emit}")
    return 0


def cmd_mmp(args, argv) -> int:
    cfg, raw = _load_config(args.config)
    model = _surface_from(cfg, args.config)
    ample = DivisorClass.from_json(_require(cfg, "ample", args.config))
    point = _point_from(cfg, args.config)
    boundary = bool(args.boundary) or bool(cfg.get("boundary", False))
    if args.strict:
        boundary = False
    try:
        trace = run_mmp(model, ample, point, boundary_mode=boundary)
    except ValueError as e:
        raise CliError("mmp", str(e))
    print(f"mmp: {model.tag}, mode = {'boundary' if boundary else 'strict'}")
    print(f"  rescale factor y* = {format_rational(trace.rescale_factor)}")
    print(f"  steps: {len(trace.steps)}")
    for i, step in enumerate(trace.steps):
        print(f"    {i}: contract {_cls(step.contracted_class)} -> {step.target.tag}")
    ep = trace.endpoint
    line = f"  endpoint: {ep.tag}"
    if ep.fiber_class is not None:
        line += f", fiber {_cls(ep.fiber_class)}"
    print(line)
    print(f"  stop reason: {trace.stop_reason}")
    if args.emit:
        _emit_json(args.emit, trace.to_json())
        _write_manifest(args.emit, argv, args.config, raw, [args.emit])
        print(f"wrote {args.emit}")
    return 0


def cmd_best_curve(args, argv) -> int:
    cfg, raw = _load_config(args.config)
    model = _surface_from(cfg, args.config)
    ample = DivisorClass.from_json(_require(cfg, "ample", args.config))
    point = _point_from(cfg, args.config)
    if point is None:
        raise CliError("config", f"{args.config}: best-curve needs a 'point' record")
    try:
        report = best_curve(model, ample, point)
    except ValueError as e:
        raise CliError("best-curve", str(e))

    print(f"best curve on {model.tag} (case {report.case_tag}, end level {report.end_level})")
    print(f"  class on X: {_cls(report.curve_class_on_x)}")
    print(f"  class at end: {_cls(report.curve_class_end)}")
    print(f"  alpha (A as given) = {report.alpha_value.format()}")
    print(f"  alpha (A' = y*A, y* = {format_rational(report.rescale_factor)})"
          f" = {report.alpha_rescaled.format()}")
    print(f"  essential lower bound: {report.essential_bound.format()}"
          f" ({report.essential_diagnostic})")
    print(f"  branch data: {report.branch_source}")
    print("  certificate:")
    width = max(len(e.name) for e in report.certificate)
    for e in report.certificate:
        print(f"    {e.name.ljust(width)}  {format_rational(e.lhs):>8} "
              f"{e.relation} {format_rational(e.rhs):<8} "
              f"{'ok' if e.holds else 'FAIL'}")

    verified = all(e.holds for e in report.certificate) and verify_report(report)
    if args.emit:
        _emit_json(args.emit, report.to_json())
        _write_manifest(args.emit, argv, args.config, raw, [args.emit])
        print(f"wrote {args.emit}")
    if not verified:
        raise CliError("certificate", "certificate failed independent re-verification")
    print("certificate re-verified: ok")
    return 0


def _sequence_points(cfg: dict, target: TargetPoint, count: int, path: str):
    spec = cfg.get("points", "convergents")
    if isinstance(spec, list):
        return [ProjectivePoint(tuple(int(parse_rational(c)) for c in row)) for row in spec]
    if spec == "convergents":
        return convergents(target, count)
    if spec == "partial_sums":
        base = int(cfg.get("target", {}).get("base", 10))
        pts = []
        s = Fraction(0)
        fact = 1
        for n in range(1, count + 1):
            s += Fraction(1, base**fact)
            pts.append(ProjectivePoint((s.numerator, s.denominator)))
            fact *= n + 1
        return pts
    raise CliError("config", f"{path}: unknown points spec {spec!r}")


def cmd_estimate(args, argv) -> int:
    cfg, raw = _load_config(args.config)
    if "preset" in cfg:
        name = cfg["preset"]
        if name not in PRESETS:
            raise CliError("config", f"{args.config}: unknown preset {name!r} "
                                     f"(have {sorted(PRESETS)})")
        merged = dict(PRESETS[name])
        merged.update({k: v for k, v in cfg.items() if k != "preset"})
        cfg = merged
    mode = _require(cfg, "mode", args.config)
    target = TargetPoint.from_config(_require(cfg, "target", args.config))
    degree = int(cfg.get("degree", 1))
    t0 = time.time()

    if mode == "sequence":
        count = int(cfg.get("count", 25))
        window = args.window if args.window is not None else int(cfg.get("window", 25))
        pts = _sequence_points(cfg, target, count, args.config)
        try:
            est = estimate_alpha_sequence(target, pts, degree, window)
        except ValueError as e:
            raise CliError("estimate", str(e))
        gammas = [s.gamma for s in est.samples if s.gamma is not None]
        summary = {
            "mode": "sequence",
            "target": target.describe(),
            "samples": len(est.samples),
            "window": est.window,
            "converged": est.converged,
            "verdict": est.verdict,
            "alpha_hat": "inf" if est.alpha_hat is None else _iv_out(est.alpha_hat),
            "min_gamma": None if not gammas else [
                frac_to_decimal_str(min(g.lo for g in gammas), rounding="floor"),
                frac_to_decimal_str(min(g.hi for g in gammas), rounding="ceil"),
            ],
            "elapsed_s": round(time.time() - t0, 3),
        }
        if est.alpha_hat is None:
            print(f"estimate: {target.describe()}: nonconvergent, alpha_hat = inf")
        else:
            print(f"estimate: {target.describe()}: alpha_hat ~ {_dec(est.alpha_hat.mid)} "
                  f"in [{_dec(est.alpha_hat.lo)}, {_dec(est.alpha_hat.hi)}] "
                  f"(window max, last {min(est.window, len(est.samples))} of {len(est.samples)})")
        csv_lines = est.csv_lines()
    elif mode == "point":
        bound = args.height_bound if args.height_bound is not None else int(
            cfg.get("height_bound", 1000))
        kwargs = {}
        if args.precision is not None:
            kwargs["enclosure_bits"] = args.precision
        try:
            est = estimate_alpha_point(target, bound, degree, **kwargs)
        except ValueError as e:
            raise CliError("estimate", str(e))
        summary = {
            "mode": "point",
            "target": target.describe(),
            "height_bound": bound,
            "scanned": est.scanned,
            "bins": len(est.bins),
            "verdict": est.verdict,
            "trend": None if est.trend is None else _iv_out(est.trend),
            "elapsed_s": round(time.time() - t0, 3),
        }
        if est.trend is None:
            print(f"estimate: {target.describe()}: insufficient depth for a trend "
                  f"(bins: {len(est.bins)})")
        else:
            print(f"estimate: {target.describe()}: trend ~ {_dec(est.trend_mid)} "
                  f"in [{_dec(est.trend.lo)}, {_dec(est.trend.hi)}] "
                  f"over {len(est.bins)} bins, {est.scanned} candidates scanned")
        csv_lines = est.csv_lines()
    else:
        raise CliError("config", f"{args.config}: mode must be 'sequence' or 'point'")

    print(json.dumps(summary, indent=2, sort_keys=True))
    if args.emit:
        Path(args.emit).write_text("\n".join(csv_lines) + "\n")
        summary_path = args.emit + ".summary.json"
        _emit_json(summary_path, summary)
        _write_manifest(args.emit, argv, args.config, raw, [args.emit, summary_path])
        print(f"wrote {args.emit}")
    return 0


def cmd_selftest(args, argv) -> int:
    rng = random.Random(args.seed if args.seed is not None else 20240817)
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"  {'ok  ' if ok else 'FAIL'} {name}")
        failures += 0 if ok else 1

    print("selftest:")

    counts = {}
    for r in range(0, 9):
        model = build_surface({"model": "blowup_p2", "r": r} if r else {"model": "p2"})
        counts[r] = len(enumerate_minus_one_classes(model))
    check("(-1)-class census r = 0..8", counts == dict(MINUS_ONE_COUNTS))

    ok = True
    for _ in range(60):
        r = rng.randint(1, 8)
        model = build_surface({"model": "blowup_p2", "r": r})
        c = rng.choice(model.neg_curves)
        step = contract(model, c)
        ok &= step.target.rank == model.rank - 1
        ok &= step.target.k_squared == model.k_squared + 1
        ok &= pushforward(step, c).is_zero
        probe = DivisorClass([rng.randint(-2, 3) for _ in range(step.target.rank)])
        ok &= strict_transform_class(step, probe, 0) is not None
    check("random contraction invariants (60 draws)", ok)

    ok = True
    for _ in range(200):
        pairs = tuple((rng.randint(0, 2), rng.randint(1, 4)) for _ in range(rng.randint(1, 3)))
        b = BranchData(pairs)
        d = Fraction(rng.randint(0, 9), rng.randint(1, 9))
        a = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        lhs = alpha_on_curve(a * d, b)
        rhs = alpha_on_curve(d, b).scale(a)
        ok &= lhs == rhs
    check("alpha scaling identity (200 draws)", ok)

    s2 = TargetPoint.sqrt(2)
    est = estimate_alpha_sequence(s2, convergents(s2, 15), 1, 10)
    check("sqrt(2) window estimate in [0.40, 0.60]",
          est.alpha_hat is not None
          and Fraction(40, 100) <= est.alpha_hat.mid <= Fraction(60, 100))

    model = build_surface({"model": "blowup_p2", "r": 1})
    a = DivisorClass((2, -1))
    pt = PointRecord(incidences=(), essentially_bounded=True)
    report = best_curve(model, a, pt)
    check("worked example certificate re-verifies",
          all(e.holds for e in report.certificate) and verify_report(report))

    print(f"selftest: {'all ok' if failures == 0 else f'{failures} failure(s)'}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="alphammp",
        description="Exact approximation-constant toolkit for rational surfaces",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--emit", help="write the structured artifact to this path")

    p = sub.add_parser("surface", help="build and validate a surface model")
    common(p)

    p = sub.add_parser("mmp", help="run the adjoint contraction loop")
    common(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--boundary", action="store_true",
                      help="also contract rays on the D = K + A' boundary")
    mode.add_argument("--strict", action="store_true",
                      help="only contract rays with D-pairing strictly negative (default)")

    p = sub.add_parser("best-curve", help="certified best-approximation curve")
    common(p)

    p = sub.add_parser("estimate", help="numerical exponent estimation")
    common(p)
    p.add_argument("--height-bound", type=int, help="override the config height bound")
    p.add_argument("--window", type=int, help="override the config window size")
    p.add_argument("--precision", type=int, help="target enclosure bits")

    p = sub.add_parser("selftest", help="run the built-in invariant suites")
    p.add_argument("--seed", type=int, help="seed for the randomized suites")

    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    handler = {
        "surface": cmd_surface,
        "mmp": cmd_mmp,
        "best-curve": cmd_best_curve,
        "estimate": cmd_estimate,
        "selftest": cmd_selftest,
    }[args.command]
    try:
        return handler(args, ["alphammp"] + argv)
    except CliError as e:
        print(json.dumps(e.payload, indent=2, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
