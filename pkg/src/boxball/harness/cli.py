"""Command-line entry point: ``boxball <command> [options]``.

Exit codes: 0 success or all checks passed, 1 a check failed, 2 usage error
(bad arguments, malformed spec, undefined dynamics).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .. import continuum, exactdist, lattice, samplers, solitons, toda
from ..lattice import BinaryConfiguration, ConfigurationError
from . import records, render, scenarios


class UsageError(Exception):
    pass


def _load_spec(text: str | None, default: dict | None = None) -> dict:
    if text is None:
        if default is None:
            raise UsageError("--spec is required")
        return dict(default)
    candidate = Path(text)
    try:
        if not text.lstrip().startswith("{") and candidate.is_file():
            text = candidate.read_text(encoding="utf-8")
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read spec: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("spec must be a JSON object")
    return data


def _window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"window must be 'a,b', got {text!r}") from exc
    return a, b


def _emit(args, command: str, spec: dict, outputs: dict, passed: bool | None = None) -> None:
    rec = records.RunRecord(command, args.seed, spec, outputs, passed)
    if args.timestamps:
        rec.timestamps = {"finished": records.now()}
    records.RecordWriter(args.out).write(rec)


def _write_doc(args, text: str, suffix: str) -> None:
    """Rendered output goes to stdout unless ``--out`` names a file; then beside it."""
    if args.out:
        Path(args.out).with_suffix(suffix).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --------------------------------------------------------------------------
# commands


def cmd_evolve(args) -> int:
    if args.config is not None:
        config = BinaryConfiguration.from_string(args.config, lattice.CYCLIC if args.cyclic else lattice.FINITE)
        spec = {"config": args.config, "cyclic": bool(args.cyclic)}
    else:
        spec = _load_spec(args.spec)
        measure = samplers.as_gibbs(samplers.spec_from_dict(spec))
        x = samplers.sample_gibbs_periodic(measure, seed=args.seed, size=1)[0]
        config = BinaryConfiguration.cyclic(x)
    rows = lattice.evolve(config, args.steps)
    outputs = {"rows": [r.to_string() for r in rows]}
    if config.boundary == lattice.CYCLIC:
        profiles = [solitons.soliton_counts(r).to_list() for r in rows]
        outputs["profile"] = profiles[0]
        outputs["profile_conserved"] = all(p == profiles[0] for p in profiles)
    if args.render == "text":
        _write_doc(args, render.render_rows(rows), ".txt")
    elif args.render == "svg":
        _write_doc(args, _evolution_svg(rows), ".svg")
    _emit(args, "evolve", spec, outputs)
    return 0


def _evolution_svg(rows) -> str:
    policy = lattice.CYCLIC if rows[0].boundary == lattice.CYCLIC else lattice.FINITE
    paths = []
    for r in rows:
        p = lattice.encode_path(r)
        paths.append((np.arange(p.first, p.last + 1), np.asarray(p.values)))
    first = lattice.encode_path(rows[0])
    m = lattice.running_max(first, policy)
    overlay = [(np.arange(first.first, first.last + 1), m)]
    return render.render_path_svg(paths, overlay)


def _run_one(job) -> tuple[str, list[dict]]:
    name, seed, overrides, broken = job
    return name, [c.to_dict() for c in scenarios.run_suite(name, seed, overrides, broken)]


def cmd_verify(args) -> int:
    names = sorted(scenarios.SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in scenarios.SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from {sorted(scenarios.SUITES)} or 'all'")
        if args.broken and name not in scenarios.STEPPABLE:
            raise UsageError(f"suite {name!r} has no step function to break; "
                             f"use one of {sorted(scenarios.STEPPABLE)}")
    overrides = _load_spec(args.spec, {})
    if args.tolerance is not None:
        overrides["tolerance"] = args.tolerance
    jobs = [(n, args.seed, overrides, args.broken) for n in names]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    ok = True
    for name, checks in results:
        passed = all(c["passed"] for c in checks)
        ok &= passed
        if args.render != "none":
            for c in checks:
                detail = ", ".join(f"{k}={v}" for k, v in c["stats"].items())
                print(f"{'PASS' if c['passed'] else 'FAIL'} {name}/{c['name']} ({detail})", file=sys.stderr)
        _emit(args, "verify", {"suite": name, "overrides": overrides, "broken": args.broken},
              {"checks": checks}, passed)
    return 0 if ok else 1


def cmd_sample(args) -> int:
    spec = _load_spec(args.spec)
    measure = samplers.spec_from_dict(spec)
    if isinstance(measure, (samplers.Bernoulli, samplers.Markov, samplers.BoundedSoliton)):
        a, b = (int(v) for v in _window(args.window))
        if isinstance(measure, samplers.Bernoulli):
            s = samplers.sample_iid(measure.p, (a, b), args.seed, args.size)
        elif isinstance(measure, samplers.Markov):
            s = samplers.sample_markov(measure.p0, measure.p1, (a, b), args.seed, args.size,
                                       args.tolerance or samplers.DEFAULT_TOLERANCE)
        else:
            s = samplers.sample_bounded(measure.p, measure.K, (a, b), args.seed, args.size)
        outputs = {"window": [a, b], "samples": ["".join(map(str, r)) for r in s.eta],
                   "carrier_before_window": s.carrier[:, 0].tolist(),
                   "certificate": float(np.max(s.certificate))}
    else:
        x = samplers.sample_gibbs_periodic(measure, seed=args.seed, size=args.size, mode=args.mode)
        outputs = {"samples": ["".join(map(str, r)) for r in x]}
    if args.render == "text":
        rows = [BinaryConfiguration.from_string(w) for w in outputs["samples"]]
        _write_doc(args, render.render_rows(rows), ".txt")
    _emit(args, "sample", spec, outputs)
    return 0


def cmd_exact(args) -> int:
    spec = _load_spec(args.spec)
    measure = samplers.spec_from_dict(spec)
    if args.M is None:
        table = exactdist.enumerate_gibbs(samplers.as_gibbs(measure))
        outputs = table.to_record()
        pushed = exactdist.pushforward_T(table)
        outputs["tv_to_pushforward"] = exactdist.tv_distance(table, pushed)
    else:
        outputs = {"M": args.M, "window_law": exactdist.window_marginal_periodic(measure, args.M).to_record()}
    _emit(args, "exact", spec, outputs)
    return 0


def cmd_limits(args) -> int:
    defaults = scenarios.load_defaults()["limits"]
    spec = _load_spec(args.spec)
    family = spec.get("family")
    if family not in ("iid", "markov", "bounded"):
        raise UsageError("limits spec needs family in {iid, markov, bounded} and its params")
    params = spec.get("params", {})
    M = int(spec.get("M", defaults["M"]))
    grid = [int(n) for n in spec.get("grid", defaults["grid"])]
    report = exactdist.limit_convergence_report(family, params, M, grid)
    tol = args.tolerance if args.tolerance is not None else defaults["tolerance"]
    passed = bool(report["decreasing"] and report["final_tv"] < tol)
    if args.render == "text":
        for row in report["rows"]:
            print(f"N={row['N']:>6}  TV={row['tv']:.3e}", file=sys.stderr)
    _emit(args, "limits", spec, report, passed)
    return 0 if passed else 1


def cmd_toda(args) -> int:
    spec = _load_spec(args.spec)
    state = toda.TodaState.from_dict(spec)
    orbit = toda.iterate(state, args.steps)
    via_path = [toda.toda_step_via_path(s) for s in orbit[:-1]]
    agree = all(v.Q == n.Q and v.E == n.E for v, n in zip(via_path, orbit[1:]))
    outputs = {"orbit": [s.to_dict() for s in orbit], "path_route_agrees": agree,
               "invariants": toda.toda_invariants(orbit[-1])}
    if args.render == "svg":
        paths = [toda.toda_encode_path(s) for s in orbit]
        _write_doc(args, render.render_path_svg([(p.times, p.values) for p in paths]), ".svg")
    _emit(args, "toda", spec, outputs)
    return 0 if agree else 1


def cmd_continuum(args) -> int:
    spec = _load_spec(args.spec, {"lambda0": 1.0, "lambda1": 2.0})
    zz = continuum.ZigzagSpec(float(spec["lambda0"]), float(spec["lambda1"]))
    a, b = _window(args.window)
    sample = continuum.sample_zigzag(zz, (a, b), args.seed, args.tolerance or 1e-9)
    ts = sample.transformed().restrict(a, b)
    outputs = {"path": sample.path.to_dict(), "past_max": float(sample.past_max),
               "certificate": float(sample.certificate), "transformed": ts.to_dict()}
    if args.render == "svg":
        m = continuum.pl_running_max(sample.path, sample.past_max)
        doc = render.render_path_svg([(sample.path.times, sample.path.values)],
                                     [(m.times, m.values)])
        _write_doc(args, doc, ".svg")
    _emit(args, "continuum", spec, outputs)
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--spec", help="JSON object, inline or a file path")
    common.add_argument("--steps", type=int, default=1)
    common.add_argument("--render", choices=("text", "svg", "none"), default="none")
    common.add_argument("--out", help="append JSONL records here (renderings go beside it)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--timestamps", action="store_true",
                        help="stamp records with the wall clock (breaks byte-identical replay)")

    parser = argparse.ArgumentParser(prog="boxball", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", parents=[common], help="evolve a configuration under T")
    p.add_argument("--config", help="0/1 string, '|' precedes site 1")
    p.add_argument("--cyclic", action="store_true")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", help="suite name or 'all'")
    p.add_argument("--broken", action="store_true", help="negative control with a broken step")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", parents=[common], help="sample from a measure spec")
    p.add_argument("--window", default="1,20")
    p.add_argument("--size", type=int, default=1)
    p.add_argument("--mode", choices=("auto", "exact", "mcmc"), default="auto")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("exact", parents=[common], help="exact law of a periodic measure")
    p.add_argument("--M", type=int, help="window length (default: full enumeration)")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("limits", parents=[common], help="finite-volume to infinite-volume convergence")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("toda", parents=[common], help="iterate the ultra-discrete Toda lattice")
    p.set_defaults(func=cmd_toda)

    p = sub.add_parser("continuum", parents=[common], help="sample a zigzag path and its transform")
    p.add_argument("--window", default="-5,5")
    p.set_defaults(func=cmd_continuum)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.steps < 0 or args.workers < 1:
        print("boxball: --steps must be >= 0 and --workers >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, ConfigurationError, samplers.SamplerError, exactdist.DistributionError,
            KeyError, ValueError) as exc:
        print(f"boxball {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
