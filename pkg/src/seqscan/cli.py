"""Command-line interface: ``seqscan <subcommand> ...``.

Errors exit with status 2 and a single JSON object on stderr,
``{"error": <code>, "message": <text>}``.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, _backend
from .config import build_detector, load_config
from .errors import ConfigError, MalformedEventError, SeqScanError
from .ingest import SessionStore, parse_event
from .maxobs import solve_max_obs
from .montecarlo import simulate
from .oc_eval import asn_ratio_curve, reports_to_csv, risk_curve
from .stats_core import TestSpec, TunedParams
from .triple import regions_to_csv, triple_risk_curve
from .trwa import TrwaParams, evaluate_trwa, trwa_plan
from .tuner import minimax_tune


def parse_grid(text: str):
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"--pgrid must be lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise ConfigError(f"bad --pgrid {text!r}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = [round(lo + i * step, 12) for i in range(count)]
    if grid[0] <= 0.0 or grid[-1] >= 1.0:
        raise ConfigError("--pgrid values must lie strictly inside (0, 1)")
    return grid


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _overrides(args) -> dict:
    pairs = {
        ("detector", "kind"): getattr(args, "detector", None),
        ("detector", "kmax"): getattr(args, "kmax", None),
        ("spec", "p0"): getattr(args, "p0", None),
        ("spec", "p1"): getattr(args, "p1", None),
        ("spec", "alpha"): getattr(args, "alpha", None),
        ("spec", "beta"): getattr(args, "beta", None),
        ("params", "a"): getattr(args, "a", None),
        ("params", "b"): getattr(args, "b", None),
        ("params", "zeta"): getattr(args, "zeta", None),
        ("trwa", "k0"): getattr(args, "k0", None),
        ("trwa", "k1"): getattr(args, "k1", None),
    }
    return pairs


def _detector(args):
    return build_detector(load_config(args.config, _overrides(args)))


def cmd_tune(args):
    spec = TestSpec(args.p0, args.p1, args.alpha, args.beta)
    params, diag = minimax_tune(spec, args.kmax)
    n_max = solve_max_obs(spec, params).n_max
    head = (
        f"a = {params.a!r}\nb = {params.b!r}\nzeta = {params.zeta!r}\n"
        f"n_max = {n_max}\nQ = {diag.Q!r}\nR = {diag.R!r}\n\n"
    )
    _write(head + diag.to_csv(), args.out)


def cmd_maxobs(args):
    spec = TestSpec(args.p0, args.p1, 0.5, 0.5)
    res = solve_max_obs(spec, TunedParams(args.a, args.b, args.zeta))
    _write(f"z_star = {res.z_star!r}\nm_star = {res.m_star!r}\nn_max = {res.n_max}\n", args.out)


def cmd_evaluate(args):
    det = _detector(args)
    grid = parse_grid(args.pgrid)
    if det.kind == "triple":
        pts = triple_risk_curve(det.plan, det.spec, grid)
        extra = [{"risk": repr(pt.risk), "zone": pt.zone} for pt in pts]
        text = reports_to_csv([pt.report for pt in pts], det.decisions, extra)
    elif det.kind == "trwa":
        reps = [evaluate_trwa(det.spec, det.params, p, det.info["mass_tol"],
                              det.info["max_horizon"])[0] for p in grid]
        extra = []
        for rep in reps:
            pt = risk_curve_point(det.spec, rep)
            extra.append({"risk": repr(pt[0]), "zone": pt[1]})
        text = reports_to_csv(reps, det.decisions, extra)
    else:
        pts = risk_curve(det.plan, det.spec, grid)
        base = trwa_baseline(det.spec, max(grid_horizon(det.spec, grid), 1024))
        ratios = asn_ratio_curve(det.plan, base, grid, 1e-12)
        extra = [
            {"risk": repr(pt.risk), "zone": pt.zone, "asn_trwa": repr(r.asn_b),
             "residual_trwa": repr(r.residual_b), "asn_ratio": repr(r.ratio)}
            for pt, r in zip(pts, ratios)
        ]
        text = reports_to_csv([pt.report for pt in pts], det.decisions, extra)
    _write(text, args.out)


def risk_curve_point(spec, rep):
    if rep.p <= spec.p0:
        return rep.accept_prob["benign"], "H0"
    if rep.p >= spec.p1:
        return rep.accept_prob["scanner"], "H1"
    return 0.0, "unspecified"


def grid_horizon(spec, grid) -> int:
    """TRWA horizon long enough for every grid point to shed all but 1e-12 of its mass."""
    params = TrwaParams.from_spec(spec)
    return max(evaluate_trwa(spec, params, p)[0].last_n for p in grid)


def trwa_baseline(spec, horizon):
    return trwa_plan(spec, TrwaParams.from_spec(spec), horizon)


def cmd_boundaries(args):
    det = _detector(args)
    if det.kind == "new":
        text = det.info["table"].to_csv()
    elif det.kind == "triple":
        text = regions_to_csv(det.plan)
    else:
        plan = trwa_plan(det.spec, det.params, args.horizon)
        lines = ["n,s_scanner,s_benign"]
        for n in range(1, plan.horizon + 1):
            row = plan.row(n)
            sc = np.flatnonzero(row == 1)
            be = np.flatnonzero(row == 2)
            lines.append(f"{n},{sc[-1] if len(sc) else ''},{be[0] if len(be) else ''}")
        text = "\n".join(lines) + "\n"
    _write(text, args.out)


def cmd_simulate(args):
    det = _detector(args)
    plan = det.plan
    if det.kind == "trwa":
        _, plan = evaluate_trwa(det.spec, det.params, args.p, det.info["mass_tol"],
                                det.info["max_horizon"])
    rep = simulate(plan, args.p, args.runs, args.seed)
    _write(rep.to_json() + "\n", args.out)


def cmd_detect(args):
    det = _detector(args)
    store = SessionStore(det)
    if args.snapshot:
        try:
            with open(args.snapshot) as fh:
                store.restore(json.load(fh))
        except FileNotFoundError:
            pass
    src = sys.stdin if args.input in (None, "-") else open(args.input)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w")
    try:
        for lineno, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                event = parse_event(line)
            except MalformedEventError as exc:
                if args.strict:
                    raise MalformedEventError(f"line {lineno}: {exc}") from None
                err = {"error": exc.code, "line": lineno, "message": str(exc)}
                sys.stderr.write(json.dumps(err) + "\n")
                continue
            rec = store.ingest(event)
            if rec is not None:
                out.write(json.dumps(rec) + "\n")
        if not args.no_summary:
            for rec in store.undecided_records():
                out.write(json.dumps(rec) + "\n")
    finally:
        if src is not sys.stdin:
            src.close()
        if out is not sys.stdout:
            out.close()
    if args.snapshot:
        with open(args.snapshot, "w") as fh:
            json.dump(store.snapshot(), fh, sort_keys=True)


def _add_spec_flags(p, required):
    for name in ("p0", "p1", "alpha", "beta"):
        p.add_argument(f"--{name}", type=float, required=required)


def _add_config_flags(p):
    p.add_argument("--config", help="config file (default: $SEQSCAN_CONFIG)")
    p.add_argument("--detector", choices=("new", "trwa", "triple"))
    _add_spec_flags(p, required=False)
    for name in ("a", "b", "zeta", "k0", "k1"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--kmax", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="seqscan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--backend", choices=("cython", "python"),
                        help="force a kernel backend (default: compiled if available)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tune", help="tune (a, b) by iterative minimax")
    _add_spec_flags(p, required=True)
    p.add_argument("--kmax", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("maxobs", help="hard bound on the number of observations")
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_maxobs)

    p = sub.add_parser("evaluate", help="exact risk / ASN curves over a p grid")
    _add_config_flags(p)
    p.add_argument("--pgrid", default="0.01:0.99:0.01")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("boundaries", help="export stopping regions as CSV")
    _add_config_flags(p)
    p.add_argument("--horizon", type=int, default=200, help="rows to export for trwa")
    p.add_argument("--out")
    p.set_defaults(func=cmd_boundaries)

    p = sub.add_parser("simulate", help="seeded Monte Carlo run of a detector")
    _add_config_flags(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="stream JSONL connection events, emit JSONL decisions")
    _add_config_flags(p)
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--snapshot", help="session snapshot file, loaded if present and rewritten")
    p.add_argument("--strict", action="store_true", help="abort on the first malformed line")
    p.add_argument("--no-summary", action="store_true",
                   help="omit end-of-stream records for undecided sources")
    p.set_defaults(func=cmd_detect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.backend:
            _backend.use(args.backend)
        args.func(args)
    except SeqScanError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": "invalid-argument", "message": str(exc)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
