"""``liyau`` command-line tool.

Subcommands ``eval``, ``compare``, ``optimize``, ``verify`` and ``simulate``
write a JSON report (plus CSV grids where relevant) into ``--out`` and print
a summary table; ``show`` re-renders the table of a saved report.

Exit codes: 0 success, 1 a bound was violated beyond tolerance, 2 usage,
configuration or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .bounds import ESTIMATE_IDS, dominates, get_estimate
from .errors import ConfigurationError, DomainError, LiYauError, NumericalError
from .kernels import ModelManifold, make_grid, verify_on_grid
from .report import (Record, ensure_dir, make_report, read_json, render_summary, write_csv,
                     write_json)
from .simulate import (InitialCondition, RadialGrid, calibrate_slack, kernel_error, mass,
                       monitor, run_radial_heat)
from .varopt import phi_upper

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("eval", "compare", "optimize", "verify", "simulate")
# keys that describe where output goes rather than what is computed
_NOT_ECHOED = {"out", "config", "func", "timing"}


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting so ``main`` can map errors to exit codes."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(f"{self.prog}: error: {message}")


def _threads_default():
    env = os.environ.get("LIYAU_THREADS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise ConfigurationError(f"LIYAU_THREADS must be an integer, got {env!r}")


def _shared(p):
    p.add_argument("--n", type=int, default=None, help="dimension")
    p.add_argument("--k", type=float, default=None, help="Ricci lower bound constant (Ric >= -k)")
    p.add_argument("--t", type=float, nargs="+", default=None, help="time(s)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default $LIYAU_THREADS or 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="JSON file with flag values; flags override it")
    p.add_argument("--timing", action="store_true", help="record wall time in the report")


def _estimate_flags(p):
    p.add_argument("--estimate", choices=ESTIMATE_IDS, default=None)


def _param_flags(p):
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--beta-family", default=None, help="psi1/psi2 curve family")
    p.add_argument("--beta-params", type=float, nargs="+", default=None)
    p.add_argument("--beta-T", type=float, default=None, help="curve horizon")
    p.add_argument("--weight-family", default=None, help="qian_general weight family")
    p.add_argument("--weight-params", type=float, nargs="*", default=None)
    p.add_argument("--weight-T", type=float, default=None)
    p.add_argument("--method", choices=("closed", "quadrature"), default="closed")


def _model_flags(p):
    p.add_argument("--model", choices=("euclidean", "hyperbolic3"), default="euclidean")
    p.add_argument("--c", type=float, default=1.0, help="hyperbolic curvature scale")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="liyau", description="Li-Yau type gradient estimate laboratory.")
    ap.add_argument("--version", action="version", version=f"liyau {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate an estimate at one or more times")
    _shared(p)
    _estimate_flags(p)
    _param_flags(p)
    p.add_argument("--form", choices=("beta", "alpha"), default="beta")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="sign of B_a - B_b over a (t, beta) grid")
    _shared(p)
    p.add_argument("--a", choices=ESTIMATE_IDS, default=None)
    p.add_argument("--b", choices=ESTIMATE_IDS, default=None)
    p.add_argument("--t-min", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--nt", type=int, default=100)
    p.add_argument("--nbeta", type=int, default=100)
    p.add_argument("--theta", type=float, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("optimize", help="upper approximation of phi1 / phi2")
    _shared(p)
    p.add_argument("--which", choices=("phi1", "phi2"), default="phi1")
    p.add_argument("--beta0", type=float, default=None)
    p.add_argument("--families", nargs="+", default=["linear"],
                   help="constant, linear, exponential, rational or piecewise_linear:M")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="check an estimate against a closed-form heat kernel")
    _shared(p)
    _model_flags(p)
    _estimate_flags(p)
    _param_flags(p)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=10.0)
    p.add_argument("--nr", type=int, default=256)
    p.add_argument("--t-min", type=float, default=0.05)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--nt", type=int, default=256)
    p.add_argument("--t-spacing", choices=("log", "uniform"), default="log")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--rhs-scale", type=float, default=1.0,
                   help="multiply the right-hand side (mutation testing)")
    p.add_argument("--dump-grid", action="store_true", help="write slack.csv")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="radial heat flow with an estimate monitor")
    _shared(p)
    _model_flags(p)
    _estimate_flags(p)
    _param_flags(p)
    p.add_argument("--initial", choices=("gaussian", "bump", "constant_plus_bump", "constant"),
                   default="gaussian")
    p.add_argument("--t0", type=float, default=0.1, help="kernel age of gaussian data")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("--floor", type=float, default=1e-3)
    p.add_argument("--value", type=float, default=1.0)
    p.add_argument("--R", type=float, default=12.0)
    p.add_argument("--nr", type=int, default=241)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--interior-fraction", type=float, default=0.25)
    p.add_argument("--snapshot-interval", type=float, default=0.1)
    p.add_argument("--t-shift", type=float, default=None,
                   help="age offset (default t0 for gaussian data, else 0)")
    p.add_argument("--eps-disc", type=float, default=None,
                   help="discretisation slack (default: calibrated on a kernel-matched run)")
    p.add_argument("--dump-csv", action="store_true", help="write snapshots.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("show", help="print the summary table of a saved report")
    p.add_argument("report")
    p.set_defaults(func=cmd_show)
    return ap


# ---------------------------------------------------------------------------
# config handling


def _load_config(path, parser):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigurationError("config file must hold a JSON object")
    known = {a.dest for a in parser._actions}
    out = {}
    for key, v in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("config", "func", "help"):
            raise ConfigurationError(f"unknown config key {key!r}")
        out[dest] = v
    return out


def parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command is None:
        ap.print_usage(sys.stderr)
        raise ConfigurationError("a subcommand is required: " + ", ".join(COMMANDS + ("show",)))
    if getattr(args, "config", None):
        sub = ap._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**_load_config(args.config, sub))
        args = ap.parse_args(argv)
    if hasattr(args, "threads") and args.threads is None:
        args.threads = _threads_default()
    if getattr(args, "threads", 1) < 1:
        raise ConfigurationError("--threads must be >= 1")
    if isinstance(getattr(args, "t", None), (int, float)):
        args.t = [float(args.t)]
    return args


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def _estimate_params(args, name, horizon):
    params = {}
    if name in ("li_yau", "davies_alpha") and args.alpha is not None:
        params["alpha"] = args.alpha
    if name in ("davies_beta", "cor12", "cor14", "cor15") and args.beta is not None:
        params["beta"] = args.beta
    if name in ("hamilton_theta", "qian_theta") and args.theta is not None:
        params["theta"] = args.theta
    if name in ("psi1", "psi2"):
        if args.beta_family is None:
            raise ConfigurationError(f"{name} needs --beta-family and --beta-params")
        params["beta_fn"] = {"family": args.beta_family, "params": list(args.beta_params or []),
                             "T": args.beta_T if args.beta_T is not None else horizon}
    if name == "qian_general":
        params["weight"] = {"family": args.weight_family or "quadratic",
                            "params": list(args.weight_params or []),
                            "T": args.weight_T if args.weight_T is not None else horizon}
        params["method"] = args.method
    return params


def _require_estimate(args):
    if args.estimate is None:
        raise ConfigurationError("--estimate is required; known: " + ", ".join(ESTIMATE_IDS))
    return args.estimate


def _model(args):
    if args.model == "hyperbolic3":
        if args.n not in (None, 3):
            raise DomainError("hyperbolic3 requires n = 3")
        return ModelManifold.hyperbolic3(args.c)
    return ModelManifold.euclidean(args.n if args.n is not None else 3)


def _finish(args, records, t_start, files):
    wall = round(time.perf_counter() - t_start, 6) if getattr(args, "timing", False) else None
    report = make_report(args.command, _echo(args), records, __version__, wall)
    out = ensure_dir(args.out)
    for name in files:
        write_json(os.path.join(out, name), report)
    # render from the serialised form so that `show` reproduces it byte for byte
    sys.stdout.write(render_summary(json.loads(json.dumps(report, sort_keys=True))))
    return report


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args):
    t0 = time.perf_counter()
    name = _require_estimate(args)
    n = args.n if args.n is not None else 2
    k = args.k if args.k is not None else 0.0
    ts = args.t or [1.0]
    est = get_estimate(name, n, k, **_estimate_params(args, name, max(ts)))
    records = []
    for t in ts:
        if args.form == "alpha":
            a, c = est.alpha_form(t)
            outputs = {"alpha": a, "C": c}
        else:
            b, B = est.evaluate(t)
            outputs = {"grad_coeff": b, "bound": B}
        records.append(Record(f"{name} t={t:g}", {"t": t, "n": n, "k": k,
                                                   "estimate": est.describe()}, outputs))
    _finish(args, records, t0, ["eval.json", "report.json"])
    return EXIT_OK


def cmd_compare(args):
    t0 = time.perf_counter()
    if args.a is None or args.b is None:
        raise ConfigurationError("compare needs --a and --b")
    n = args.n if args.n is not None else 2
    k = args.k if args.k is not None else 1.0
    if not 0 < args.t_min <= args.t_max:
        raise DomainError("need 0 < t-min <= t-max")
    ts = np.geomspace(args.t_min, args.t_max, args.nt)
    betas = np.linspace(0.0, 1.0, args.nbeta + 2)[1:-1]
    fixed = {"theta": args.theta} if args.theta is not None else {}
    rep = dominates(args.a, args.b, ts, betas, n, k, **fixed)
    out = ensure_dir(args.out)
    rows = [(float(ts[j]), float(betas[i]), float(rep.diffs[i, j]))
            for i in range(len(betas)) for j in range(len(ts))]
    write_csv(os.path.join(out, "compare.csv"), ["t", "beta", "diff"], rows)
    rec = Record(f"{args.a} vs {args.b}",
                 {"a": args.a, "b": args.b, "n": n, "k": k, "t_min": args.t_min,
                  "t_max": args.t_max, "nt": args.nt, "nbeta": args.nbeta},
                 {"verdict": rep.verdict, "max_diff": rep.max_diff, "min_diff": rep.min_diff},
                 {"rel_tol": 1e-12},
                 {"a_smaller": rep.witness_a_smaller, "b_smaller": rep.witness_b_smaller})
    _finish(args, [rec], t0, ["report.json"])
    return EXIT_OK


def cmd_optimize(args):
    t0 = time.perf_counter()
    if args.beta0 is None:
        raise ConfigurationError("optimize needs --beta0")
    n = args.n if args.n is not None else 2
    k = args.k if args.k is not None else 1.0
    records = []
    for t in args.t or [1.0]:
        res = phi_upper(args.which, args.beta0, t, n, k, families=tuple(args.families),
                        seed=args.seed)
        d = res.to_dict()
        records.append(Record(
            f"{args.which} beta0={args.beta0:g} t0={t:g}",
            {"which": args.which, "beta0": args.beta0, "t0": t, "n": n, "k": k,
             "families": list(args.families), "seed": args.seed},
            {"value": d["value"], "family": d["family"], "best_params": d["best_params"],
             "family_values": d["family_values"], "corollary_reference": d["corollary_reference"],
             "upper_bound_of_phi": True},
            {},
            {"feasible": d["feasible"]}))
    _finish(args, records, t0, ["report.json"])
    return EXIT_OK


def cmd_verify(args):
    t0 = time.perf_counter()
    name = _require_estimate(args)
    m = _model(args)
    k = args.k if args.k is not None else m.k
    r, t, spec = make_grid(args.r_min, args.r_max, args.nr, args.t_min, args.t_max, args.nt,
                           args.t_spacing)
    est = get_estimate(name, m.n, k, **_estimate_params(args, name, args.t_max))
    if args.rhs_scale != 1.0:
        est = est.scaled(args.rhs_scale)
    rep, (r, t, lhs, rhs) = verify_on_grid(m, est, r, t, spec, tol=args.tol,
                                            threads=args.threads, return_arrays=True)
    if args.dump_grid:
        out = ensure_dir(args.out)
        rows = [(float(r[i]), float(t[j]), float(lhs[i, j]), float(rhs[i, j]),
                 float(rhs[i, j] - lhs[i, j])) for i in range(len(r)) for j in range(len(t))]
        write_csv(os.path.join(out, "slack.csv"), ["r", "t", "lhs", "rhs", "slack"], rows)
    d = rep.to_dict()
    rec = Record(f"verify {name} on {m.geometry} n={m.n}",
                 {"model": d["model"], "estimate": d["estimate"], "grid": d["grid"]},
                 {"max_violation": d["max_violation"], "tightness": d["tightness"],
                  "passed": d["passed"]},
                 {"tolerance": d["tolerance"]},
                 {"argmax": d["argmax"], "tightness_at": d["tightness_at"]})
    _finish(args, [rec], t0, ["report.json"])
    if not rep.passed:
        sys.stderr.write(f"violation {rep.max_violation:.6g} > {rep.tolerance:g} at "
                         f"r={rep.argmax['r']:.6g}, t={rep.argmax['t']:.6g}\n")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_simulate(args):
    t0 = time.perf_counter()
    m = _model(args)
    g = RadialGrid(R=args.R, nr=args.nr, dt=args.dt, t_end=args.t_end,
                   interior_fraction=args.interior_fraction, snapshot_interval=args.snapshot_interval)
    ic = InitialCondition(args.initial, t0=args.t0, amplitude=args.amplitude, width=args.width,
                          floor=args.floor, value=args.value)
    traj = run_radial_heat(m, g, ic)
    outputs = {"min_u": float(traj.u.min()), "snapshots": int(len(traj.times)),
               "mass_initial": float(mass(traj, float(traj.u[0, -1]))[0]),
               "mass_final": float(mass(traj, float(traj.u[0, -1]))[-1])}
    if args.initial == "gaussian":
        outputs["kernel_error"] = kernel_error(traj)
    records = [Record(f"simulate {args.initial} on {m.geometry} n={m.n}",
                      {"model": m.to_dict(), "grid": g.to_dict(), "initial": ic.to_dict()},
                      outputs)]
    passed = True
    if args.estimate is not None:
        k = args.k if args.k is not None else m.k
        t_shift = args.t_shift if args.t_shift is not None else (
            args.t0 if args.initial == "gaussian" else 0.0)
        # the calibration run ages up to t_end + t0
        horizon = args.t_end + max(t_shift, args.t0)
        est = get_estimate(args.estimate, m.n, k,
                           **_estimate_params(args, args.estimate, horizon))
        eps = args.eps_disc if args.eps_disc is not None else calibrate_slack(m, g, est, args.t0)
        rep = monitor(traj, est, t_shift=t_shift, eps_disc=eps)
        d = rep.to_dict()
        passed = rep.passed
        records.append(Record(
            f"monitor {args.estimate}",
            {"estimate": d["estimate"], "t_shift": t_shift},
            {"max_violation": d["max_violation"], "tightness": d["tightness"],
             "passed": d["passed"]},
            {"eps_disc": eps, "tolerance": d["tolerance"],
             "eps_source": "given" if args.eps_disc is not None else "kernel-matched run"},
            {"argmax": d["argmax"], "tightness_at": d["tightness_at"]}))
    if args.dump_csv:
        out = ensure_dir(args.out)
        rows = [(float(tt), float(rr), float(uu)) for tt, snap in zip(traj.times, traj.u)
                for rr, uu in zip(traj.r, snap)]
        write_csv(os.path.join(out, "snapshots.csv"), ["t", "r", "u"], rows)
    _finish(args, records, t0, ["report.json"])
    if not passed:
        rep_rec = records[-1]
        sys.stderr.write(f"violation {rep_rec.outputs['max_violation']:.6g} at "
                         f"{rep_rec.witnesses['argmax']}\n")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_show(args):
    sys.stdout.write(render_summary(read_json(args.report)))
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
        return args.func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except NumericalError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        if exc.diagnostics:
            sys.stderr.write(json.dumps(exc.diagnostics, sort_keys=True) + "\n")
        return EXIT_NUMERICAL
    except (LiYauError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
