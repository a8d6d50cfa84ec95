"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 hard failure of an inequality
with an explicit constant. Errors are also written to stderr as JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict
from fractions import Fraction

import numpy as np

from . import report
from .arith import IWFamily, gauss_decay_fit, gauss_sum
from .averages import TimeGrid, _as_map, apply, average_family, build_kernel
from .fourier import (
    approximation_error,
    decay_check_phi,
    exponential_sum_m,
    oscillatory_integral_phi,
    parse_frequency_grid,
)
from .grid import GridFunction
from .harness import (
    ExperimentConfig,
    body_of,
    estimate_constant,
    minor_arc_decay,
    seminorm_inequality_suite,
    stabilization_report,
    uniformity_sweep,
)
from .lattice import canonical_gamma_set
from .seminorms import SeminormKind, jump_field, seminorm_values


class ValidationError(Exception):
    pass


class HardFailure(Exception):
    def __init__(self, message, witness_path):
        super().__init__(message)
        self.witness_path = witness_path


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _range(spec: str):
    a, _, b = spec.partition("..")
    return range(int(a), int(b or a) + 1)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (created if absent)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--config", default=None, help="experiment.cfg style key=value file")

    p = _Parser(prog="discrete-radon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("avg", parents=[common], help="apply averaging operators to a grid function")
    a.add_argument("--map", required=True)
    a.add_argument("--body", choices=["ball", "cube"], default="ball")
    g = a.add_mutually_exclusive_group()
    g.add_argument("--t", type=Fraction, default=None)
    g.add_argument("--grid", default=None)
    a.add_argument("--input", default=None, help="grid file (default: Dirac at the origin)")

    s = sub.add_parser("seminorm", parents=[common], help="evaluate a seminorm")
    s.add_argument("--kind", default="sup")
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--values", default=None, help="comma separated scalar sequence")
    s.add_argument("--times", default=None, help="comma separated sample times")
    s.add_argument("--input", default=None, help="grid file for a family of averages")
    s.add_argument("--map", default=None)
    s.add_argument("--body", choices=["ball", "cube"], default="ball")
    s.add_argument("--grid", default=None)

    f = sub.add_parser("fourier", parents=[common], help="exponential sums, Gauss sums, integrals")
    f.add_argument("--mode", choices=["m", "phi", "gauss", "gauss-fit", "phi-decay", "approx", "minor-arc"], default="m")
    f.add_argument("--map", default="(n, n^2)")
    f.add_argument("--body", choices=["ball", "cube"], default="ball")
    f.add_argument("--N", type=int, default=8)
    f.add_argument("--dim", type=int, default=None)
    f.add_argument("--freq", default="uniform:8", help="uniform:n | list:x,y;... | arc:a1,a2/q:radius:points")
    f.add_argument("--numerators", default="0,1")
    f.add_argument("--q", type=int, default=3)
    f.add_argument("--chi", type=float, default=0.05)
    f.add_argument("--u", type=int, default=1)
    f.add_argument("--n", default="4..10", help="level range for approx and minor-arc")

    sg = sub.add_parser("sigma", parents=[common], help="reduced fractions with bounded denominators")
    sg.add_argument("--N", type=int, required=True)
    sg.add_argument("--dim", type=int, default=1)
    sg.add_argument("--u", type=int, default=1)

    c = sub.add_parser("constants", parents=[common], help="witness search for an operator constant")
    for name in ("map", "body", "kind", "grid", "id"):
        c.add_argument(f"--{name}", default=None)
    c.add_argument("--p", type=float, default=None)
    c.add_argument("--N", type=int, default=None, help="dyadic time horizon")
    c.add_argument("--budget", type=int, default=None)
    c.add_argument("--box", type=int, default=None)

    w = sub.add_parser("sweep", parents=[common], help="coefficient or scale sweeps")
    w.add_argument("--map", default="c*n^2", help="template with the letter c for the coefficient")
    w.add_argument("--coeffs", default="1..10")
    w.add_argument("--schedule", default=None, help="comma separated N values (stabilization mode)")
    w.add_argument("--kind", default="sup")
    w.add_argument("--p", type=float, default=2.0)
    w.add_argument("--grid", default="dyadic:0..3")
    w.add_argument("--budget", type=int, default=100)
    w.add_argument("--box", type=int, default=8)

    u = sub.add_parser("suite", parents=[common], help="randomised seminorm inequality suite")
    u.add_argument("--trials", type=int, default=10_000)

    r = sub.add_parser("report", parents=[common], help="SVG decay plots")
    r.add_argument("--plot", choices=["minor-arc", "gauss"], required=True)
    r.add_argument("--input", default=None, help="CSV table from the fourier subcommand")
    r.add_argument("--N", type=int, default=100, help="q_max for the Gauss table")
    r.add_argument("--chi", type=float, default=0.05)
    return p


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _emit(args, name, obj):
    text = report.json_text(obj)
    if args.out:
        path = os.path.join(_outdir(args), name)
        with open(path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _load_grid(path, d):
    if path is None:
        return GridFunction.delta((0,) * d)
    g = GridFunction.load(path)
    if g.d != d:
        raise ValidationError(f"input grid has dimension {g.d}, map has {d}")
    return g


def cmd_avg(args):
    P = _as_map(args.map)
    body = body_of(args.body)
    f = _load_grid(args.input, P.d)
    out = _outdir(args)
    written = []
    if args.grid:
        fam = average_family(f, P, body, TimeGrid.parse(args.grid))
        for i, t in enumerate(fam.times):
            path = os.path.join(out, f"avg-{i}.grid")
            fam[i].save(path)
            written.append({"t": str(t), "path": path})
    else:
        t = args.t if args.t is not None else Fraction(1)
        K = build_kernel(P, body, t)
        path = os.path.join(out, "avg.grid")
        apply(f, K, "direct").save(path)
        written.append({"t": str(t), "path": path})
    sys.stdout.write(report.json_text({"outputs": written, "seed": args.seed}))


def cmd_seminorm(args):
    kind = SeminormKind.parse(args.kind)
    if args.values is not None:
        vals = np.array([complex(v) for v in args.values.split(",")])
        if not np.any(vals.imag):
            vals = vals.real
        times = np.array([float(Fraction(t)) for t in args.times.split(",")]) if args.times else np.arange(len(vals), dtype=float)
        res = seminorm_values(vals[:, None], times, kind, args.p)
        obj = {"kind": args.kind, "p": args.p, "value": res.aggregate, "seed": args.seed}
        if kind.variant == "jump" and isinstance(kind.lambdas, tuple) and len(kind.lambdas) == 1:
            obj["count"] = int(jump_field(vals, kind.lambdas[0])[0])
        if res.lam is not None:
            obj["lambda"] = res.lam
    else:
        if not (args.map and args.grid):
            raise ValidationError("family mode needs --map and --grid (and optionally --input)")
        P = _as_map(args.map)
        f = _load_grid(args.input, P.d)
        grid = TimeGrid.parse(args.grid)
        fam = average_family(f, P, body_of(args.body), grid)
        res = seminorm_values(fam.flat(), grid.as_floats(), kind, args.p)
        obj = {"kind": args.kind, "p": args.p, "value": res.aggregate, "seed": args.seed}
        if res.lam is not None:
            obj["lambda"] = res.lam
        if res.anchors is not None:
            obj["anchors"] = list(res.anchors)
    _emit(args, "seminorm.json", obj)


def _canonical_from_map(text):
    P = _as_map(text)
    gam = [a for comp in P.terms for a, _ in comp]
    cm = canonical_gamma_set(P.k, P.degree)
    if sorted(gam) == list(cm.gamma) and all(len(c) == 1 and c[0][1] == 1 for c in P.terms):
        return cm
    return None


def cmd_fourier(args):
    out = _outdir(args)
    P = _as_map(args.map)
    body = body_of(args.body)
    dim = args.dim or P.d
    rows, cols = [], None
    if args.mode in ("m", "phi"):
        xi = parse_frequency_grid(args.freq, dim)
        vals = exponential_sum_m(P, body, args.N, xi) if args.mode == "m" else oscillatory_integral_phi(P, body, args.N, xi)
        for x, v in zip(xi, vals):
            row = {f"xi{i}": c for i, c in enumerate(x)}
            row.update({"N": args.N, "value": abs(v), "re": v.real, "im": v.imag, "bound": 1.0, "ratio": abs(v)})
            rows.append(row)
    elif args.mode == "gauss":
        cm = _canonical_from_map(args.map) or canonical_gamma_set(1, 2)
        a = [int(v) for v in args.numerators.split(",")]
        G = gauss_sum(cm.gamma, a, args.q)
        b = args.q**-0.5
        rows.append({"q": args.q, "numerators": args.numerators, "value": abs(G), "re": G.real, "im": G.imag, "bound": b, "ratio": abs(G) / b})
    elif args.mode == "gauss-fit":
        cm = _canonical_from_map(args.map) or canonical_gamma_set(1, 2)
        fit = gauss_decay_fit(cm.gamma, args.N, seed=args.seed)
        for q, m in zip(fit.q, fit.max_modulus):
            b = float(q) ** -0.5
            rows.append({"q": int(q), "value": m, "bound": b, "ratio": m / b, "delta": fit.delta, "constant": fit.constant})
    elif args.mode == "phi-decay":
        cm = _canonical_from_map(args.map) or canonical_gamma_set(1, 2)
        zeta = parse_frequency_grid(args.freq, cm.size)
        zeta = zeta[np.abs(zeta).max(axis=1) > 0]
        rep = decay_check_phi(cm, body, zeta, Ns=(args.N, 2 * args.N))
        for N, c1, c2 in zip(rep.N, rep.decay_constant, rep.smallness_constant):
            rows.append({"N": N, "value": c1, "bound": c2, "ratio": rep.spread})
    elif args.mode == "approx":
        cm = _canonical_from_map(args.map) or canonical_gamma_set(1, 2)
        a = [int(v) for v in args.numerators.split(",")]
        ax = np.linspace(-1 / 16, 1 / 16, 9)
        w = np.stack(np.meshgrid(*([ax] * cm.size), indexing="ij"), axis=-1).reshape(-1, cm.size)
        for n in _range(args.n):
            rep = approximation_error(n, a, args.q, w, cm, body, args.chi)
            rows.append({"n": n, "q": args.q, "value": rep.max_error, "bound": rep.target, "ratio": rep.max_error / rep.target})
    elif args.mode == "minor-arc":
        tab = minor_arc_decay(_range(args.n), chi=args.chi, u=args.u, seed=args.seed, body=body)
        for n, s, k, prof in zip(tab.n, tab.sup, tab.points, tab.profile):
            rows.append({"n": n, "points": k, "value": s, "bound": prof, "ratio": s / prof})
    for r in rows:
        r["seed"] = args.seed
    path = os.path.join(out, f"fourier-{args.mode}.csv")
    report.write_csv(path, rows, cols)
    sys.stdout.write(report.json_text({"rows": len(rows), "path": path, "seed": args.seed}))


def cmd_sigma(args):
    fam = IWFamily.build(args.N, args.dim, args.u)
    obj = {
        "N": args.N,
        "dim": args.dim,
        "seed": args.seed,
        "denominators": list(fam.denominators.members),
        "fractions": [[str(x) for x in r.as_fractions()] for r in fam.sigma],
        "cardinality": fam.cardinality_report(),
    }
    _emit(args, "sigma.json", obj)


def _config(args, **extra) -> ExperimentConfig:
    text = ""
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    over = {k: getattr(args, k, None) for k in ("map", "body", "kind", "p", "grid", "budget", "box", "id")}
    over.update(extra)
    over["seed"] = args.seed if args.seed_given else None
    if getattr(args, "N", None):
        g = TimeGrid.dyadic_horizon(args.N)
        over["grid"] = f"dyadic:0..{len(g) - 1}"
    return ExperimentConfig.from_text(text, **over)


def cmd_constants(args):
    cfg = _config(args)
    out = _outdir(args)
    est = estimate_constant(cfg)
    wpath = os.path.join(out, f"witness-{cfg.id}.grid")
    est.witness.save(wpath)
    report.write_csv(
        os.path.join(out, f"trace-{cfg.id}.csv"),
        [{"iteration": i, "ratio": v} for i, v in enumerate(est.trace)],
    )
    row = {**asdict(cfg), "value": est.value, "probe_value": est.probe_value, "stalled": est.stalled, "witness": os.path.basename(wpath)}
    report.write_csv(os.path.join(out, "results.csv"), [row])
    sys.stdout.write(report.json_text(row))


def cmd_sweep(args):
    out = _outdir(args)
    cfg = ExperimentConfig(kind=args.kind, p=args.p, grid=args.grid, budget=args.budget, box=args.box, seed=args.seed)
    if args.schedule:
        tab = stabilization_report(args.kind, args.p, [int(v) for v in args.schedule.split(",")], cfg)
        rows = [
            {"N": N, "estimate": e, "growth": (tab.growth[i - 1] if i else None), "seed": args.seed}
            for i, (N, e) in enumerate(zip(tab.N, tab.estimates))
        ]
        summary = {"final_over_first": tab.estimates[-1] / tab.estimates[0] if tab.estimates[0] else math.inf}
    else:
        if "c" not in args.map:
            raise ValidationError("sweep template must contain the coefficient letter c")
        tab = uniformity_sweep(_range(args.coeffs), args.map, cfg)
        rows = [{**r, "seed": args.seed} for r in tab.rows]
        summary = {"max_min_ratio": tab.max_min_ratio}
    report.write_csv(os.path.join(out, "sweep.csv"), rows)
    sys.stdout.write(report.json_text({**summary, "seed": args.seed}))


def cmd_suite(args):
    rep = seminorm_inequality_suite(args.trials, args.seed)
    out = _outdir(args)
    obj = rep.as_dict()
    with open(os.path.join(out, "suite.json"), "w") as fh:
        fh.write(report.json_text(obj))
    report.write_csv(
        os.path.join(out, "suite.csv"),
        [{"check": k, "instances": rep.checks[k], "violations": rep.violations[k], "seed": args.seed} for k in sorted(rep.checks)],
    )
    sys.stdout.write(report.json_text({"violations": rep.total_violations, "seed": args.seed}))
    if rep.total_violations:
        wpath = os.path.join(out, "suite-witness.json")
        with open(wpath, "w") as fh:
            fh.write(report.json_text(rep.witnesses))
        raise HardFailure(f"{rep.total_violations} explicit-constant violations", wpath)


def cmd_report(args):
    out = _outdir(args)
    if args.plot == "minor-arc":
        if args.input:
            rows = report.read_csv(args.input)
            n = [r["n"] for r in rows]
            s = [r["value"] for r in rows]
        else:
            tab = minor_arc_decay(chi=args.chi, seed=args.seed)
            n, s = tab.n, tab.sup
        path = os.path.join(out, "minor-arc.svg")
        report.emit_plot(
            {"minor-arc sup": (n, s)}, path, title="minor-arc decay", xlabel="n", ylabel="sup",
            loglog=False, references=[("(n+1)^-2", lambda x: (x + 1) ** -2.0)],
        )
    else:
        if args.input:
            rows = report.read_csv(args.input)
            q = [r["q"] for r in rows if r["q"] >= 2]
            g = [r["value"] for r in rows if r["q"] >= 2]
        else:
            fit = gauss_decay_fit(canonical_gamma_set(1, 2).gamma, args.N, seed=args.seed)
            q, g = list(fit.q[1:]), list(fit.max_modulus[1:])
        keep = [(a, b) for a, b in zip(q, g) if b > 0]
        if not keep:
            raise ValidationError("nothing to plot: empty or all-zero series")
        q, g = zip(*keep)
        path = os.path.join(out, "gauss.svg")
        report.emit_plot(
            {"max |G(a/q)|": (q, g)}, path, title="Gauss sum decay", xlabel="q", ylabel="max modulus",
            references=[("q^-1/2", lambda x: x**-0.5)],
        )
    sys.stdout.write(report.json_text({"path": path, "seed": args.seed}))


COMMANDS = {
    "avg": cmd_avg,
    "seminorm": cmd_seminorm,
    "fourier": cmd_fourier,
    "sigma": cmd_sigma,
    "constants": cmd_constants,
    "sweep": cmd_sweep,
    "suite": cmd_suite,
    "report": cmd_report,
}


def _error(kind, message, **extra):
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True) + "\n")


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = 0
        COMMANDS[args.command](args)
        return 0
    except HardFailure as e:
        _error("hard-failure", str(e), witness=e.witness_path)
        print(f"witness: {e.witness_path}")
        return 2
    except (ValidationError, ValueError, OSError, MemoryError, ArithmeticError) as e:
        _error("validation", str(e), type=type(e).__name__)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
