"""Command-line interface.

Subcommands:
  generate     write a Halton / Sobol / seeded-uniform point set as CSV
  discrepancy  classical or weighted star-discrepancy of a point-set file
  estimate     self-normalized importance-sampling estimate
  verify       check the three error bounds over a grid of sample sizes
  experiment   convergence study (CSV tables + figures)
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bounds, experiments, models, plotting, sequences
from .discrepancy import (WeightVector, lebesgue_oracle,
                          self_normalized_weights, star_discrepancy_exact,
                          star_discrepancy_lower_bound,
                          weighted_star_discrepancy, DEFAULT_BUDGET)
from .estimators import importance_estimate


def _parse_measure(spec: str, budget: int):
    if spec == "lebesgue":
        return None
    if spec.startswith("dirichlet:") and "alpha=" not in spec:
        alpha = tuple(float(v) for v in spec.split(":", 1)[1].split(","))
        model = models.DirichletModel(alpha)
    else:
        model = models.parse_model(spec)
    return models.dirichlet_oracle(model, budget)


def _cmd_generate(args) -> int:
    ps = sequences.generate(args.kind, args.n, args.dim, args.seed)
    sequences.write_csv(ps, args.out)
    print(f"wrote {ps.n} x {ps.dim} {args.kind} points to {args.out}")
    return 0


def _cmd_discrepancy(args) -> int:
    P = sequences.read_csv(args.points)
    weights = None
    if args.weights:
        weights = WeightVector(np.loadtxt(args.weights, ndmin=1))
    oracle = _parse_measure(args.measure, args.oracle_budget)

    if args.mode == "lower-bound":
        if weights is not None or oracle is not None:
            raise SystemExit("lower-bound mode supports only the classical "
                             "unweighted Lebesgue case")
        res = star_discrepancy_lower_bound(P, args.effort, args.seed)
    elif weights is None and oracle is None:
        res = star_discrepancy_exact(P, args.budget)
    else:
        if weights is None:
            weights = WeightVector.uniform(P.n)
        res = weighted_star_discrepancy(
            P, weights, oracle or lebesgue_oracle(P.dim), args.budget)
    print(json.dumps({
        "value": res.value, "mode": res.mode,
        "witness": [float(c) for c in res.witness_box],
        "boxes_evaluated": res.boxes_evaluated,
        "oracle_eps": res.oracle_eps,
    }))
    return 0


def _load_points(args) -> sequences.PointSet:
    if args.points:
        return sequences.read_csv(args.points)
    if not (args.kind and args.n and args.dim):
        raise SystemExit("need --points FILE or --kind/--n/--dim")
    return sequences.generate(args.kind, args.n, args.dim, args.seed)


def _cmd_estimate(args) -> int:
    P = _load_points(args)
    model = models.parse_model(args.model)
    f = models.parse_integrand(args.integrand)
    reference = None
    if args.reference == "auto":
        reference = bounds._reference(model, f)
    elif args.reference is not None:
        reference = float(args.reference)
    rep = importance_estimate(P, f.evaluate, model.u, reference)
    print(json.dumps(rep.to_dict()))
    return 0


def _cmd_verify(args) -> int:
    model = models.parse_model(args.model)
    f = models.parse_integrand(args.integrand)
    n_list = [int(v) for v in args.n_list.split(",")]
    kinds = args.kind.split(",")
    os.makedirs(args.out, exist_ok=True)
    verifier = bounds.BoundVerifier(
        model, f, oracle_budget=args.oracle_budget, ud_grid=args.ud_grid,
        ud_order=args.ud_order, budget=args.budget)
    reports = []
    all_pass = True
    for kind in kinds:
        for n in n_list:
            P = sequences.generate(kind, n, model.dim)
            r = verifier.full_report(P)
            reports.append(r.to_dict())
            ok = r.pass_kh and r.pass_rel and r.pass_main
            all_pass &= ok
            print(f"{kind} n={n}: kh={'PASS' if r.pass_kh else 'FAIL'} "
                  f"rel={'PASS' if r.pass_rel else 'FAIL'} "
                  f"main={'PASS' if r.pass_main else 'FAIL'}")
    with open(os.path.join(args.out, "bound_reports.jsonl"), "w") as fh:
        for rec in reports:
            fh.write(json.dumps(rec) + "\n")
    summary_cols = ("kind", "n", "lhs_kh", "rhs_kh", "pass_kh", "lhs_rel",
                    "rhs_rel", "pass_rel", "lhs_main", "rhs_main",
                    "pass_main", "d_classical", "d_weighted", "oracle_eps")
    summary = [{
        "kind": r["instance"]["point_source"].get("kind"),
        "n": r["instance"]["n"],
        **{k: r[k] for k in summary_cols[2:]},
    } for r in reports]
    experiments.write_csv(summary, summary_cols,
                          os.path.join(args.out, "summary.csv"))
    plotting.plot_bounds(reports, args.out)
    print(f"wrote {args.out}/bound_reports.jsonl and summary.csv")
    return 0 if all_pass else 1


def _cmd_experiment(args) -> int:
    with open(args.config) as fh:
        config = experiments.ExperimentConfig.from_text(fh.read())
    out = args.out or config.out
    os.makedirs(out, exist_ok=True)
    rows = experiments.run_convergence(config)
    experiments.write_csv(rows, experiments.CONVERGENCE_COLUMNS,
                          os.path.join(out, "convergence.csv"))
    rates = experiments.fit_all_rates(rows)
    experiments.write_csv(rates, experiments.RATE_COLUMNS,
                          os.path.join(out, "rates.csv"))
    plotting.plot_convergence(rows, out)
    for r in rates:
        print(f"{r['kind']} d={r['d']}: slope {r['slope']:+.3f}")
    ok = True
    if "uniform" in config.kinds:
        ok = experiments.qmc_beats_mc(rates)
        if not ok:
            print("FAIL: a QMC slope does not beat the MC slope",
                  file=sys.stderr)
    print(f"wrote {out}/convergence.csv and rates.csv")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmcis", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a point set as CSV")
    g.add_argument("--kind", required=True,
                   choices=["halton", "sobol", "uniform"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    d = sub.add_parser("discrepancy", help="star-discrepancy of a CSV file")
    d.add_argument("--points", required=True)
    d.add_argument("--weights", default=None)
    d.add_argument("--measure", default="lebesgue",
                   help="lebesgue or dirichlet:a1,a2,...")
    d.add_argument("--mode", choices=["exact", "lower-bound"],
                   default="exact")
    d.add_argument("--effort", type=int, default=10000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    d.add_argument("--oracle-budget", type=int, default=2**20)
    d.set_defaults(func=_cmd_discrepancy)

    e = sub.add_parser("estimate", help="importance-sampling estimate")
    e.add_argument("--points", default=None)
    e.add_argument("--kind", choices=["halton", "sobol", "uniform"])
    e.add_argument("--n", type=int)
    e.add_argument("--dim", type=int)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--model", required=True,
                   help="e.g. dirichlet:d=2,alpha=2,2,2")
    e.add_argument("--integrand", required=True,
                   help="e.g. monomial:gamma=1,1")
    e.add_argument("--reference", default=None,
                   help="'auto' for the closed form, or a number")
    e.set_defaults(func=_cmd_estimate)

    v = sub.add_parser("verify", help="check the error bounds")
    v.add_argument("--model", required=True)
    v.add_argument("--integrand", required=True)
    v.add_argument("--kind", default="halton,sobol",
                   help="comma-separated generator kinds")
    v.add_argument("--n-list", required=True, help="e.g. 64,128,256")
    v.add_argument("--out", required=True)
    v.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    v.add_argument("--oracle-budget", type=int, default=2**20)
    v.add_argument("--ud-grid", type=int, default=32)
    v.add_argument("--ud-order", type=int, default=16)
    v.set_defaults(func=_cmd_verify)

    x = sub.add_parser("experiment", help="convergence study")
    x.add_argument("--config", required=True)
    x.add_argument("--out", default=None)
    x.set_defaults(func=_cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
