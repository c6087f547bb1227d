"""Command-line front end: generation, censuses, exact sums, chains, laws.

Subcommands mirror the library surface; every output file is UTF-8 and
newline-terminated.  The heavy lifting lives in the library modules.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import census, exact, experiments, glauber, laws, planted, variational
from .graphs import ER, REGULAR, ModelSpec, MultiGraph, census_basic


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_graph(path: str) -> MultiGraph:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return MultiGraph.from_json(text)
    return MultiGraph.from_edgelist(text)


def _model_from_args(args) -> ModelSpec:
    return ModelSpec(args.model, args.n, args.d)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="base RNG seed (default 0)")
    parser.add_argument("--out", default=None, help="output path or directory ('-' = stdout)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for trials")
    parser.add_argument("--config", default=None, help="JSON config file (experiment)")


def _cmd_gen(args) -> int:
    g = _model_from_args(args).sample(args.seed)
    text = g.to_json() + "\n" if args.format == "json" else g.to_edgelist()
    _write(args.out, text)
    return 0


def _cmd_census(args) -> int:
    g = _load_graph(args.graph)
    rows = census.count_cycles_upto(g, args.k_max).csv_rows(args.graph_id)
    out = census.census_csv(rows)
    if args.ell:
        x = census.count_paths(g, args.ell)
        norm = census.normalize_path_count(x, g.n, args.d, args.ell)
        out += census.census_csv(
            [census.path_csv_rows(args.graph_id, args.ell, x, norm.xhat)],
            header=("graph_id", "ell", "X", "Xhat"),
        )
    _write(args.out, out)
    return 0


def _cmd_exact(args) -> int:
    g = _load_graph(args.graph)
    table = exact.exact_partition_by_magnetization(g, args.beta, normalized=args.normalized)
    if args.law:
        _write(args.out, table.law().to_csv())
    else:
        _write(args.out, table.to_csv())
    if args.delta:
        value = exact.delta_n(table.log_total(), g.n, g.edge_count, args.beta)
        sys.stdout.write(f"delta_n {value!r}\n")
    return 0


def _cmd_mcmc(args) -> int:
    g = _load_graph(args.graph)
    cfg = glauber.ChainConfig(
        beta=args.beta, burn_in=args.burn_in, sample_gap=args.sample_gap,
        samples=args.samples, seed=args.seed,
    )
    if args.log_z:
        log_z, se = glauber.estimate_log_partition(g, args.beta, args.grid, cfg)
        sys.stdout.write(f"log_z {log_z!r} stderr {se!r}\n")
        return 0
    trace = glauber.run_glauber(g, cfg, keep_spins=False)
    _write(args.out, trace.to_jsonl())
    est = glauber.estimate_magnetization_moments(g, cfg)
    sys.stdout.write(
        f"mean_m {est.mean_m!r} var_m {est.var_m!r} var_se {est.var_se!r}\n"
    )
    return 0


def _cmd_planted(args) -> int:
    model = _model_from_args(args)
    beta = exact.critical_beta(model)
    tables = []
    values = []
    for t in range(args.trials):
        g = model.sample(args.seed ^ t)
        tables.append(exact.exact_partition_by_magnetization(g, beta, normalized=True))
        values.append(census.count_cycles_upto(g, 3)[3])
    sample = planted.planted_reweight(tables, args.m)
    _write(args.out, sample.to_csv())
    mean, se = sample.mean_stderr(np.array(values, dtype=float))
    sys.stdout.write(
        f"planted_triangle_mean {mean!r} stderr {se!r} ess {sample.ess!r}\n"
    )
    return 0


def _make_law(args):
    if args.law == "reg":
        return laws.RegLimit(int(args.d))
    if args.law == "component":
        return laws.MixtureComponent(args.d, args.x)
    if args.law == "mixture":
        return laws.Mixture(args.d)
    if args.law == "free-energy":
        return laws.FreeEnergyLimit(args.d, args.i_max)
    raise ValueError(f"unknown law {args.law!r}")


def _cmd_limits(args) -> int:
    law = _make_law(args)
    if args.sample:
        samples = law.sample(args.sample, args.seed)
        _write(args.out, "".join(f"{s!r}\n" for s in samples))
        return 0
    if not hasattr(law, "table_csv"):
        raise SystemExit("this law kind exposes sampling only")
    _write(args.out, law.table_csv())
    return 0


def _cmd_variational(args) -> int:
    reports = []
    h = variational.solve_h_star(variational.ising_system(args.d), np.array([0.5, 0.5]))
    closed = variational.h_star_closed_form_ising(args.d)
    err = float(np.abs(h.h - closed).max())
    reports.append({"quantity": "h_star", "numeric": h.h.tolist(),
                    "closed_form": closed.tolist(), "rel_err": err})
    reports.append(variational.numeric_hessian_det(args.d).to_json_dict())
    numeric = variational.phi1_taylor_coefficients(args.d)
    closed_c = variational.phi1_taylor_closed_form(args.d)
    for key in closed_c:
        reports.append({
            "quantity": f"phi1_{key}", "numeric": numeric[key],
            "closed_form": closed_c[key],
            "rel_err": abs(numeric[key] - closed_c[key]) / abs(closed_c[key]),
        })
    _write(args.out, json.dumps(reports, indent=2) + "\n")
    return 0


def _cmd_experiment(args) -> int:
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    else:
        raw = {"experiment": args.name}
    if args.name:
        raw.setdefault("experiment", args.name)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out:
        raw["out"] = args.out
    cfg = experiments.validate_config(raw)
    result = experiments.run_experiment(cfg, threads=args.threads)
    sys.stdout.write(
        json.dumps(result.summary, indent=2, sort_keys=True,
                   default=experiments._json_default) + "\n"
    )
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="critical-ising",
        description="Critical Ising model on sparse random graphs: simulation and verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a random graph")
    _add_common(p)
    p.add_argument("--model", choices=[REGULAR, ER], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--format", choices=["json", "edgelist"], default="json")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("census", help="cycle/path census of a graph file")
    _add_common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--graph-id", default="g0")
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--ell", type=int, default=0, help="path length (0 = skip)")
    p.add_argument("--d", type=float, default=3.0, help="degree parameter for normalization")
    p.set_defaults(fn=_cmd_census)

    p = sub.add_parser("exact", help="exact partition sums by magnetization")
    _add_common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--law", action="store_true", help="emit the magnetization law CSV")
    p.add_argument("--delta", action="store_true", help="print the centered free energy")
    p.set_defaults(fn=_cmd_exact)

    p = sub.add_parser("mcmc", help="Glauber chain: trace, moments, or log Z")
    _add_common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--burn-in", type=float, default=1e3)
    p.add_argument("--sample-gap", type=float, default=4.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--log-z", action="store_true", help="thermodynamic integration")
    p.add_argument("--grid", type=int, default=12)
    p.set_defaults(fn=_cmd_mcmc)

    p = sub.add_parser("planted", help="planted-measure reweighting at small n")
    _add_common(p)
    p.add_argument("--model", choices=[REGULAR, ER], default=ER)
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--d", type=float, default=2.0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(fn=_cmd_planted)

    p = sub.add_parser("limits", help="limit laws: tables and samples")
    _add_common(p)
    p.add_argument("--law", choices=["reg", "component", "mixture", "free-energy"],
                   required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--i-max", type=int, default=40)
    p.add_argument("--sample", type=int, default=0, help="draw this many samples")
    p.set_defaults(fn=_cmd_limits)

    p = sub.add_parser("variational", help="fixed point / Hessian / Taylor report")
    _add_common(p)
    p.add_argument("--d", type=int, default=3)
    p.set_defaults(fn=_cmd_variational)

    p = sub.add_parser("experiment", help="run a registered experiment")
    _add_common(p)
    p.add_argument("--name", default=None, help="registered experiment name")
    p.set_defaults(fn=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "experiment" and args.seed is None:
        args.seed = 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
