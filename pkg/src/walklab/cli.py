"""``walklab`` command line: mbfs, resistance, indices, paths2, experiment, sample."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

from . import __version__
from .edgelist import format_edgelist, read_edgelist, write_edgelist
from .electrical import (distance_resistance_bound, exact_resistance, resistance_lower_bound,
                         resistance_upper_bound_formula)
from .errors import WalklabError
from .experiment import (CHECKS, INDICES, ExperimentConfig, emit, load_config,
                         records_to_csv, records_to_json, run_experiment)
from .graph import Graph, sample_connected_gnp, sample_gnp
from .mbfs import (b_event_holds, check_strong_k_path, prune, pruned_to_dict, result_to_dict,
                   run_mbfs, scan_k, trace_to_dict)
from .paths import paths2_bracket
from .walks import full_report


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I:J, got {text!r}") from None


def _pairs(text: str) -> list[tuple[int, int]]:
    return [_pair(t) for t in text.split(",") if t]


def _roots(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected U,V, got {text!r}") from None


def _csv_list(choices):
    def parse(text: str) -> tuple[str, ...]:
        items = tuple(t.strip() for t in text.split(",") if t.strip())
        bad = [t for t in items if t not in choices]
        if bad:
            raise argparse.ArgumentTypeError(f"unknown entries {bad}; choose from {choices}")
        return items
    return parse


def _edge_density(g: Graph) -> float:
    return 2.0 * g.m / (g.n * (g.n - 1)) if g.n > 1 else 0.0


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _witness_for(g: Graph, i: int, j: int, d: int, k: int | None):
    trace = run_mbfs(g, (i, j))
    pruned = prune(trace, d)
    if k is None:
        k, result = scan_k(g, trace, pruned, _edge_density(g))
    else:
        result = check_strong_k_path(g, trace, pruned, k)
    return trace, pruned, k, result


def cmd_mbfs(args) -> int:
    g = read_edgelist(args.graph)
    u, v = args.roots
    trace, pruned, k, result = _witness_for(g, u, v, args.d, None if args.scan_k else args.k)
    bu, bv, both = b_event_holds(pruned)
    doc = {
        "graph": {"n": g.n, "m": g.m},
        "trace": trace_to_dict(trace),
        "pruned": pruned_to_dict(pruned),
        "b_event": {"u": bu, "v": bv, "joint": both},
        "k": k,
        "result": result_to_dict(result),
    }
    json.dump(doc, sys.stdout, indent=args.indent)
    sys.stdout.write("\n")
    return 0


def cmd_resistance(args) -> int:
    g = read_edgelist(args.graph)
    bounds = set(args.bound or ("lemma", "lower", "distance"))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["i", "j", "R_exact", "residual", "lower_bound", "lemma_bound", "distance_bound"])
    for i, j in args.pairs:
        res = exact_resistance(g, i, j)
        lower = resistance_lower_bound(g, i, j) if "lower" in bounds else None
        lemma = None
        if "lemma" in bounds:
            _, pruned, k, result = _witness_for(g, i, j, args.d, args.k)
            if result is not None and result.ok and not result.vacuous and b_event_holds(pruned)[2]:
                lemma = resistance_upper_bound_formula(pruned, k)
        dist = distance_resistance_bound(g, i, j) if "distance" in bounds else None
        w.writerow([i, j, _cell(res.value), _cell(res.residual), _cell(lower), _cell(lemma),
                    _cell(dist)])
    return 0


def cmd_indices(args) -> int:
    g = read_edgelist(args.graph)
    report = full_report(g, args.budget, pairs=args.pairs, seed=args.seed)
    if args.format == "json":
        json.dump(report.to_dict(), sys.stdout, indent=1)
        sys.stdout.write("\n")
        return 0
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["quantity", "i", "j", "value"])
    for name, i, j, val in report.rows():
        w.writerow([name, _cell(i), _cell(j), _cell(val)])
    return 0


def cmd_paths2(args) -> int:
    g = read_edgelist(args.graph)
    i, j = args.pair
    _, pruned, k, result = _witness_for(g, i, j, args.d, args.k)
    witness = result if result is not None and result.ok else None
    br = paths2_bracket(g, i, j, args.l, witness=witness, pruned=pruned, exact=args.exact)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["i", "j", "k", "l", "lower", "upper_menger", "upper_gamma2", "gamma2_flag",
                "exact"])
    w.writerow([i, j, _cell(k), _cell(br.l), br.lower, br.upper_menger, br.upper_gamma2,
                _cell(br.gamma2_valid), _cell(br.exact)])
    return 0


def cmd_experiment(args) -> int:
    overrides = {
        "n": args.n, "p": args.p, "np_": args.np, "trials": args.trials,
        "pairs_per_trial": args.pairs, "master_seed": args.seed, "d": args.d,
        "k_mode": args.k_mode, "regime": args.regime, "indices": args.indices,
        "theorem_checks": args.checks, "f": args.f, "resconc_ii_form": args.resconc_ii_form,
        "output": args.out, "format": args.format, "workers": args.workers,
        "max_attempts": args.max_attempts,
    }
    if args.config:
        config = load_config(args.config, **overrides)
    else:
        if args.n is None:
            raise WalklabError("--n is required without --config")
        config = ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
    records, summary = run_experiment(config)
    if config.output:
        rec_path, sum_path = emit(records, summary, config.format, config.output)
        print(f"wrote {rec_path} and {sum_path}", file=sys.stderr)
    elif config.format == "csv":
        sys.stdout.write(records_to_csv(records))
    else:
        sys.stdout.write(records_to_json(records))
    return 0


def cmd_sample(args) -> int:
    if args.connected:
        g = sample_connected_gnp(args.n, args.p, args.seed, args.max_attempts).graph
    else:
        g = sample_gnp(args.n, args.p, args.seed)
    if args.out:
        write_edgelist(g, args.out)
    else:
        sys.stdout.write(format_edgelist(g))
    return 0


def _f_value(text: str):
    return text if text == "loglog" else float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walklab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"walklab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mbfs", help="two-root clash-removing search, pruned sets, k-path witness")
    p.add_argument("--graph", required=True)
    p.add_argument("--roots", required=True, type=_roots, help="U,V")
    p.add_argument("--d", type=int, default=1)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--k", type=int)
    grp.add_argument("--scan-k", action="store_true", help="smallest succeeding k (default)")
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--indent", type=int, default=None)
    p.set_defaults(func=cmd_mbfs)

    p = sub.add_parser("resistance", help="exact effective resistance and bounds")
    p.add_argument("--graph", required=True)
    p.add_argument("--pairs", required=True, type=_pairs, help="i:j[,i:j...]")
    p.add_argument("--bound", action="append", choices=["lemma", "lower", "distance"],
                   help="bounds to report (repeatable; default all)")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--k", type=int, help="depth for the lemma bound (default: scan)")
    p.set_defaults(func=cmd_resistance)

    p = sub.add_parser("indices", help="random-walk indices of one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--pairs", type=_pairs)
    p.add_argument("--budget", type=int, help="sample this many ordered pairs for h and kappa")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("paths2", help="bracket the disjoint-path count paths_2(i,j,l)")
    p.add_argument("--graph", required=True)
    p.add_argument("--pair", required=True, type=_pair, help="I:J")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--exact", action="store_true", help="brute force (n <= 12)")
    p.add_argument("--l", type=int, help="length cap")
    p.set_defaults(func=cmd_paths2)

    p = sub.add_parser("experiment", help="Monte Carlo trials on G(n,p)")
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--n", type=int)
    dens = p.add_mutually_exclusive_group()
    dens.add_argument("--p", type=float)
    dens.add_argument("--np", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--pairs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--k-mode", choices=["recommended", "scan"])
    p.add_argument("--regime", choices=["sparse", "dense"])
    p.add_argument("--indices", type=_csv_list(INDICES))
    p.add_argument("--checks", type=_csv_list(CHECKS))
    p.add_argument("--f", type=_f_value, help="constant or 'loglog'")
    p.add_argument("--resconc-ii-form", choices=["displayed", "proof"])
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--workers", type=int)
    p.add_argument("--max-attempts", type=int)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sample", help="write a G(n,p) sample as an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--connected", action="store_true")
    p.add_argument("--max-attempts", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WalklabError, OSError) as exc:
        print(f"walklab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
