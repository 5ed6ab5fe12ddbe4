"""Command-line front end.

Subcommands: generate, fit, bounds, min-nodes, select-k, experiment.  Every
randomized command takes --seed and is bit-reproducible (the package pins
BLAS thread pools, so outputs are identical across machines' thread
configurations).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import ClassLabels, accuracy
from .experiments import EXPERIMENTS, run_fit
from .generator import balanced_labels, planted_partition, sample_labels, sample_multigraph
from .core import ProbArray
from .theory_bounds import exact_sigma_gap, lemma3_bound, min_nodes_k2, theory_report
from .variational import VemOptions, select_k

_RANDOMIZED_METHODS = {"spectral", "vem", "local-mle", "majority-spectral", "majority-vem"}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msbm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a planted-partition multigraph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--t", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--p-in", type=float)
    g.add_argument("--p-out", type=float)
    g.add_argument("--p-file", help="probability-array JSON instead of --p-in/--p-out")
    g.add_argument("--pi", help="comma-separated class probabilities (default: balanced blocks)")
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--labels-out", help="labels CSV path (default: <output>.labels.csv)")

    f = sub.add_parser("fit", help="estimate class labels")
    f.add_argument("-i", "--input", required=True)
    f.add_argument(
        "--method",
        required=True,
        choices=["spectral", "vem", "exact-mle", "local-mle", "majority-spectral", "majority-vem"],
    )
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--seed", type=int)
    f.add_argument("--truth")
    f.add_argument("--restarts", type=int)
    f.add_argument("--tol", type=float)
    f.add_argument("--max-iter", type=int)
    f.add_argument("-o", "--output")

    b = sub.add_parser("bounds", help="margin, separation, and bound constants / curves")
    b.add_argument("-i", "--input", help="probability-array JSON")
    b.add_argument("--p", type=float, help="emit a bound-vs-exact curve for this probability")
    b.add_argument("--n-min", type=int, default=10)
    b.add_argument("--n-max", type=int, default=1000)
    b.add_argument("--n-step", type=int, default=10)
    b.add_argument("-o", "--output")

    m = sub.add_parser("min-nodes", help="minimum 2-class problem size for (c0, delta)")
    m.add_argument("--c0", type=float, required=True)
    m.add_argument("--delta", type=float, required=True)

    s = sub.add_parser("select-k", help="sweep K and pick the lowest ICL")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--k-min", type=int, required=True)
    s.add_argument("--k-max", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--restarts", type=int)
    s.add_argument("-o", "--output")

    e = sub.add_parser("experiment", help="run a named replication study")
    e.add_argument("--name", required=True, choices=sorted(EXPERIMENTS))
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--reps", type=int)
    e.add_argument("-o", "--output", required=True)
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_generate(args) -> int:
    if args.p_file:
        P = io.read_prob_array(args.p_file)
        if P.num_classes != args.k:
            raise ValueError("--k disagrees with the probability file")
        if P.num_layers != args.t:
            raise ValueError("--t disagrees with the probability file")
    else:
        if args.p_in is None or args.p_out is None:
            raise ValueError("need --p-in and --p-out (or --p-file)")
        M = planted_partition(args.k, args.p_in, args.p_out)
        P = ProbArray(np.repeat(M[None], args.t, axis=0))
    if args.pi:
        pi = [float(x) for x in args.pi.split(",")]
        if len(pi) != args.k:
            raise ValueError("--pi must list one probability per class")
        c = sample_labels(pi, args.n, args.seed + 1)
    else:
        c = balanced_labels(args.k, args.n)
    G = sample_multigraph(c, P, args.seed)
    io.write_mgr(G, args.output)
    labels_path = args.labels_out or str(Path(args.output).with_suffix("")) + ".labels.csv"
    io.write_labels(c, labels_path)
    return 0


def _cmd_fit(args) -> int:
    G = io.read_mgr(args.input)
    if args.method in _RANDOMIZED_METHODS and args.seed is None:
        raise ValueError(f"--seed is required for method {args.method}")
    seed = args.seed if args.seed is not None else 0
    result = run_fit(
        G, args.k, args.method, seed, restarts=args.restarts, tol=args.tol, max_iter=args.max_iter
    )
    acc = None
    if args.truth:
        truth = io.read_labels(args.truth, num_classes=args.k)
        acc = accuracy(result.labels, truth)
    _emit(io.fit_result_json(result, acc), args.output)
    return 0


def _cmd_bounds(args) -> int:
    if args.p is not None:
        rows = ["n,p,exact_gap,bound"]
        for n in range(args.n_min, args.n_max + 1, args.n_step):
            rows.append(f"{n},{args.p!r},{exact_sigma_gap(n, args.p)!r},{lemma3_bound(n, args.p)!r}")
        _emit("\n".join(rows), args.output)
        return 0
    if not args.input:
        raise ValueError("need -i (probability array) or --p (bound curve)")
    P = io.read_prob_array(args.input)
    rep = theory_report(P)
    obj = {
        "c0": rep.c0,
        "delta": rep.delta,
        "m0": rep.m0,
        "m1": rep.m1,
        "m2": rep.m2,
        "m3": rep.m3,
        "m4": rep.m4,
    }
    _emit(json.dumps(obj), args.output)
    return 0


def _cmd_select_k(args) -> int:
    G = io.read_mgr(args.input)
    kw = {"seed": args.seed}
    if args.restarts:
        kw["restarts"] = args.restarts
    best_k, table = select_k(G, args.k_min, args.k_max, VemOptions(**kw))
    obj = {
        "best_k": best_k,
        "table": [{"k": k, "elbo": e, "icl": i} for k, e, i in table],
    }
    _emit(json.dumps(obj), args.output)
    return 0


def _cmd_experiment(args) -> int:
    fn = EXPERIMENTS[args.name]
    kwargs = {}
    if args.name not in ("fig2", "table1"):
        kwargs["seed"] = args.seed
        if args.reps:
            kwargs["reps"] = args.reps
    rows, columns = fn(**kwargs)
    io.write_csv(rows, columns, args.output)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "fit": _cmd_fit,
        "bounds": _cmd_bounds,
        "min-nodes": lambda a: (print(min_nodes_k2(a.c0, a.delta)), 0)[1],
        "select-k": _cmd_select_k,
        "experiment": _cmd_experiment,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"msbm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
