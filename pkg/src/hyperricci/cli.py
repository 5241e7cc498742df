"""Command line: cluster, generate, eval, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import io
from .benchmarks import NMI_FIELDS, TIMING_FIELDS, SweepSpec, TimingSpec, run_nmi_sweep, run_timing_bench
from .clustering import Criterion, ThresholdCriterion, cluster, nmi
from .curvature import Aggregation, CurvatureConfig, MeasureVariant, parse_solver
from .flow import FlowConfig, Method
from .hypergraph import HypergraphError, WeightingScheme
from .synthgen import HsbmParams, gen_hsbm, gen_toy
from .transport import TransportError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("hyperricci")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperricci", description="Ricci-flow clustering of hypergraphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cluster", help="run a flow and cut the hypergraph into communities")
    c.add_argument("--input", required=True, type=Path)
    c.add_argument("--labels", type=Path)
    c.add_argument("--method", choices=[m.value for m in Method], default="edge")
    c.add_argument("--weighting", choices=[w.value for w in WeightingScheme], default="jaccard")
    c.add_argument("--agg", choices=[a.value for a in Aggregation], default="max")
    c.add_argument("--alpha", type=float, default=0.5)
    c.add_argument("--p", type=float, default=1.0)
    c.add_argument("--iters", type=int, default=20)
    c.add_argument("--tau", default="auto-h", help="auto-h, auto-c, auto-nmi or a number")
    c.add_argument("--solver", default="exact", help="exact or sinkhorn:<eps>")
    c.add_argument("--measure", choices=[v.value for v in MeasureVariant], default="standard")
    c.add_argument("--out", type=Path)

    g = sub.add_parser("generate", help="write a synthetic hypergraph and its labels")
    gsub = g.add_subparsers(dest="model", required=True, parser_class=_Parser)
    toy = gsub.add_parser("toy")
    toy.add_argument("--a", type=int, required=True)
    toy.add_argument("--b", type=int, required=True)
    toy.add_argument("--out", type=Path, required=True)
    hs = gsub.add_parser("hsbm")
    hs.add_argument("--n", type=int, required=True)
    hs.add_argument("--k", type=int, required=True)
    hs.add_argument("--s-in", type=int, required=True)
    hs.add_argument("--s-out", type=int, required=True)
    hs.add_argument("--n-in", type=int, required=True)
    hs.add_argument("--n-out", type=int, required=True)
    hs.add_argument("--seed", type=int, default=0)
    hs.add_argument("--n-in-per-community", action="store_true")
    hs.add_argument("--out", type=Path, required=True)

    e = sub.add_parser("eval", help="NMI of a result bundle against labels")
    e.add_argument("--pred", required=True, type=Path)
    e.add_argument("--labels", required=True, type=Path)

    b = sub.add_parser("bench", help="NMI sweep or timing benchmark")
    b.add_argument("kind", choices=["sweep", "timing"])
    b.add_argument("--spec", type=Path, help="JSON file with spec overrides")
    b.add_argument("--out", required=True, type=Path)
    return p


def labels_path(out: Path) -> Path:
    return out.with_name(out.name + ".labels")


def _flow_config(args) -> FlowConfig:
    solver, eps = parse_solver(args.solver)
    curv = CurvatureConfig(alpha=args.alpha, p=args.p, aggregation=Aggregation(args.agg),
                           solver=solver, epsilon=eps, measure_variant=MeasureVariant(args.measure))
    return FlowConfig(Method(args.method), args.iters, curv, WeightingScheme(args.weighting))


def config_echo(args, cfg: FlowConfig) -> dict:
    return {"input": str(args.input), "method": cfg.method.value, "weighting": cfg.weighting.value,
            "agg": cfg.curvature.aggregation.value, "alpha": cfg.curvature.alpha,
            "p": cfg.curvature.p, "iters": cfg.iterations, "tau": args.tau, "solver": args.solver,
            "measure": cfg.curvature.measure_variant.value}


def cmd_cluster(args) -> int:
    try:
        cfg = _flow_config(args)
        criterion = ThresholdCriterion.parse(args.tau)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    loaded = io.parse_hypergraph(args.input)
    truth = None
    if args.labels:
        truth = io.labels_for(loaded.tokens, io.parse_labels(args.labels))
    if criterion.kind is Criterion.NMI and truth is None:
        raise InputError("--tau auto-nmi needs --labels")
    t0 = time.perf_counter()
    result = cluster(loaded.hypergraph, cfg, criterion, truth)
    elapsed = time.perf_counter() - t0
    sel = result.threshold
    scores = {"hypergraph_modularity": next(r["hypergraph_modularity"] for r in sel.curve if r["tau"] == sel.tau),
              "communities": result.clustering.num_communities}
    if result.nmi is not None:
        scores["nmi"] = result.nmi
    bundle = io.ResultBundle(
        config=config_echo(args, cfg),
        edge_weights=result.flow.edge_weights.tolist(),
        curve=sel.curve,
        tau=sel.tau,
        labels=dict(zip(loaded.tokens, result.labels.tolist())),
        scores=scores,
        timing={"seconds": elapsed},
    )
    if args.out:
        bundle.save(args.out)
    print(f"communities {result.clustering.num_communities} tau {sel.tau!r}")
    if result.nmi is not None:
        print(f"NMI {result.nmi:.6f}")
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        if args.model == "toy":
            h, labels, _ = gen_toy(args.a, args.b)
        else:
            params = HsbmParams(args.n, args.k, args.s_in, args.s_out, args.n_in, args.n_out,
                                args.seed, args.n_in_per_community)
            h, labels = gen_hsbm(params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    tokens = [str(v) for v in range(h.n_nodes)]
    io.write_hypergraph(args.out, h, tokens)
    io.write_labels(labels_path(args.out), tokens, labels.tolist())
    print(f"wrote {h.n_nodes} nodes, {h.n_edges} hyperedges to {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    bundle = io.ResultBundle.load(args.pred)
    truth = io.parse_labels(args.labels)
    tokens = list(bundle.labels)
    pred = [bundle.labels[t] for t in tokens]
    print(f"{nmi(io.labels_for(tokens, truth), pred):.6f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    overrides = json.loads(args.spec.read_text()) if args.spec else {}
    try:
        if args.kind == "sweep":
            spec = SweepSpec.from_dict(overrides)
            rows, fields = run_nmi_sweep(spec), NMI_FIELDS
        else:
            spec = TimingSpec.from_dict(overrides)
            rows, fields = run_timing_bench(spec), TIMING_FIELDS
    except TypeError as exc:
        raise InputError(f"bad spec: {exc}") from None
    io.write_csv(args.out, fields, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


COMMANDS = {"cluster": cmd_cluster, "generate": cmd_generate, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except TransportError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, io.FormatError, HypergraphError, FileNotFoundError,
            json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
