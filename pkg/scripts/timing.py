"""Per-iteration cost of node vs edge flow on K-uniform hypergraphs."""

import argparse
import json

from hyperricci import io
from hyperricci.benchmarks import TIMING_FIELDS, TimingSpec, run_timing_bench, summarize


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--spec", help="JSON file with TimingSpec overrides")
    p.add_argument("--out", default="timing.csv")
    args = p.parse_args()

    spec = TimingSpec.from_dict(json.load(open(args.spec)) if args.spec else {})
    rows = run_timing_bench(spec, progress=lambda r: print(r, flush=True))
    io.write_csv(args.out, TIMING_FIELDS, rows)
    means = summarize(rows, key=("K", "method"), value="seconds")
    for k in spec.k_values:
        node, edge = means[(k, "node")][0], means[(k, "edge")][0]
        print(f"K={k}: node {node:.3g}s  edge {edge:.3g}s  ratio {node / edge:.2f}")


if __name__ == "__main__":
    main()
