"""Trace flow weights per edge class on the gateway toy model H(a, b)."""

import argparse

import numpy as np

from hyperricci.curvature import CurvatureConfig, MeasureVariant
from hyperricci.flow import FlowConfig, Method, run_flow
from hyperricci.hypergraph import WeightingScheme
from hyperricci.synthgen import EdgeClass, gen_toy


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--a", type=int, default=6)
    p.add_argument("--b", type=int, default=4)
    p.add_argument("--method", choices=["edge", "node"], default="edge")
    p.add_argument("--iters", type=int, default=10)
    args = p.parse_args()

    h, _, tags = gen_toy(args.a, args.b)
    if args.method == "edge":
        curv = CurvatureConfig(measure_variant=MeasureVariant.REDUCED)
    else:
        curv = CurvatureConfig(alpha=0.0, p=0.0)
    cfg = FlowConfig(Method(args.method), args.iters, curv, WeightingScheme.UNIFORM, keep_history=True)
    hist = run_flow(h, cfg).edge_history
    tags = np.array([t.value for t in tags])
    classes = [c.value for c in EdgeClass]
    print("iter " + " ".join(f"{c:>16}" for c in classes))
    for l, w in enumerate(hist):
        # every class holds a single value on this model
        print(f"{l:4d} " + " ".join(f"{w[tags == c].mean():16.10g}" for c in classes))


if __name__ == "__main__":
    main()
