"""Multi-start descent on the triangle: where do random U(1) starts end up?"""

import argparse
from collections import Counter

import numpy as np

from graphgauge.graph import Graph, build_complex
from graphgauge.groups import Group
from graphgauge.yangmills import OptimizerOptions, YMProblem, multistart, u1_grid_oracle


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--starts", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--resolution", type=int, default=360)
    args = parser.parse_args()

    cx = build_complex(Graph.complete(3))
    runs = multistart(YMProblem(cx, Group("U1")), "minimize", OptimizerOptions(starts=args.starts, seed=args.seed))
    ends = Counter(round(float(np.real(r.connection(1, 2)[0, 0])), 6) for r in runs)
    print(f"{len(runs)} starts, {sum(r.converged for r in runs)} converged")
    for z, count in sorted(ends.items()):
        print(f"  A(1,2) = {z:+.6f}: {count}")

    grid = u1_grid_oracle(cx, args.resolution)
    print(f"grid {args.resolution}: {len(grid.indices)} passing angles (deg): {sorted(set(grid.indices[:, 0].tolist()))}")


if __name__ == "__main__":
    main()
