"""Run the identity battery over random graphs and report the worst error per identity."""

import argparse

import numpy as np

from graphgauge.gauge import Connection
from graphgauge.graph import build_complex, random_graph
from graphgauge.groups import Group
from graphgauge.identities import IDENTITY_KEYS, identity_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--graphs", type=int, default=50)
    parser.add_argument("--max-vertices", type=int, default=10)
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    groups = [Group("U1"), Group("Un", 2), Group("On", 3)]
    worst = dict.fromkeys(IDENTITY_KEYS, 0.0)
    for _ in range(args.graphs):
        cx = build_complex(random_graph(int(rng.integers(2, args.max_vertices + 1)), args.p, rng))
        for group in groups:
            errs = identity_suite(Connection.random(cx, group, rng), rng)
            for k in IDENTITY_KEYS:
                worst[k] = max(worst[k], errs[k])
    for k in IDENTITY_KEYS:
        print(f"{k:38s} {worst[k]:.2e}")


if __name__ == "__main__":
    main()
