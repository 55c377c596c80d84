"""Join two small complete graphs by a path and check the product structure of solutions."""

import argparse

from graphgauge.graph import Graph
from graphgauge.yangmills import path_join_product_check


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--left", type=int, choices=[3, 4], default=3)
    parser.add_argument("--right", type=int, choices=[3, 4], default=3)
    parser.add_argument("--path-len", type=int, default=2)
    parser.add_argument("--samples", type=int, default=4)
    parser.add_argument("--resolution", type=int, default=None, help="also scan the joined graph on a grid")
    args = parser.parse_args()

    rep = path_join_product_check(
        Graph.complete(args.left), Graph.complete(args.right), args.path_len, args.samples, resolution=args.resolution
    )
    print(f"{rep.pairs} product pairs, max residual {rep.max_residual:.3e}, passed={rep.passed}")
    if rep.grid is not None:
        print(f"grid {rep.grid.resolution}: {len(rep.grid.indices)} passes, {rep.extras} outside the product set")


if __name__ == "__main__":
    main()
