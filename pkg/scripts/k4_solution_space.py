"""Scan U(1) connections on K4 in tree gauge and sort the solutions into families."""

import argparse

import numpy as np

from graphgauge.graph import Graph, build_complex
from graphgauge.yangmills import family_distance, known_families, u1_grid_oracle, wrapped_distance


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolution", type=int, default=60)
    parser.add_argument("--plot", help="save a 3-D scatter of the passing points to this file")
    args = parser.parse_args()

    cx = build_complex(Graph.complete(4))
    fams = known_families("K4")
    grid = u1_grid_oracle(cx, args.resolution)
    dist, which = family_distance(grid.angles, fams)
    tol = 2 * grid.step
    print(f"free edges {grid.free_edges}; {len(grid.indices)} passes at tolerance {grid.tol:.3g}")
    for i, fam in enumerate(fams):
        print(f"  {fam.name:24s} {int(np.sum((which == i) & (dist <= tol))):5d}")
    print(f"  unassigned               {int(np.sum(dist > tol)):5d}  (max distance {dist.max():.3g} rad)")
    for p in ([np.pi / 2, -np.pi / 2, np.pi / 2], [-np.pi / 2, np.pi / 2, -np.pi / 2]):
        hit = np.any(wrapped_distance(grid.angles, p) <= tol)
        print(f"  intersection {np.round(p, 4).tolist()}: {'found' if hit else 'missing'}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig = plt.figure(figsize=(6, 6))
        ax = fig.add_subplot(projection="3d")
        ax.scatter(*np.mod(grid.angles, 2 * np.pi).T, c=which, s=4, cmap="tab10")
        ax.set_xlabel("theta(1,2)")
        ax.set_ylabel("theta(1,3)")
        ax.set_zlabel("theta(2,3)")
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
