"""Command-line front end. Every command prints one JSON document."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .calculus import betti_numbers, euler_characteristic, forman_ricci, hodge_laplacian_matrix
from .errors import ContractViolation, GraphGaugeError, ValidationError
from .gauge import Connection
from .graph import CliqueComplex, Graph, build_complex, spanning_forest
from .groups import Group
from .identities import IDENTITY_KEYS, identity_suite
from .yangmills import (
    OptimizerOptions,
    YMProblem,
    evaluate_report,
    family_distance,
    known_families,
    random_higgs,
    spanning_tree_gauge_fix,
    u1_grid_oracle,
    wrapped_distance,
    ym_optimize,
    ymh_residuals,
    ymh_value,
)

IDENTITY_TOL = 1e-10
EXIT_OK, EXIT_NOT_CONVERGED = 0, 1


@dataclass
class RunConfig:
    command: str
    graph: Path
    connection: Path | None = None
    higgs: Path | None = None
    random: bool = False
    group: str = "u1"
    n: int = 1
    seed: int = 0
    tol: float = 1e-8
    max_iter: int = 10000
    starts: int = 16
    resolution: int = 60
    order: str = "file"
    out: Path | None = None
    max_k: int | None = None
    k: int | None = None
    mode: str | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValidationError("--tol must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("--seed must be an unsigned 64-bit integer")
        for name in ("max_iter", "starts", "resolution"):
            if getattr(self, name) < 1:
                raise ValidationError(f"--{name.replace('_', '-')} must be positive")
        if self.max_k is not None and self.max_k < 0:
            raise ValidationError("--max-k must be nonnegative")

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> RunConfig:
        fields = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__ and v is not None}
        return cls(**fields)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def group_obj(self) -> Group:
        return Group(self.group, 1 if self.group.lower() == "u1" else self.n)


# Loading ---------------------------------------------------------------------


def load_complex(cfg: RunConfig) -> CliqueComplex:
    return build_complex(io.read_graph(cfg.graph, cfg.order), cfg.max_k)


def load_connection(cfg: RunConfig, cx: CliqueComplex, required: bool = True) -> Connection | None:
    if cfg.connection is not None:
        return io.read_connection(cfg.connection, cx)
    if cfg.random:
        return Connection.random(cx, cfg.group_obj(), cfg.rng())
    if required:
        raise ValidationError("give --connection PATH or --random")
    return None


# Commands --------------------------------------------------------------------


def cmd_cliques(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    return {
        "num_vertices": cx.num_vertices,
        "orientation": [list(e) for e in cx.graph.edges],
        "counts": cx.counts(),
        "cliques": [{"k": k, "size": k + 1, "simplices": [list(s) for s in cx.simplices[k]]} for k in range(cx.omega)],
    }, EXIT_OK


def _degrees(cfg: RunConfig, cx: CliqueComplex) -> list[int]:
    if cfg.k is None:
        return list(range(cx.omega))
    if not 0 <= cfg.k < max(cx.omega, 1):
        raise ValidationError(f"--k must lie in 0..{max(cx.omega - 1, 0)}")
    return [cfg.k]


def cmd_spectrum(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    k = cfg.k if cfg.k is not None else 0
    if not 0 <= k < max(cx.omega, 1):
        raise ValidationError(f"--k must lie in 0..{max(cx.omega - 1, 0)}")
    lap = hodge_laplacian_matrix(cx, k)
    ev = np.linalg.eigvalsh(lap) if lap.size else np.zeros(0)
    return {
        "degree": k,
        "basis": [list(s) for s in cx.simplices[k]] if k < cx.omega else [],
        "matrix": lap,
        "eigenvalues": np.round(ev, 12) + 0.0,
    }, EXIT_OK


def cmd_betti(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    return {"betti": betti_numbers(cx), "euler_characteristic": euler_characteristic(cx)}, EXIT_OK


def cmd_curvature(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    tables = []
    for k in _degrees(cfg, cx):
        rows = [{"simplex": list(s), "forman_ricci": forman_ricci(cx, s)} for s in cx.simplices[k]]
        tables.append({"k": k, "rows": rows})
    return {"curvature": tables}, EXIT_OK


def cmd_check(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    a = load_connection(cfg, cx)
    errors = identity_suite(a, np.random.default_rng([cfg.seed, 1]))
    worst = max(errors[k] for k in IDENTITY_KEYS)
    report = {
        "group": a.group.kind,
        "n": a.n,
        "tolerance": IDENTITY_TOL,
        "identities": {k: errors[k] for k in IDENTITY_KEYS},
        "curvature_max_abs": errors["curvature_max_abs"],
        "flat": bool(errors["curvature_max_abs"] <= 1e-12),
        "max_error": worst,
        "passed": bool(worst < IDENTITY_TOL),
    }
    if not report["passed"]:
        failing = [k for k in IDENTITY_KEYS if errors[k] >= IDENTITY_TOL]
        raise ContractViolation(f"identities violated: {failing}")
    return report, EXIT_OK


def _grid_summary(cfg: RunConfig, cx: CliqueComplex) -> dict:
    grid = u1_grid_oracle(cx, cfg.resolution)
    out = {
        "resolution": grid.resolution,
        "tolerance": grid.tol,
        "free_edges": [list(e) for e in grid.free_edges],
        "num_passes": int(len(grid.indices)),
        "passes": [
            {"indices": idx, "angles": ang, "residual": float(r)}
            for idx, ang, r in zip(grid.indices.tolist(), grid.angles.tolist(), grid.residual)
        ],
    }
    g = cx.graph
    for name in ("K3", "K4"):
        ref = Graph.complete(int(name[1]))
        if g.num_vertices == ref.num_vertices and set(g.edges) == set(ref.edges) and len(grid.indices):
            fams = known_families(name)
            dist, which = family_distance(grid.angles, fams)
            tol = 2 * grid.step
            out["families"] = {
                "graph": name,
                "membership_tolerance": tol,
                "counts": {f.name: int(np.sum((which == i) & (dist <= tol))) for i, f in enumerate(fams)},
                "unassigned": int(np.sum(dist > tol)),
                "max_distance": float(dist.max()),
            }
            if name == "K4":
                special = np.array([[np.pi / 2, -np.pi / 2, np.pi / 2], [-np.pi / 2, np.pi / 2, -np.pi / 2]])
                near = [bool(np.any(wrapped_distance(grid.angles, p) <= tol)) for p in special]
                out["families"]["intersection_points_found"] = near
    return out


def cmd_ym(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    mode = cfg.mode
    if mode == "grid":
        if cfg.group.lower() != "u1":
            raise ValidationError("grid mode scans U(1) connections only")
        return _grid_summary(cfg, cx), EXIT_OK
    if mode in ("eval", "residual"):
        a = load_connection(cfg, cx)
        report = evaluate_report(a, mode, tol=cfg.tol)
        out = io.ym_report_to_json(report)
        if mode == "residual":
            out["residual_matrices"] = [
                {"u": u, "v": v, "matrix": io._complex_matrix(m)} for (u, v), m in report.residuals.items()
            ]
        return out, EXIT_OK
    initial = load_connection(cfg, cx, required=False) if cfg.connection is not None else None
    problem = YMProblem(cx, initial.group if initial is not None else cfg.group_obj(), initial)
    opts = OptimizerOptions(tol=cfg.tol, max_iter=cfg.max_iter, starts=cfg.starts, seed=cfg.seed)
    report = ym_optimize(problem, mode, opts)
    return io.ym_report_to_json(report), EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_gauge_fix(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    a = load_connection(cfg, cx)
    forest = spanning_forest(cx.graph)
    fixed, g = spanning_tree_gauge_fix(a, forest)
    return {
        "tree_edges": [list(e) for e in forest.tree_edges],
        "connection": io.connection_to_json(fixed),
        "gauge": io.gauge_to_json(g),
    }, EXIT_OK


def cmd_ymh(cfg: RunConfig) -> tuple[dict, int]:
    cx = load_complex(cfg)
    a = load_connection(cfg, cx)
    if cfg.higgs is not None:
        phi = io.read_higgs(cfg.higgs, cx, a.n)
    elif cfg.random:
        phi = random_higgs(cx, a.group, np.random.default_rng([cfg.seed, 2]))
    else:
        raise ValidationError("give --higgs PATH or --random")
    out = {"value": ymh_value(a, phi)}
    if cfg.mode == "residual":
        edge, vertex = ymh_residuals(a, phi)
        out["edge_residuals"] = [
            {"u": u, "v": v, "norm": float(np.linalg.norm(m, 2)), "matrix": io._complex_matrix(m)}
            for (u, v), m in edge.items()
        ]
        out["vertex_residuals"] = [
            {"v": v, "norm": float(np.linalg.norm(x)), "value": [[float(z.real), float(z.imag)] for z in x]}
            for v, x in enumerate(vertex)
        ]
    return out, EXIT_OK


COMMANDS = {
    "cliques": cmd_cliques,
    "spectrum": cmd_spectrum,
    "betti": cmd_betti,
    "curvature": cmd_curvature,
    "check": cmd_check,
    "ym": cmd_ym,
    "gauge-fix": cmd_gauge_fix,
    "ymh": cmd_ymh,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", type=Path, required=True, help="edge-list file")
    common.add_argument("--order", choices=["file", "natural"], default="file")
    common.add_argument("--max-k", type=int, dest="max_k", help="largest simplex degree to enumerate")
    common.add_argument("--out", type=Path, help="write JSON here instead of stdout")

    conn = argparse.ArgumentParser(add_help=False)
    conn.add_argument("--connection", type=Path)
    conn.add_argument("--random", action="store_true", help="draw a Haar-random connection")
    conn.add_argument("--group", type=str.lower, choices=["u1", "on", "un"], default="u1")
    conn.add_argument("--n", type=int, default=1, help="fibre dimension for on/un")
    conn.add_argument("--seed", type=int, default=0)

    solve = argparse.ArgumentParser(add_help=False)
    solve.add_argument("--tol", type=float, default=1e-8)
    solve.add_argument("--max-iter", type=int, dest="max_iter", default=10000)
    solve.add_argument("--starts", type=int, default=16)
    solve.add_argument("--resolution", type=int, default=60)

    parser = argparse.ArgumentParser(prog="graphgauge", description="Gauge theory on graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("cliques", parents=[common], help="clique census")
    for name in ("spectrum", "curvature"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--k", type=int)
    sub.add_parser("betti", parents=[common])
    sub.add_parser("check", parents=[common, conn], help="identity battery")
    p = sub.add_parser("ym", parents=[common, conn, solve], help="Yang-Mills functional and solver")
    p.add_argument("mode", choices=["eval", "residual", "minimize", "maximize", "grid"])
    sub.add_parser("gauge-fix", parents=[common, conn])
    p = sub.add_parser("ymh", parents=[common, conn], help="Yang-Mills-Higgs functional")
    p.add_argument("mode", choices=["eval", "residual"])
    p.add_argument("--higgs", type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.from_args(args)
        payload, code = COMMANDS[args.command](cfg)
    except GraphGaugeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, TypeError, KeyError) as exc:
        print(f"internal error: {exc!r}", file=sys.stderr)
        return ContractViolation.exit_code
    text = io.dumps(payload)
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
