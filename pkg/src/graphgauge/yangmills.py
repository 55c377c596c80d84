"""Yang-Mills and Yang-Mills-Higgs functionals on graphs, solvers and oracles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .calculus import Form, inner
from .errors import ContractViolation, UnsupportedPotential, ValidationError
from .gauge import (
    Connection,
    GaugeTransformation,
    connection_laplacian_k0,
    covariant_derivative_section,
    curvature,
    d_A_star_end,
    end_eval,
    end_inner,
    gauge_act_connection,
    wilson_curvature,
)
from .graph import CliqueComplex, Graph, SpanningForest, build_complex, spanning_forest, tree_distance
from .groups import REPROJECT_TOL, Group, adjoint, polar_projection, skew

log = logging.getLogger(__name__)

FORMULA_TOL = 1e-10
Edge = tuple[int, int]


# Functional ------------------------------------------------------------------


def wilson_action(a: Connection) -> float:
    """(1/2) sum_{i<j<k} Tr(2 - F~ - F~^dagger) over sorted triangles."""
    cx = a.complex
    n = a.n
    total = 0.0
    for tri in cx.simplices[2] if cx.omega > 2 else ():
        hol = a(tri[0], tri[1]) @ a(tri[1], tri[2]) @ a(tri[2], tri[0])
        total += 0.5 * float(np.real(np.trace(2 * np.eye(n) - hol - hol.conj().T)))
    return total


def ym_value(a: Connection) -> float:
    """(1/2) <F, F>, cross-checked against the Wilson form."""
    F = curvature(a)
    value = 0.5 * float(np.real(end_inner(F, F)))
    wilson = wilson_action(a)
    if abs(value - wilson) > FORMULA_TOL * max(1.0, abs(value)):
        raise ContractViolation(f"<F,F>/2 = {value!r} but Wilson action = {wilson!r}")
    return value


def ym_upper_bound(a: Connection) -> float:
    """2 n omega_3."""
    return 2.0 * a.n * a.complex.count(2)


def ym_residual(a: Connection) -> dict[Edge, np.ndarray]:
    """Per-edge residual sum_l F~(i,l,j) - sum_l F~(i,j,l) of the Yang-Mills equations.

    Also evaluates d_A* F(i,j) - A(i,j) d_A* F(j,i) A(i,j), which equals
    -residual(i,j) A(i,j); a mismatch is a contract violation.
    """
    cx = a.complex
    hol = wilson_curvature(a)
    dstar = d_A_star_end(a, curvature(a)) if cx.omega > 2 else None
    out = {}
    for i, j in cx.graph.edges:
        res = np.zeros((a.n, a.n), dtype=a.group.dtype)
        for l in cx.cofaces((i, j)):
            res = res + end_eval(cx, hol, (i, l, j)) - end_eval(cx, hol, (i, j, l))
        if dstar is not None:
            raw = end_eval(cx, dstar, (i, j)) - a(i, j) @ end_eval(cx, dstar, (j, i)) @ a(i, j)
            if np.max(np.abs(raw + res @ a(i, j))) > FORMULA_TOL * max(1.0, len(cx.cofaces((i, j)))):
                raise ContractViolation(f"d_A*F form of the Yang-Mills equations disagrees on edge {(i, j)}")
        out[(i, j)] = res
    return out


def residual_norms(residuals: dict[Edge, np.ndarray]) -> dict[Edge, float]:
    return {e: float(np.linalg.norm(r, 2)) for e, r in residuals.items()}


def holonomy_traces(a: Connection) -> list[tuple[tuple[int, ...], complex]]:
    cx = a.complex
    out = []
    for tri in cx.simplices[2] if cx.omega > 2 else ():
        hol = a(tri[0], tri[1]) @ a(tri[1], tri[2]) @ a(tri[2], tri[0])
        out.append((tri, complex(np.trace(hol))))
    return out


class TriangleKernel:
    """Vectorized value, residual and Riemannian gradient over edge arrays.

    Works directly on the (E, n, n) edge array so the optimizer avoids
    rebuilding Connection objects in its inner loop.
    """

    def __init__(self, cx: CliqueComplex, n: int):
        pos = {e: i for i, e in enumerate(cx.graph.edges)}
        tris = cx.simplices[2] if cx.omega > 2 else ()
        self.n = n
        self.num_edges = len(pos)
        self.ab = np.array([pos[(t[0], t[1])] for t in tris], dtype=np.intp)
        self.bc = np.array([pos[(t[1], t[2])] for t in tris], dtype=np.intp)
        self.ac = np.array([pos[(t[0], t[2])] for t in tris], dtype=np.intp)

    def _loops(self, mats):
        A_ab, A_bc, A_ac = mats[self.ab], mats[self.bc], mats[self.ac]
        return A_ab, A_bc, A_ac

    def value(self, mats: np.ndarray) -> float:
        A_ab, A_bc, A_ac = self._loops(mats)
        hol = A_ab @ A_bc @ adjoint(A_ac)
        return float(np.sum(self.n - np.real(np.trace(hol, axis1=-2, axis2=-1))))

    def residual(self, mats: np.ndarray) -> np.ndarray:
        A_ab, A_bc, A_ac = self._loops(mats)
        t = A_ab @ A_bc @ adjoint(A_ac)
        h = A_bc @ adjoint(A_ac) @ A_ab
        out = np.zeros_like(mats)
        np.add.at(out, self.ab, adjoint(t) - t)
        np.add.at(out, self.bc, adjoint(h) - h)
        np.add.at(out, self.ac, t - adjoint(t))
        return out

    def gradient(self, mats: np.ndarray) -> np.ndarray:
        """Lie-algebra gradient G with d/de YM(A exp(e xi)) = sum Re Tr(xi^dagger G)."""
        A_ab, A_bc, A_ac = self._loops(mats)
        m = np.zeros_like(mats)
        np.add.at(m, self.ab, A_bc @ adjoint(A_ac) @ A_ab)
        np.add.at(m, self.bc, adjoint(A_ac) @ A_ab @ A_bc)
        np.add.at(m, self.ac, -adjoint(A_ac) @ A_ab @ A_bc)
        return skew(m)


def ym_gradient(a: Connection) -> np.ndarray:
    """Riemannian gradient as an (E, n, n) array of Lie-algebra elements."""
    return TriangleKernel(a.complex, a.n).gradient(a.mats)


def lie_pairing(x: np.ndarray, y: np.ndarray) -> float:
    """sum over edges of Re Tr(x^dagger y)."""
    return float(np.real(np.sum(np.conj(x) * y)))


def retract(a: Connection, xi: np.ndarray, eps: float = 1.0) -> Connection:
    """A(e) -> A(e) exp(eps xi(e)) on every edge."""
    return a.with_mats(a.mats @ a.group.exp(eps * xi))


# Gauge fixing and extremal constructions -------------------------------------


def spanning_tree_gauge_fix(
    a: Connection, forest: SpanningForest | None = None
) -> tuple[Connection, GaugeTransformation]:
    """Gauge transform so that A = 1 on every edge of a spanning forest.

    g is 1 at each root and g(child) = g(parent) A(parent, child) along the tree.
    """
    cx = a.complex
    forest = forest or spanning_forest(cx.graph)
    mats = a.group.identity(cx.num_vertices)
    order = sorted(range(cx.num_vertices), key=lambda v: (forest.component[v], forest.depth[v]))
    for v in order:
        p = forest.parent[v]
        if p >= 0:
            mats[v] = mats[p] @ a(p, v)
    g = GaugeTransformation(a.group, mats)
    fixed = gauge_act_connection(g, a)
    out = fixed.mats.copy()
    eye = np.eye(a.n)
    for e in forest.tree_edges:
        pos = fixed.edge_position[e]
        if np.max(np.abs(out[pos] - eye)) > FORMULA_TOL:
            raise ContractViolation(f"tree edge {e} not trivialized")
        out[pos] = eye
    return fixed.with_mats(out), g


def tree_mask(cx: CliqueComplex, forest: SpanningForest) -> np.ndarray:
    tree = set(forest.tree_edges)
    return np.array([e in tree for e in cx.graph.edges], dtype=bool)


def max_connection(cx: CliqueComplex, forest: SpanningForest | None = None, group: Group | None = None) -> Connection:
    """A(i, j) = (-1)^(d_ij - 1), d_ij the tree distance; every triangle has holonomy -1."""
    group = group or Group("U1")
    forest = forest or spanning_forest(cx.graph)
    eye = group.identity()

    def entry(u, v):
        return (-1.0) ** (tree_distance(forest, u, v) - 1) * eye

    return Connection.from_function(cx, group, entry)


def is_trivial_endpoint(a: Connection, atol: float = 1e-6) -> bool:
    """Gauge-equivalent to A = +1 or A = -1 judged by triangle holonomy traces."""
    traces = np.array([t for _, t in holonomy_traces(a)])
    if traces.size == 0:
        return True
    return bool(np.all(np.abs(traces - a.n) < atol) or np.all(np.abs(traces + a.n) < atol))


# Optimizer -------------------------------------------------------------------


@dataclass
class OptimizerOptions:
    tol: float = 1e-8
    max_iter: int = 10000
    step: float = 0.1
    shrink: float = 0.5
    armijo: float = 1e-4
    min_step: float = 1e-14
    starts: int = 16
    seed: int = 0


@dataclass
class YMProblem:
    complex: CliqueComplex
    group: Group
    initial: Connection | None = None
    higgs: Form | None = None
    potential: str = "zero"

    def __post_init__(self):
        if self.complex.omega < 3:
            log.warning("graph has no triangles; the Yang-Mills functional vanishes identically")


@dataclass(eq=False)
class YMReport:
    value: float
    residuals: dict[Edge, np.ndarray]
    residual_norms: dict[Edge, float]
    residual_inf_norm: float
    iterations: int
    trace: list[float]
    connection: Connection
    gauge_fixed: bool
    converged: bool
    direction: str = "eval"
    gauge: GaugeTransformation | None = None
    endpoints: list[dict] = field(default_factory=list)


def evaluate_report(a: Connection, direction: str = "eval", gauge_fixed: bool = False, tol: float = 1e-8) -> YMReport:
    value = ym_value(a)
    res = ym_residual(a)
    norms = residual_norms(res)
    inf = max(norms.values(), default=0.0)
    return YMReport(value, res, norms, inf, 0, [value], a, gauge_fixed, inf < tol, direction)


def _inf_norm(res: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(res, 2, axis=(-2, -1)), initial=0.0))


def descend(
    a: Connection, direction: str = "minimize", opts: OptimizerOptions | None = None, gauge_fix: bool = True
) -> YMReport:
    """Riemannian gradient descent/ascent with Armijo backtracking.

    After spanning-tree gauge fixing only non-tree edges move; that slice meets
    every gauge orbit, so critical points of the restriction are critical
    points of the functional. Stops when the residual infinity-norm drops
    below ``opts.tol``; never raises on non-convergence.
    """
    if direction not in ("minimize", "maximize"):
        raise ValidationError(f"direction must be minimize or maximize, not {direction!r}")
    opts = opts or OptimizerOptions()
    sign = 1.0 if direction == "minimize" else -1.0
    cx = a.complex
    gauge = None
    free = np.ones(len(cx.graph.edges), dtype=bool)
    if gauge_fix:
        forest = spanning_forest(cx.graph)
        a, gauge = spanning_tree_gauge_fix(a, forest)
        free = ~tree_mask(cx, forest)
    kernel = TriangleKernel(cx, a.n)
    group = a.group
    mats = a.mats.copy()
    f = sign * kernel.value(mats)
    trace = [sign * f]
    converged = False
    it = 0
    for it in range(opts.max_iter + 1):
        inf = _inf_norm(kernel.residual(mats))
        if inf < opts.tol:
            converged = True
            break
        if it == opts.max_iter:
            break
        grad = sign * kernel.gradient(mats)
        grad[~free] = 0.0
        g2 = lie_pairing(grad, grad)
        t = opts.step
        while True:
            trial = mats @ group.exp(-t * grad)
            f_trial = sign * kernel.value(trial)
            if f_trial <= f - opts.armijo * t * g2:
                break
            # near a critical point the decrease drowns in rounding; fall back
            # to requiring a smaller residual
            if abs(f_trial - f) <= 1e-13 * max(1.0, abs(f)) and _inf_norm(kernel.residual(trial)) < inf:
                break
            t *= opts.shrink
            if t < opts.min_step:
                trial = None
                break
        if trial is None:
            log.info("line search stalled at iteration %d", it)
            break
        mats = trial
        if group.unitarity_defect(mats) > REPROJECT_TOL:
            mats = polar_projection(mats)
        f = sign * kernel.value(mats)
        trace.append(sign * f)
    final = a.with_mats(mats)
    report = evaluate_report(final, direction, gauge_fix, opts.tol)
    report.iterations = it
    report.trace = trace
    report.converged = converged and report.residual_inf_norm < opts.tol * 10
    report.gauge = gauge
    return report


def random_starts(cx: CliqueComplex, group: Group, starts: int, seed: int) -> list[Connection]:
    seqs = np.random.SeedSequence(seed).spawn(starts)
    return [Connection.random(cx, group, np.random.default_rng(s)) for s in seqs]


def endpoint_signature(report: YMReport, digits: int = 6) -> tuple:
    traces = sorted((round(t.real, digits) + 0.0, round(t.imag, digits) + 0.0) for _, t in holonomy_traces(report.connection))
    return (round(report.value, digits) + 0.0, tuple(traces))


def cluster_endpoints(reports: Sequence[YMReport]) -> list[dict]:
    groups: dict[tuple, dict] = {}
    for r in reports:
        sig = endpoint_signature(r)
        entry = groups.setdefault(sig, {
            "value": r.value,
            "holonomy_traces": [list(t) for t in sig[1]],
            "count": 0,
            "converged": 0,
            "trivial": is_trivial_endpoint(r.connection),
        })
        entry["count"] += 1
        entry["converged"] += int(r.converged)
    return list(groups.values())


def multistart(problem: YMProblem, direction: str, opts: OptimizerOptions | None = None) -> list[YMReport]:
    opts = opts or OptimizerOptions()
    starts = random_starts(problem.complex, problem.group, opts.starts, opts.seed)
    if problem.initial is not None:
        starts = [problem.initial] + starts[: max(opts.starts - 1, 0)]
    return [descend(a, direction, opts) for a in starts]


def ym_optimize(problem: YMProblem, direction: str = "minimize", opts: OptimizerOptions | None = None) -> YMReport:
    """Multi-start optimization; returns the best run with all distinct endpoints attached."""
    opts = opts or OptimizerOptions()
    runs = multistart(problem, direction, opts)
    sign = 1.0 if direction == "minimize" else -1.0
    best = min(runs, key=lambda r: (not r.converged, sign * r.value))
    best.endpoints = cluster_endpoints(runs)
    return best


# Brute-force U(1) oracle -----------------------------------------------------


@dataclass(eq=False)
class GridResult:
    free_edges: list[Edge]
    resolution: int
    tol: float
    indices: np.ndarray
    residual: np.ndarray

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * self.indices / self.resolution

    @property
    def step(self) -> float:
        return 2 * np.pi / self.resolution


def u1_grid_oracle(
    cx: CliqueComplex,
    resolution: int,
    tol: float | None = None,
    forest: SpanningForest | None = None,
    max_free: int = 4,
    chunk: int = 200_000,
) -> GridResult:
    """Scan U(1) connections in spanning-tree gauge on a uniform angle grid.

    Uses its own phase arithmetic (sines of triangle phases), independent of
    the matrix residual path. The default tolerance 10/resolution allows for
    solution curves passing between grid points.
    """
    forest = forest or spanning_forest(cx.graph)
    tree = set(forest.tree_edges)
    free = [e for e in cx.graph.edges if e not in tree]
    if len(free) > max_free:
        raise ValidationError(
            f"{len(free)} non-tree edges; the grid has resolution^{len(free)} points, refusing above {max_free}"
        )
    tol = 10.0 / resolution if tol is None else tol
    E = len(cx.graph.edges)
    pos = {e: i for i, e in enumerate(cx.graph.edges)}
    tris = cx.simplices[2] if cx.omega > 2 else ()
    T = len(tris)
    inc = np.zeros((T, E))
    phase = np.zeros((E, T))
    for t, (a, b, c) in enumerate(tris):
        phase[pos[(a, b)], t] += 1
        phase[pos[(b, c)], t] += 1
        phase[pos[(a, c)], t] -= 1
        inc[t, pos[(a, b)]] += 1
        inc[t, pos[(b, c)]] += 1
        inc[t, pos[(a, c)]] -= 1
    free_pos = np.array([pos[e] for e in free], dtype=np.intp)
    m = len(free)
    total = resolution**m
    hits_idx, hits_res = [], []
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = np.stack(np.unravel_index(flat, (resolution,) * m), axis=1) if m else np.zeros((len(flat), 0), int)
        theta = np.zeros((len(flat), E))
        theta[:, free_pos] = 2 * np.pi * idx / resolution
        r = 2 * np.abs(np.sin(theta @ phase) @ inc)
        worst = r.max(axis=1) if E else np.zeros(len(flat))
        keep = worst < tol
        hits_idx.append(idx[keep])
        hits_res.append(worst[keep])
    return GridResult(free, resolution, tol, np.concatenate(hits_idx), np.concatenate(hits_res))


def wrapped_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Max-norm distance on the torus (R / 2 pi)^m."""
    diff = (np.asarray(x) - np.asarray(y) + np.pi) % (2 * np.pi) - np.pi
    return np.max(np.abs(diff), axis=-1)


# Known U(1) solution families -------------------------------------------------


@dataclass(frozen=True)
class SolutionFamily:
    """Spanning-tree-gauge U(1) solutions; ``angles(alpha)`` gives the free-edge angles.

    Zero-parameter families list their members as the ``points`` parameter values.
    """

    name: str
    n_params: int
    free_edges: tuple[Edge, ...]
    angles: Callable[[float], tuple[float, ...]]
    points: tuple[float, ...] = ()

    def parameters(self, samples: int = 16) -> np.ndarray:
        if self.n_params == 0:
            return np.array(self.points)
        return 2 * np.pi * np.arange(samples) / samples

    def connection(self, cx: CliqueComplex, alpha: float) -> Connection:
        return u1_tree_gauge_connection(cx, dict(zip(self.free_edges, self.angles(alpha))))

    def curve(self, samples: int = 3600) -> np.ndarray:
        return np.array([self.angles(t) for t in self.parameters(samples)])


def u1_tree_gauge_connection(cx: CliqueComplex, angles: dict[Edge, float]) -> Connection:
    """U(1) connection e^{i theta} on the listed edges, identity elsewhere."""
    theta = np.array([angles.get(e, 0.0) for e in cx.graph.edges])
    return Connection(cx, Group("U1"), np.exp(1j * theta)[:, None, None])


def named_complex(name: str) -> CliqueComplex:
    """K3 / K4 with the vertices 1..n relabelled 0..n-1 and the natural orientation."""
    sizes = {"K3": 3, "K4": 4}
    if name not in sizes:
        raise ValidationError(f"no known solution families for {name!r}; expected K3 or K4")
    return build_complex(Graph.complete(sizes[name]))


def known_families(name: str) -> list[SolutionFamily]:
    """U(1) solution families in the star spanning-tree gauge at the first vertex."""
    pi = np.pi
    if name == "K3":
        free = ((1, 2),)
        return [
            SolutionFamily("A12=+1", 0, free, lambda a: (a,), (0.0,)),
            SolutionFamily("A12=-1", 0, free, lambda a: (a,), (pi,)),
        ]
    if name == "K4":
        free = ((1, 2), (1, 3), (2, 3))
        return [
            SolutionFamily("constant +-1", 0, free, lambda a: (a, a, a), (0.0, pi)),
            SolutionFamily("A12=A13^-1=-A23^-1", 1, free, lambda a: (a, -a, pi - a)),
            SolutionFamily("A12=-A13=A23", 1, free, lambda a: (a, a + pi, a)),
            SolutionFamily("A12=-A13=-A23^-1", 1, free, lambda a: (a, a + pi, pi - a)),
        ]
    named_complex(name)
    raise AssertionError


def family_distance(points: np.ndarray, families: Sequence[SolutionFamily], samples: int = 3600):
    """Distance from each point to the nearest family, and that family's index."""
    points = np.atleast_2d(points)
    dists = np.empty((len(points), len(families)))
    for f, fam in enumerate(families):
        curve = fam.curve(samples)
        for s in range(0, len(points), 512):
            chunk = points[s : s + 512]
            dists[s : s + 512, f] = np.min(wrapped_distance(chunk[:, None, :], curve[None, :, :]), axis=1)
    return dists.min(axis=1), dists.argmin(axis=1)


# Path joins ------------------------------------------------------------------


def path_join(g1: Graph, g2: Graph, path_len: int) -> Graph:
    """g1 and g2 joined by a path of ``path_len`` edges from g1's last vertex to g2's first."""
    if path_len < 1:
        raise ValidationError("path_len must be at least 1")
    n1 = g1.num_vertices
    inner_vertices = list(range(n1, n1 + path_len - 1))
    offset = n1 + path_len - 1
    chain = [n1 - 1, *inner_vertices, offset]
    edges = list(g1.edges)
    edges += list(zip(chain, chain[1:]))
    edges += [(u + offset, v + offset) for u, v in g2.edges]
    return Graph.natural(offset + g2.num_vertices, edges)


def _family_name(g: Graph) -> str:
    n = g.num_vertices
    if n in (3, 4) and len(g.edges) == n * (n - 1) // 2:
        return f"K{n}"
    raise ValidationError("path_join_product_check needs K3 or K4 pieces")


@dataclass(eq=False)
class JoinReport:
    complex: CliqueComplex
    pairs: int
    max_residual: float
    passed: bool
    grid: GridResult | None = None
    extras: int = 0
    grid_tolerance: float = 0.0


def _piece_points(name: str, samples: int) -> tuple[list[SolutionFamily], list[np.ndarray]]:
    fams = known_families(name)
    pts = [np.array(f.angles(t)) for f in fams for t in f.parameters(samples)]
    return fams, pts


def path_join_product_check(
    g1: Graph, g2: Graph, path_len: int, samples: int = 4, tol: float = 1e-8, resolution: int | None = None
) -> JoinReport:
    """Every pair of piece solutions is a solution on the joined graph.

    With ``resolution`` the grid oracle also scans the joined graph and counts
    passing points farther than two grid steps from the product set.
    """
    name1, name2 = _family_name(g1), _family_name(g2)
    joined = path_join(g1, g2, path_len)
    cx = build_complex(joined)
    forest = spanning_forest(joined)
    tree = set(forest.tree_edges)
    free = [e for e in joined.edges if e not in tree]
    offset = g1.num_vertices + path_len - 1
    fams1, pts1 = _piece_points(name1, samples)
    fams2, pts2 = _piece_points(name2, samples)
    free1 = list(fams1[0].free_edges)
    free2 = [(u + offset, v + offset) for u, v in fams2[0].free_edges]
    if sorted(free1 + free2) != sorted(free):
        raise ContractViolation("joined spanning forest does not restrict to the pieces' trees")
    worst = 0.0
    pairs = 0
    for x1 in pts1:
        for x2 in pts2:
            angles = dict(zip(free1, x1)) | dict(zip(free2, x2))
            a = u1_tree_gauge_connection(cx, angles)
            worst = max(worst, max(residual_norms(ym_residual(a)).values(), default=0.0))
            pairs += 1
    report = JoinReport(cx, pairs, worst, worst < tol)
    if resolution is not None:
        grid = u1_grid_oracle(cx, resolution, forest=forest)
        col = {e: i for i, e in enumerate(grid.free_edges)}
        c1 = [col[e] for e in free1]
        c2 = [col[e] for e in free2]
        d1, _ = family_distance(grid.angles[:, c1], fams1)
        d2, _ = family_distance(grid.angles[:, c2], fams2)
        report.grid = grid
        report.grid_tolerance = 2 * grid.step
        report.extras = int(np.sum(np.maximum(d1, d2) > report.grid_tolerance))
    return report


# Yang-Mills-Higgs -------------------------------------------------------------

POTENTIALS: dict[str, Callable[[Form], float]] = {"zero": lambda phi: 0.0}


def _potential(name: str) -> Callable[[Form], float]:
    try:
        return POTENTIALS[name]
    except KeyError:
        raise UnsupportedPotential(f"unknown potential {name!r}; available: {sorted(POTENTIALS)}") from None


def _check_higgs(a: Connection, phi: Form):
    if phi.degree != 0 or phi.values.shape != (a.complex.num_vertices, a.n):
        raise ValidationError(
            f"Higgs field must be a 0-form with values of shape ({a.complex.num_vertices}, {a.n}), got {phi.values.shape}"
        )


def ymh_value(a: Connection, phi: Form, potential: str = "zero") -> float:
    """(1/2)<F, F> + (1/2)<d_A phi, d_A phi> + V(phi)."""
    _check_higgs(a, phi)
    dphi = covariant_derivative_section(a, phi)
    return ym_value(a) + 0.5 * float(np.real(inner(dphi, dphi))) + float(_potential(potential)(phi))


def ymh_residuals(a: Connection, phi: Form, potential: str = "zero") -> tuple[dict[Edge, np.ndarray], np.ndarray]:
    """Edge and vertex residuals of the Yang-Mills-Higgs equations (V = 0 only).

    Edge (i, j): sum_l F~(i,l,j) - sum_l F~(i,j,l) - (P - P^dagger) with
    P = A(i,j) phi(j) phi(j)^dagger A(j,i) - phi(i) phi(j)^dagger A(j,i).
    Vertex i: deg(i) phi(i) - sum_l A(i,l) phi(l).
    """
    _check_higgs(a, phi)
    if potential != "zero":
        _potential(potential)
        raise UnsupportedPotential("Euler-Lagrange residuals are only available for the zero potential")
    edge = {}
    for (i, j), res in ym_residual(a).items():
        A = a(i, j)
        pj = phi.values[j][:, None]
        pi = phi.values[i][:, None]
        P = A @ pj @ pj.conj().T @ A.conj().T - pi @ pj.conj().T @ A.conj().T
        edge[(i, j)] = res - (P - P.conj().T)
    vertex = connection_laplacian_k0(a, phi).values
    return edge, vertex


def ymh_pairing(
    a: Connection, edge_res: dict[Edge, np.ndarray], vertex_res: np.ndarray, xi: np.ndarray, eta: np.ndarray
) -> float:
    """Directional derivative of the functional predicted by the residuals.

    Along A(e) -> A(e) exp(t xi(e)), phi -> phi + t eta the derivative is
    sum_e Re Tr(xi^dagger (-1/2) A^dagger E A) + sum_i Re <eta_i, v_i>.
    """
    total = 0.0
    for r, e in enumerate(a.complex.graph.edges):
        A = a.mats[r]
        total += lie_pairing(xi[r], -0.5 * A.conj().T @ edge_res[e] @ A)
    return total + float(np.real(np.vdot(eta, vertex_res)))


def random_higgs(cx: CliqueComplex, group: Group, rng: np.random.Generator) -> Form:
    shape = (cx.num_vertices, group.n)
    vals = rng.standard_normal(shape)
    if group.dtype == np.complex128:
        vals = vals + 1j * rng.standard_normal(shape)
    return Form(0, vals.astype(group.dtype))


def constant_higgs(cx: CliqueComplex, value: Sequence[complex], dtype=complex) -> Form:
    return Form(0, np.tile(np.asarray(value, dtype=dtype), (cx.num_vertices, 1)))


__all__ = [name for name in dir() if not name.startswith("_") and name not in ("annotations", "math")]
