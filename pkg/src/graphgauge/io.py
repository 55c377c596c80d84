"""Text and JSON formats for graphs, connections, Higgs fields and reports."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .calculus import Form
from .errors import OrientationError, ValidationError
from .gauge import Connection, GaugeTransformation
from .graph import CliqueComplex, Graph
from .groups import Group


class ParseError(ValidationError):
    def __init__(self, message: str, source: str = "<input>", line: int | None = None):
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


# Graphs ----------------------------------------------------------------------


def parse_graph(text: str, order: str = "file", source: str = "<input>") -> Graph:
    """Edge-list format: "u v" per line, '#' comments, optional "vertices N" header.

    With ``order="natural"`` every edge is re-oriented from low to high id.
    """
    if order not in ("file", "natural"):
        raise ValidationError(f"order must be 'file' or 'natural', not {order!r}")
    declared = None
    edges: list[tuple[int, int]] = []
    lines: dict[frozenset, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "vertices":
            if declared is not None or edges:
                raise ParseError("'vertices' header must come first and only once", source, lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(f"expected 'vertices N', got {line!r}", source, lineno)
            declared = int(parts[1])
            continue
        if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
            raise ParseError(f"expected two integer vertex ids, got {line!r}", source, lineno)
        u, v = int(parts[0]), int(parts[1])
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex id in {line!r}", source, lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", source, lineno)
        key = frozenset((u, v))
        if key in lines:
            raise ParseError(f"duplicate edge {{{u}, {v}}} (first on line {lines[key]})", source, lineno)
        if declared is not None and max(u, v) >= declared:
            raise ParseError(f"vertex id {max(u, v)} out of range for 'vertices {declared}'", source, lineno)
        lines[key] = lineno
        edges.append((u, v))
    n = declared if declared is not None else (max((max(e) for e in edges), default=-1) + 1)
    if order == "natural":
        return Graph.natural(n, edges)
    try:
        return Graph(n, tuple(edges))
    except OrientationError as exc:
        cyc = exc.cycle
        where = ", ".join(str(lines[frozenset((a, b))]) for a, b in zip(cyc, cyc[1:]))
        raise OrientationError(cyc, f"{source} lines {where}") from None


def read_graph(path: str | Path, order: str = "file") -> Graph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read graph file {path}: {exc.strerror}") from None
    return parse_graph(text, order, str(path))


def format_graph(g: Graph) -> str:
    lines = [f"vertices {g.num_vertices}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


# Connections -----------------------------------------------------------------


def _complex_matrix(m: np.ndarray) -> list:
    return [[[float(np.real(x)), float(np.imag(x))] for x in row] for row in m]


def _parse_matrix(raw, n: int, what: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{what}: matrix must be nested [re, im] pairs") from None
    if arr.shape != (n, n, 2):
        raise ValidationError(f"{what}: matrix has shape {arr.shape[:2]}, expected ({n}, {n}) of [re, im]")
    return arr[..., 0] + 1j * arr[..., 1]


def connection_to_json(a: Connection) -> dict:
    edges = []
    for (u, v), m in zip(a.complex.graph.edges, a.mats):
        if a.group.kind == "U1":
            edges.append({"u": u, "v": v, "theta": float(np.angle(m[0, 0]))})
        else:
            edges.append({"u": u, "v": v, "matrix": _complex_matrix(m)})
    return {"group": a.group.kind, "n": a.n, "edges": edges}


def connection_from_json(data: dict, cx: CliqueComplex) -> Connection:
    """Strict parse: every graph edge exactly once, in its directed orientation."""
    if not isinstance(data, dict) or "group" not in data or "edges" not in data:
        raise ValidationError("connection JSON needs 'group' and 'edges'")
    n = data.get("n", 1)
    if not isinstance(n, int):
        raise ValidationError("'n' must be an integer")
    group = Group(str(data["group"]), n)
    pos = {e: i for i, e in enumerate(cx.graph.edges)}
    mats = np.zeros((len(pos), n, n), dtype=complex)
    seen = set()
    for k, entry in enumerate(data["edges"]):
        what = f"edges[{k}]"
        if not isinstance(entry, dict) or "u" not in entry or "v" not in entry:
            raise ValidationError(f"{what}: needs 'u' and 'v'")
        e = (entry["u"], entry["v"])
        if e not in pos:
            if (e[1], e[0]) in pos:
                raise ValidationError(f"{what}: edge {e} is oriented {e[1]} -> {e[0]} in the graph")
            raise ValidationError(f"{what}: {e} is not an edge of the graph")
        if e in seen:
            raise ValidationError(f"{what}: edge {e} listed twice")
        seen.add(e)
        if ("theta" in entry) == ("matrix" in entry):
            raise ValidationError(f"{what}: give exactly one of 'theta' or 'matrix'")
        if "theta" in entry:
            if group.kind != "U1":
                raise ValidationError(f"{what}: 'theta' is only valid for U1")
            mats[pos[e]] = np.exp(1j * float(entry["theta"]))
        else:
            mats[pos[e]] = _parse_matrix(entry["matrix"], n, what)
    missing = [e for e in pos if e not in seen]
    if missing:
        raise ValidationError(f"connection is missing edges {missing}")
    if group.kind == "On" and np.max(np.abs(mats.imag), initial=0.0) > 0:
        raise ValidationError("O(n) connection entries must be real")
    return Connection(cx, group, mats if group.kind != "On" else mats.real)


def read_connection(path: str | Path, cx: CliqueComplex) -> Connection:
    return connection_from_json(_load_json(path), cx)


def gauge_to_json(g: GaugeTransformation) -> dict:
    return {
        "group": g.group.kind,
        "n": g.group.n,
        "vertices": [{"v": v, "matrix": _complex_matrix(m)} for v, m in enumerate(g.mats)],
    }


# Higgs fields ----------------------------------------------------------------


def higgs_to_json(phi: Form) -> dict:
    return {
        "n": int(phi.values.shape[1]),
        "vertices": [{"v": v, "value": [[float(np.real(x)), float(np.imag(x))] for x in row]}
                     for v, row in enumerate(phi.values)],
    }


def higgs_from_json(data: dict, cx: CliqueComplex, n: int) -> Form:
    if not isinstance(data, dict) or "vertices" not in data:
        raise ValidationError("Higgs JSON needs 'n' and 'vertices'")
    if data.get("n") != n:
        raise ValidationError(f"Higgs field has n = {data.get('n')}, the group acts on dimension {n}")
    V = cx.num_vertices
    vals = np.zeros((V, n), dtype=complex)
    seen = set()
    for k, entry in enumerate(data["vertices"]):
        v = entry.get("v") if isinstance(entry, dict) else None
        if not isinstance(v, int) or not 0 <= v < V:
            raise ValidationError(f"vertices[{k}]: 'v' must be a vertex id in 0..{V - 1}")
        if v in seen:
            raise ValidationError(f"vertices[{k}]: vertex {v} listed twice")
        seen.add(v)
        arr = np.asarray(entry.get("value"), dtype=float)
        if arr.shape != (n, 2):
            raise ValidationError(f"vertices[{k}]: value must be {n} [re, im] pairs")
        vals[v] = arr[:, 0] + 1j * arr[:, 1]
    if len(seen) != V:
        raise ValidationError(f"Higgs field is missing vertices {sorted(set(range(V)) - seen)}")
    return Form(0, vals)


def read_higgs(path: str | Path, cx: CliqueComplex, n: int) -> Form:
    return higgs_from_json(_load_json(path), cx, n)


# Reports ---------------------------------------------------------------------


def ym_report_to_json(report) -> dict:
    from .yangmills import holonomy_traces

    out = {
        "direction": report.direction,
        "value": report.value,
        "residual_inf_norm": report.residual_inf_norm,
        "per_edge_residuals": [{"u": u, "v": v, "norm": nrm} for (u, v), nrm in report.residual_norms.items()],
        "iterations": report.iterations,
        "converged": report.converged,
        "gauge_fixed": report.gauge_fixed,
        "trace": report.trace,
        "connection": connection_to_json(report.connection),
        "holonomy_traces": [
            {"triangle": list(t), "trace_re": z.real, "trace_im": z.imag}
            for t, z in holonomy_traces(report.connection)
        ],
    }
    if report.endpoints:
        out["endpoints"] = report.endpoints
    return out


def _load_json(path: str | Path):
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", str(path), exc.lineno) from None


def dumps(obj) -> str:
    """Deterministic JSON; floats use the shortest repr that round-trips exactly."""
    return json.dumps(_plain(obj), allow_nan=False) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) + 0.0
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
