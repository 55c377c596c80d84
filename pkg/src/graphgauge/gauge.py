"""Connections, gauge transformations and covariant exterior calculus.

W-valued forms reuse :class:`graphgauge.calculus.Form` with fibre ``(n,)``.
End(W)-valued forms are not alternating, so :class:`EndForm` keeps one matrix
per ordered tuple: ``values[pos, p]`` is the value at the canonical simplex
``pos`` permuted by ``permutations(k)[p]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cache, cached_property
from typing import Callable, Sequence

import numpy as np

from .calculus import Form, basis_stack, evaluate, hodge_laplacian_matrix, weitzenboeck_split
from .errors import CliqueLookupError, ContractViolation, ValidationError
from .graph import CliqueComplex
from .groups import Group, adjoint

UNIT_NORM_TOL = 1e-10


@cache
def permutations(k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.permutations(range(k + 1)))


@cache
def _perm_index(k: int) -> dict[tuple[int, ...], int]:
    return {p: i for i, p in enumerate(permutations(k))}


@dataclass(frozen=True, eq=False)
class Connection:
    """Group element per directed edge, stored once on the graph's orientation.

    ``a(i, j)`` returns ``A(i, j)``; the reverse direction is the inverse
    (conjugate transpose), so ``A(j, i) = A(i, j)^-1`` holds by construction.
    """

    complex: CliqueComplex
    group: Group
    mats: np.ndarray

    def __post_init__(self):
        E = len(self.complex.graph.edges)
        mats = np.asarray(self.mats)
        if mats.shape[:1] != (E,):
            raise ValidationError(f"connection has {mats.shape[0]} entries for {E} edges")
        object.__setattr__(self, "mats", self.group.coerce(mats, "connection entry"))

    @cached_property
    def edge_position(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.complex.graph.edges)}

    @property
    def n(self) -> int:
        return self.group.n

    def __call__(self, i: int, j: int) -> np.ndarray:
        pos = self.edge_position.get((i, j))
        if pos is not None:
            return self.mats[pos]
        pos = self.edge_position.get((j, i))
        if pos is not None:
            return self.mats[pos].conj().T
        raise CliqueLookupError(f"vertices {i} and {j} are not adjacent")

    def bar(self, i: int, j: int) -> np.ndarray:
        return self(i, j) - np.eye(self.n)

    def with_mats(self, mats: np.ndarray) -> Connection:
        return Connection(self.complex, self.group, mats)

    @classmethod
    def trivial(cls, cx: CliqueComplex, group: Group) -> Connection:
        return cls(cx, group, group.identity(len(cx.graph.edges)))

    @classmethod
    def random(cls, cx: CliqueComplex, group: Group, rng: np.random.Generator) -> Connection:
        return cls(cx, group, group.random(rng, len(cx.graph.edges)))

    @classmethod
    def from_function(cls, cx: CliqueComplex, group: Group, fn: Callable[[int, int], np.ndarray]) -> Connection:
        return cls(cx, group, np.array([fn(u, v) for u, v in cx.graph.edges]).reshape(-1, group.n, group.n))


@dataclass(frozen=True, eq=False)
class GaugeTransformation:
    group: Group
    mats: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mats", self.group.coerce(self.mats, "gauge transformation entry"))

    def __call__(self, i: int) -> np.ndarray:
        return self.mats[i]

    def __matmul__(self, other: GaugeTransformation) -> GaugeTransformation:
        """Pointwise product, so that (g @ h) acts as g after h."""
        return GaugeTransformation(self.group, self.mats @ other.mats)

    @classmethod
    def identity(cls, cx: CliqueComplex, group: Group) -> GaugeTransformation:
        return cls(group, group.identity(cx.num_vertices))

    @classmethod
    def random(cls, cx: CliqueComplex, group: Group, rng: np.random.Generator) -> GaugeTransformation:
        return cls(group, group.random(rng, cx.num_vertices))


def _check_compatible(g: GaugeTransformation, a: Connection):
    if g.group != a.group:
        raise ValidationError(f"gauge group {g.group} does not match connection group {a.group}")
    if g.mats.shape[0] != a.complex.num_vertices:
        raise ValidationError("gauge transformation and connection live on different graphs")


def gauge_act_connection(g: GaugeTransformation, a: Connection) -> Connection:
    """(gA)(i, j) = g(i) A(i, j) g(j)^-1."""
    _check_compatible(g, a)
    edges = np.array(a.complex.graph.edges, dtype=np.intp).reshape(-1, 2)
    mats = g.mats[edges[:, 0]] @ a.mats @ adjoint(g.mats[edges[:, 1]])
    return a.with_mats(mats)


def holonomy(a: Connection, path: Sequence[int]) -> np.ndarray:
    """Ordered product A(i1, i2) A(i2, i3) ... along a vertex path."""
    out = np.eye(a.n, dtype=a.group.dtype)
    for i, j in zip(path, path[1:]):
        out = out @ a(i, j)
    return out


# Vector-valued forms ---------------------------------------------------------


def random_vector_form(cx: CliqueComplex, k: int, n: int, rng: np.random.Generator, dtype=complex) -> Form:
    shape = (cx.count(k), n)
    vals = rng.standard_normal(shape)
    if np.dtype(dtype).kind == "c":
        vals = vals + 1j * rng.standard_normal(shape)
    return Form(k, vals.astype(dtype))


def gauge_act_vector_form(cx: CliqueComplex, g: GaugeTransformation, f: Form) -> Form:
    """(g f)(i0, ..., ik) = g(i0) f(i0, ..., ik) on sorted tuples."""
    sims = cx.simplices[f.degree] if f.degree < cx.omega else ()
    if len(sims) != f.values.shape[0]:
        raise ValidationError("form does not match the complex")
    if f.values.ndim < 2 or f.values.shape[1] != g.group.n:
        raise ValidationError(f"fibre dimension {f.values.shape[1:]} does not match group dimension {g.group.n}")
    first = np.array([s[0] for s in sims], dtype=np.intp)
    return Form(f.degree, np.einsum("sab,sb...->sa...", g.mats[first], f.values))


def _first_edge_mats(a: Connection, k: int) -> np.ndarray:
    """A(s0, s1) for every canonical k-simplex s (k >= 1)."""
    sims = a.complex.simplices[k] if k < a.complex.omega else ()
    pos = a.edge_position
    idx = np.array([pos[(s[0], s[1])] for s in sims], dtype=np.intp)
    return a.mats[idx]


def covariant_derivative_section(a: Connection, s: Form) -> Form:
    """(nabla_A s)(i, j) = A(i, j) s(j) - s(i) for i < j, extended alternating."""
    if s.degree != 0:
        raise ContractViolation("covariant_derivative_section expects a 0-form")
    cx = a.complex
    out = np.zeros((cx.count(1), *s.fiber_shape), dtype=np.result_type(s.values, a.mats))
    for r, (i, j) in enumerate(cx.simplices[1] if cx.omega > 1 else ()):
        out[r] = a(i, j) @ s.values[j] - s.values[i]
    return Form(1, out)


def d_A_vector(a: Connection, f: Form) -> Form:
    """Exterior covariant derivative on W-valued forms.

    On sorted tuples: A(i0, i1) f(i1, ...) + sum_{j>=1} (-1)^j f(..., ^ij, ...).
    """
    cx = a.complex
    k = f.degree
    faces = cx.faces(k + 1)
    dtype = np.result_type(f.values, a.mats)
    out = np.zeros((faces.shape[0], *f.fiber_shape), dtype=dtype)
    if faces.shape[0] == 0:
        return Form(k + 1, out)
    out += np.einsum("sab,sb...->sa...", _first_edge_mats(a, k + 1), f.values[faces[:, 0]])
    for j in range(1, k + 2):
        out += (-1) ** j * f.values[faces[:, j]]
    return Form(k + 1, out)


def d_A_star_vector(a: Connection, f: Form) -> Form:
    """Adjoint of d_A: sum_{l<i0} A(i0, l) f(l, i0, ...) + sum_{l>i0} f(l, i0, ...)."""
    cx = a.complex
    k = f.degree
    if k < 1:
        raise ContractViolation("d_A_star_vector needs a form of degree >= 1")
    lower = cx.simplices[k - 1]
    out = np.zeros((len(lower), *f.fiber_shape), dtype=np.result_type(f.values, a.mats))
    for r, tau in enumerate(lower):
        i0 = tau[0]
        for l in cx.cofaces(tau):
            v = evaluate(cx, f, (l, *tau))
            out[r] += a(i0, l) @ v if cx.precedes(l, i0) else v
    return Form(k - 1, out)


def connection_laplacian(a: Connection, f: Form) -> Form:
    """Delta_A = d_A d_A* + d_A* d_A."""
    out = d_A_star_vector(a, d_A_vector(a, f))
    if f.degree > 0:
        out = out + d_A_vector(a, d_A_star_vector(a, f))
    return out


def connection_laplacian_k0(a: Connection, f: Form) -> Form:
    """Closed form at degree 0: deg(i) f(i) - sum_{l ~ i} A(i, l) f(l)."""
    if f.degree != 0:
        raise ContractViolation("closed form holds on 0-forms only")
    cx = a.complex
    out = np.zeros_like(f.values, dtype=np.result_type(f.values, a.mats))
    for i in range(cx.num_vertices):
        out[i] = len(cx.adjacency[i]) * f.values[i]
        for l in sorted(cx.adjacency[i]):
            out[i] -= a(i, l) @ f.values[l]
    return Form(0, out)


def operator_matrix(a: Connection, k: int, op: Callable[[Connection, Form], Form]) -> np.ndarray:
    """Matrix of a degree-preserving operator on Omega^k(W), index alpha*n + a."""
    n = a.n
    basis = basis_stack(a.complex, k, n, dtype=a.group.dtype)
    out = op(a, basis).values
    size = a.complex.count(k) * n
    return out.reshape(size, size)


def connection_laplacian_matrix(a: Connection, k: int) -> np.ndarray:
    return operator_matrix(a, k, connection_laplacian)


# End(W)-valued forms ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EndForm:
    degree: int
    values: np.ndarray

    def __add__(self, other: EndForm) -> EndForm:
        return EndForm(self.degree, self.values + other.values)

    def __sub__(self, other: EndForm) -> EndForm:
        return EndForm(self.degree, self.values - other.values)

    def __mul__(self, c) -> EndForm:
        return EndForm(self.degree, self.values * c)

    __rmul__ = __mul__


def ordered_tuples(cx: CliqueComplex, k: int):
    """Yield (pos, perm_index, tuple) for every ordered (k+1)-tuple of every k-simplex."""
    if k >= cx.omega:
        return
    perms = permutations(k)
    for pos, s in enumerate(cx.simplices[k]):
        for p, perm in enumerate(perms):
            yield pos, p, tuple(s[m] for m in perm)


def end_tabulate(cx: CliqueComplex, k: int, n: int, fn: Callable[[tuple], np.ndarray], dtype=complex) -> EndForm:
    vals = np.zeros((cx.count(k), math.factorial(k + 1), n, n), dtype=dtype)
    for pos, p, t in ordered_tuples(cx, k):
        vals[pos, p] = fn(t)
    return EndForm(k, vals)


def end_eval(cx: CliqueComplex, phi: EndForm, t: Sequence[int]) -> np.ndarray:
    t = tuple(t)
    if len(t) != phi.degree + 1:
        raise ContractViolation(f"tuple {t} has wrong length for an End-valued {phi.degree}-form")
    key = cx.canonical(t)
    hit = cx.index.get(key) if len(set(t)) == len(t) else None
    if hit is None:
        return np.zeros(phi.values.shape[2:], dtype=phi.values.dtype)
    perm = tuple(key.index(v) for v in t)
    return phi.values[hit[1], _perm_index(phi.degree)[perm]]


def random_end_form(cx: CliqueComplex, k: int, n: int, rng: np.random.Generator, dtype=complex) -> EndForm:
    shape = (cx.count(k), math.factorial(k + 1), n, n)
    vals = rng.standard_normal(shape)
    if np.dtype(dtype).kind == "c":
        vals = vals + 1j * rng.standard_normal(shape)
    return EndForm(k, vals.astype(dtype))


def _dtype(*arrays):
    return np.result_type(*arrays)


def end_inner(phi1: EndForm, phi2: EndForm):
    """(1/(k+1)!) sum over ordered tuples of Tr(phi1 phi2^dagger)."""
    if phi1.degree != phi2.degree:
        raise ContractViolation("degree mismatch")
    return np.sum(phi1.values * np.conj(phi2.values)) / math.factorial(phi1.degree + 1)


def end_product(cx: CliqueComplex, phi1: EndForm, phi2: EndForm) -> EndForm:
    """(phi1 phi2)(i0..i_{p+q}) = phi1(i0..ip) phi2(ip..i_{p+q})."""
    p, q = phi1.degree, phi2.degree
    n = phi1.values.shape[-1]
    return end_tabulate(
        cx, p + q, n,
        lambda t: end_eval(cx, phi1, t[: p + 1]) @ end_eval(cx, phi2, t[p:]),
        dtype=_dtype(phi1.values, phi2.values),
    )


def end_commutator(cx: CliqueComplex, phi1: EndForm, phi2: EndForm) -> EndForm:
    sign = (-1) ** (phi1.degree * phi2.degree)
    return end_product(cx, phi1, phi2) - sign * end_product(cx, phi2, phi1)


def end_act(cx: CliqueComplex, phi: EndForm, f: Form) -> Form:
    """W-valued (p+q)-form phi(i0..ip) f(ip..i_{p+q}) on sorted tuples."""
    p, q = phi.degree, f.degree
    k = p + q
    sims = cx.simplices[k] if k < cx.omega else ()
    out = np.zeros((len(sims), *f.fiber_shape), dtype=_dtype(phi.values, f.values))
    for r, s in enumerate(sims):
        out[r] = end_eval(cx, phi, s[: p + 1]) @ evaluate(cx, f, s[p:])
    return Form(k, out)


def end_d(cx: CliqueComplex, phi: EndForm) -> EndForm:
    """Plain exterior derivative on every ordered tuple."""
    k = phi.degree
    n = phi.values.shape[-1]

    def fn(t):
        return sum((-1) ** j * end_eval(cx, phi, t[:j] + t[j + 1:]) for j in range(k + 2))

    return end_tabulate(cx, k + 1, n, fn, dtype=phi.values.dtype)


def d_A_end(a: Connection, phi: EndForm) -> EndForm:
    """A(i0,i1) phi(i1..) + sum_{j=1}^{k} (-1)^j phi(..^ij..) + (-1)^{k+1} phi(i0..ik) A(ik,i_{k+1})."""
    cx = a.complex
    k = phi.degree

    def fn(t):
        out = a(t[0], t[1]) @ end_eval(cx, phi, t[1:])
        for j in range(1, k + 1):
            out = out + (-1) ** j * end_eval(cx, phi, t[:j] + t[j + 1:])
        return out + (-1) ** (k + 1) * end_eval(cx, phi, t[: k + 1]) @ a(t[k], t[k + 1])

    return end_tabulate(cx, k + 1, a.n, fn, dtype=_dtype(phi.values, a.mats))


def d_A_star_end(a: Connection, phi: EndForm) -> EndForm:
    """Adjoint of d_A under the tuple-averaged inner product."""
    cx = a.complex
    K = phi.degree
    if K < 1:
        raise ContractViolation("d_A_star_end needs a form of degree >= 1")

    def fn(s):
        total = np.zeros((a.n, a.n), dtype=_dtype(phi.values, a.mats))
        for l in cx.cofaces(s):
            total = total + a(s[0], l) @ end_eval(cx, phi, (l, *s))
            for j in range(1, K):
                total = total + (-1) ** j * end_eval(cx, phi, s[:j] + (l,) + s[j:])
            total = total + (-1) ** K * end_eval(cx, phi, (*s, l)) @ a(l, s[K - 1])
        return total / (K + 1)

    return end_tabulate(cx, K - 1, a.n, fn, dtype=_dtype(phi.values, a.mats))


def covariant_derivative_end(a: Connection, phi: EndForm) -> EndForm:
    """(nabla_A phi)(i, j) = A(i, j) phi(j) - phi(i) A(i, j)."""
    if phi.degree != 0:
        raise ContractViolation("covariant_derivative_end expects a 0-form")
    cx = a.complex

    def fn(t):
        i, j = t
        return a(i, j) @ end_eval(cx, phi, (j,)) - end_eval(cx, phi, (i,)) @ a(i, j)

    return end_tabulate(cx, 1, a.n, fn, dtype=_dtype(phi.values, a.mats))


def gauge_act_end_form(cx: CliqueComplex, g: GaugeTransformation, phi: EndForm) -> EndForm:
    """(g phi)(t) = g(t0) phi(t) g(tk)^-1 on every ordered tuple."""
    if phi.values.shape[-1] != g.group.n:
        raise ValidationError("End-form fibre does not match the gauge group")
    k = phi.degree
    return end_tabulate(
        cx, k, g.group.n,
        lambda t: g(t[0]) @ end_eval(cx, phi, t) @ g(t[k]).conj().T,
        dtype=_dtype(phi.values, g.mats),
    )


def connection_bar(a: Connection) -> EndForm:
    """A-bar = rho(A) - 1 as an End-valued 1-form."""
    return end_tabulate(a.complex, 1, a.n, lambda t: a.bar(*t), dtype=a.group.dtype)


def curvature(a: Connection) -> EndForm:
    """F(i, j, k) = A(i, j) A(j, k) - A(i, k) on every ordered triple."""
    return end_tabulate(a.complex, 2, a.n, lambda t: a(t[0], t[1]) @ a(t[1], t[2]) - a(t[0], t[2]), dtype=a.group.dtype)


def wilson_curvature(a: Connection) -> EndForm:
    """Triangle holonomy A(i, j) A(j, k) A(k, i) on every ordered triple."""
    return end_tabulate(a.complex, 2, a.n, lambda t: holonomy(a, (*t, t[0])), dtype=a.group.dtype)


def is_flat(a: Connection, atol: float = 1e-12) -> bool:
    hol = wilson_curvature(a).values
    return bool(np.all(np.abs(hol - np.eye(a.n)) <= atol))


# Gauged Laplacian and the generalized Weitzenboeck formula -------------------


def blocks_to_matrix(blocks: np.ndarray) -> np.ndarray:
    """(N, N, n, n) block array -> (N n, N n) matrix with index alpha*n + a."""
    N, _, n, _ = blocks.shape
    return blocks.transpose(0, 2, 1, 3).reshape(N * n, N * n)


def _signed_position(cx: CliqueComplex, t) -> tuple[int, int]:
    hit = cx.locate(t)
    if hit is None:
        raise ContractViolation(f"{t} is not a simplex")
    return hit


def gauged_laplacian_matrix(a: Connection, k: int) -> np.ndarray:
    """Block matrix of the gauged Hodge Laplacian Delta^g on Omega^k(W).

    At k = 0 this is the connection Laplacian itself.
    """
    cx = a.complex
    n = a.n
    sims = cx.simplices[k]
    N = len(sims)
    eye = np.eye(n, dtype=a.group.dtype)
    out = np.zeros((N, N, n, n), dtype=a.group.dtype)
    for r, alpha in enumerate(sims):
        cof = set(cx.cofaces(alpha))
        if k == 0:
            i = alpha[0]
            out[r, r] += len(cx.adjacency[i]) * eye
            for l in cx.adjacency[i]:
                out[r, cx.position((l,))] -= a(i, l)
            continue
        i0, i1 = alpha[0], alpha[1]
        out[r, r] += (len(cof) + k + 1) * eye
        rest = alpha[1:]
        for l in cx.cofaces(rest):
            if l == i0 or l in cof:
                continue
            pos, sign = _signed_position(cx, (l, *rest))
            coef = a(i0, i1) @ a(i1, l) if cx.precedes(l, i1) else a(i0, i1)
            out[r, pos] += sign * coef
        for j in range(1, k + 1):
            face = alpha[:j] + alpha[j + 1:]
            for l in cx.cofaces(face):
                if l == alpha[j] or l in cof:
                    continue
                pos, sign = _signed_position(cx, (l, *face))
                coef = a(i0, l) if cx.precedes(l, i0) else eye
                out[r, pos] += (-1) ** j * sign * coef
    return out


def curvature_term_matrix(a: Connection, k: int) -> np.ndarray:
    """Blocks of f -> sum_{l < i1} F(i0, i1, l) f(l, i1, ..., ik) over (k+2)-cliques."""
    cx = a.complex
    n = a.n
    sims = cx.simplices[k]
    N = len(sims)
    out = np.zeros((N, N, n, n), dtype=a.group.dtype)
    if k == 0:
        return out
    for r, alpha in enumerate(sims):
        i0, i1 = alpha[0], alpha[1]
        for l in cx.cofaces(alpha):
            if not cx.precedes(l, i1):
                continue
            pos, sign = _signed_position(cx, (l, *alpha[1:]))
            out[r, pos] += sign * (a(i0, i1) @ a(i1, l) - a(i0, l))
    return out


def curvature_action(a: Connection, f: Form) -> Form:
    """The curvature term of the gauged Laplacian applied to a form."""
    k = f.degree
    cx = a.complex
    sims = cx.simplices[k]
    out = np.zeros((len(sims), *f.fiber_shape), dtype=np.result_type(f.values, a.mats))
    if k == 0:
        return Form(0, out)
    for r, alpha in enumerate(sims):
        i0, i1 = alpha[0], alpha[1]
        for l in cx.cofaces(alpha):
            if cx.precedes(l, i1):
                F = a(i0, i1) @ a(i1, l) - a(i0, l)
                out[r] += F @ evaluate(cx, f, (l, *alpha[1:]))
    return Form(k, out)


@dataclass(frozen=True, eq=False)
class WeitzenboeckTerms:
    """Block matrices (N, N, n, n) with bochner + ric + curvature = Delta_A."""

    bochner: np.ndarray
    ric: np.ndarray
    curvature: np.ndarray

    def total(self) -> np.ndarray:
        return blocks_to_matrix(self.bochner + self.ric + self.curvature)


def generalized_weitzenboeck(a: Connection, k: int) -> WeitzenboeckTerms:
    """Delta_A = B(Delta^g) + Ric(Delta) (x) 1 + F on Omega^k(W)."""
    gauged = gauged_laplacian_matrix(a, k)
    N = gauged.shape[0]
    for r in range(N):
        for c in range(N):
            if r != c and np.any(gauged[r, c]):
                norm = np.linalg.norm(gauged[r, c], 2)
                if abs(norm - 1.0) > UNIT_NORM_TOL:
                    raise ContractViolation(f"off-diagonal block ({r}, {c}) has operator norm {norm}, expected 1")
    split = weitzenboeck_split(gauged)
    scalar = weitzenboeck_split(hodge_laplacian_matrix(a.complex, k))
    ric = np.einsum("rc,ab->rcab", scalar.ric, np.eye(a.n)).astype(a.group.dtype)
    if np.max(np.abs(split.ric - ric), initial=0.0) > UNIT_NORM_TOL:
        raise ContractViolation("Ric of the gauged Laplacian differs from Ric of the Hodge Laplacian")
    return WeitzenboeckTerms(split.bochner, ric, curvature_term_matrix(a, k))
