"""Differential forms on a clique complex and the Hodge Laplacian.

A k-form is stored as an array whose leading axis runs over the canonical
k-simplices ``cx.simplices[k]``. Trailing axes form the fibre: none for real
forms, ``(n,)`` for W-valued forms. Anything with extra trailing axes is
treated as a stack of forms, which is how operator matrices are assembled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .graph import CliqueComplex, clique_degree, parallel_neighbors

RANK_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Form:
    degree: int
    values: np.ndarray

    @property
    def fiber_shape(self) -> tuple[int, ...]:
        return self.values.shape[1:]

    def __add__(self, other: Form) -> Form:
        _same_degree(self, other)
        return Form(self.degree, self.values + other.values)

    def __sub__(self, other: Form) -> Form:
        _same_degree(self, other)
        return Form(self.degree, self.values - other.values)

    def __mul__(self, c) -> Form:
        return Form(self.degree, self.values * c)

    __rmul__ = __mul__


def _same_degree(a: Form, b: Form):
    if a.degree != b.degree:
        raise ContractViolation(f"degree mismatch: {a.degree} vs {b.degree}")


def zero_form(cx: CliqueComplex, k: int, fiber=(), dtype=float) -> Form:
    return Form(k, np.zeros((cx.count(k), *fiber), dtype=dtype))


def basis_stack(cx: CliqueComplex, k: int, n: int | None = None, dtype=float) -> Form:
    """All basis forms of degree k at once, stacked along a trailing axis.

    Real case: values (N, N). Vector case: values (N, n, N*n) where column
    ``alpha*n + a`` is the form ``1_alpha`` times the a-th unit vector.
    """
    N = cx.count(k)
    if n is None:
        return Form(k, np.eye(N, dtype=dtype))
    return Form(k, np.eye(N * n, dtype=dtype).reshape(N, n, N * n))


def evaluate(cx: CliqueComplex, f: Form, t) -> np.ndarray:
    """Value of an alternating form at an arbitrary ordered vertex tuple."""
    if len(t) != f.degree + 1:
        raise ContractViolation(f"tuple {tuple(t)} has wrong length for a {f.degree}-form")
    hit = cx.locate(t)
    if hit is None:
        return np.zeros(f.fiber_shape, dtype=f.values.dtype)
    pos, sign = hit
    return sign * f.values[pos]


def inner(f: Form, g: Form):
    """Sum over cliques of the fibre inner product (conjugate-linear in f)."""
    _same_degree(f, g)
    return np.vdot(f.values, g.values)


def d(cx: CliqueComplex, f: Form) -> Form:
    """Exterior derivative by the alternating sum over faces.

    Beyond the top dimension of the complex the result is an empty form.
    """
    k = f.degree
    faces = cx.faces(k + 1)
    out = np.zeros((faces.shape[0], *f.fiber_shape), dtype=f.values.dtype)
    for j in range(k + 2):
        out += (-1) ** j * f.values[faces[:, j]]
    return Form(k + 1, out)


def d_star(cx: CliqueComplex, f: Form) -> Form:
    """Adjoint of d: ``(d* f)(tau) = sum_l f(l, *tau)``, summing over cofaces."""
    k = f.degree
    if k < 1:
        raise ContractViolation("d_star needs a form of degree >= 1")
    lower = cx.simplices[k - 1]
    out = np.zeros((len(lower), *f.fiber_shape), dtype=f.values.dtype)
    for r, tau in enumerate(lower):
        for l in cx.cofaces(tau):
            out[r] += evaluate(cx, f, (l, *tau))
    return Form(k - 1, out)


def d_matrix(cx: CliqueComplex, k: int) -> np.ndarray:
    """Matrix of d_k: Omega^k -> Omega^{k+1} in the canonical bases."""
    return d(cx, basis_stack(cx, k)).values


def hodge_laplacian_explicit(cx: CliqueComplex, k: int) -> np.ndarray:
    """Delta_k assembled from clique degrees and parallel neighbours."""
    sims = cx.simplices[k]
    N = len(sims)
    out = np.zeros((N, N))
    for a, alpha in enumerate(sims):
        out[a, a] = clique_degree(cx, alpha) + (k + 1 if k > 0 else 0)
        for beta, sign in parallel_neighbors(cx, alpha):
            out[a, cx.position(beta)] += sign
    return out


def hodge_laplacian_composed(cx: CliqueComplex, k: int) -> np.ndarray:
    """Delta_k = d d* + d* d evaluated on the basis forms."""
    basis = basis_stack(cx, k)
    out = d_star(cx, d(cx, basis)).values
    if k > 0:
        out = out + d(cx, d_star(cx, basis)).values
    return out


def hodge_laplacian_matrix(cx: CliqueComplex, k: int) -> np.ndarray:
    """Hodge Laplacian on k-forms; the explicit and composed routes must agree exactly."""
    explicit = hodge_laplacian_explicit(cx, k)
    composed = hodge_laplacian_composed(cx, k)
    if not np.array_equal(explicit, composed):
        raise ContractViolation(f"explicit and composed Delta_{k} differ")
    return explicit


def laplacian_spectrum(cx: CliqueComplex, k: int) -> np.ndarray:
    lap = hodge_laplacian_matrix(cx, k)
    if lap.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(lap)


def _zero_tol(values: np.ndarray) -> float:
    top = float(np.max(np.abs(values))) if values.size else 0.0
    return RANK_RTOL * max(top, 1.0)


def numerical_rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv >= _zero_tol(sv)))


def betti(cx: CliqueComplex, k: int) -> int:
    """dim ker Delta_k."""
    lap = hodge_laplacian_matrix(cx, k)
    if lap.size == 0:
        return 0
    ev = np.abs(np.linalg.eigvalsh(lap))
    return int(np.sum(ev < _zero_tol(ev)))


def betti_rank_oracle(cx: CliqueComplex, k: int) -> int:
    """dim ker d_k - rank d_{k-1}, from the coboundary matrices alone."""
    N = cx.count(k)
    rank_dk = numerical_rank(d_matrix(cx, k))
    rank_prev = numerical_rank(d_matrix(cx, k - 1)) if k > 0 else 0
    return N - rank_dk - rank_prev


def betti_numbers(cx: CliqueComplex) -> list[int]:
    return [betti(cx, k) for k in range(cx.omega)]


def euler_characteristic(cx: CliqueComplex) -> int:
    return sum((-1) ** k * c for k, c in enumerate(cx.counts()))


# Weitzenboeck decomposition over a normed algebra ---------------------------


@dataclass(frozen=True, eq=False)
class WeitzenboeckSplit:
    bochner: np.ndarray
    ric: np.ndarray


def algebra_norm(x) -> float:
    """|x| for scalars, operator (spectral) norm for matrix entries."""
    x = np.asarray(x)
    if x.ndim == 0:
        return float(abs(x))
    return float(np.linalg.norm(x, 2))


def _entry_adjoint(x: np.ndarray) -> np.ndarray:
    return np.conj(x) if x.ndim == 0 else x.conj().T


def weitzenboeck_split(m: np.ndarray, atol: float = 1e-12) -> WeitzenboeckSplit:
    """Split a symmetric matrix over an algebra into Bochner and Ric parts.

    ``m`` has shape (N, N) for scalar entries or (N, N, n, n) for matrix
    entries. Symmetry means ``m[i, j] == m[j, i]^dagger`` (the only notion of
    symmetry under which a self-adjoint operator's block matrix qualifies).
    """
    m = np.asarray(m)
    if m.ndim not in (2, 4) or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"expected an (N, N) or (N, N, n, n) array, got shape {m.shape}")
    N = m.shape[0]
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    for i in range(N):
        for j in range(i, N):
            if np.max(np.abs(m[i, j] - _entry_adjoint(m[j, i])), initial=0.0) > atol * scale:
                raise ContractViolation(f"matrix is not symmetric at entry ({i}, {j})")
    unit = np.eye(m.shape[2]) if m.ndim == 4 else 1.0
    bochner = m.copy()
    ric = np.zeros_like(m)
    for i in range(N):
        off = sum(algebra_norm(m[i, j]) for j in range(N) if j != i)
        bochner[i, i] = off * unit
        ric[i, i] = m[i, i] - off * unit
    return WeitzenboeckSplit(bochner, ric)


def forman_ricci(cx: CliqueComplex, simplex) -> int:
    """Forman-Ricci curvature of a k-simplex.

    Coface count plus the k+1 facets minus the parallel neighbours. A vertex
    has no facets in the complex, so at k = 0 this is deg - deg = 0.
    """
    k = len(simplex) - 1
    facets = k + 1 if k > 0 else 0
    return clique_degree(cx, simplex) + facets - len(parallel_neighbors(cx, simplex))
