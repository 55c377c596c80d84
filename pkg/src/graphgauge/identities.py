"""Battery of exact identities, reported as maximum absolute errors.

Shared by the ``check`` command and the test-suite. Every entry should be at
rounding level for any valid connection.
"""

from __future__ import annotations

import numpy as np

from .calculus import Form, d, d_star, hodge_laplacian_matrix, inner
from .gauge import (
    Connection,
    GaugeTransformation,
    connection_bar,
    connection_laplacian,
    connection_laplacian_k0,
    connection_laplacian_matrix,
    curvature,
    d_A_end,
    d_A_star_end,
    d_A_star_vector,
    d_A_vector,
    end_act,
    end_d,
    end_inner,
    end_product,
    gauge_act_connection,
    gauge_act_end_form,
    generalized_weitzenboeck,
    random_end_form,
    random_vector_form,
)
from .yangmills import residual_norms, wilson_action, ym_residual, ym_value


def _max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x), initial=0.0))


def _real_form(cx, k, rng) -> Form:
    return Form(k, rng.standard_normal(cx.count(k)))


def exterior_identities(a: Connection, rng: np.random.Generator) -> dict[str, float]:
    """d d = 0, d_A d_A f = F f, Bianchi, Leibniz, F = dA-bar + A-bar A-bar."""
    cx, n, dt = a.complex, a.n, a.group.dtype
    top = cx.omega - 1
    out = {"d_d": 0.0, "dA_dA_equals_F": 0.0, "bianchi": 0.0, "leibniz": 0.0, "curvature_formula": 0.0}
    F = curvature(a) if top >= 2 else None
    for k in range(0, top - 1):
        out["d_d"] = max(out["d_d"], _max_abs(d(cx, d(cx, _real_form(cx, k, rng))).values))
        f = random_vector_form(cx, k, n, rng, dt)
        lhs = d_A_vector(a, d_A_vector(a, f))
        out["dA_dA_equals_F"] = max(out["dA_dA_equals_F"], _max_abs(lhs.values - end_act(cx, F, f).values))
    if F is not None:
        bar = connection_bar(a)
        formula = end_d(cx, bar) + end_product(cx, bar, bar)
        out["curvature_formula"] = _max_abs(F.values - formula.values)
        if top >= 3:
            out["bianchi"] = _max_abs(d_A_end(a, F).values)
    for p in range(0, min(top, 3)):
        for q in range(0, top - p):
            phi = random_end_form(cx, p, n, rng, dt)
            f = random_vector_form(cx, q, n, rng, dt)
            lhs = d_A_vector(a, end_act(cx, phi, f))
            rhs = end_act(cx, d_A_end(a, phi), f).values + (-1) ** p * end_act(cx, phi, d_A_vector(a, f)).values
            out["leibniz"] = max(out["leibniz"], _max_abs(lhs.values - rhs))
    return out


def adjoint_identities(a: Connection, rng: np.random.Generator) -> dict[str, float]:
    """<d f, g> = <f, d* g> for real, W-valued and End(W)-valued forms."""
    cx, n, dt = a.complex, a.n, a.group.dtype
    out = {"adjoint_real": 0.0, "adjoint_vector": 0.0, "adjoint_end": 0.0}
    for k in range(0, cx.omega - 1):
        f, g = _real_form(cx, k, rng), _real_form(cx, k + 1, rng)
        out["adjoint_real"] = max(out["adjoint_real"], float(abs(inner(d(cx, f), g) - inner(f, d_star(cx, g)))))
        f, g = random_vector_form(cx, k, n, rng, dt), random_vector_form(cx, k + 1, n, rng, dt)
        err = abs(inner(d_A_vector(a, f), g) - inner(f, d_A_star_vector(a, g)))
        out["adjoint_vector"] = max(out["adjoint_vector"], float(err))
        if k <= 2:
            phi, psi = random_end_form(cx, k, n, rng, dt), random_end_form(cx, k + 1, n, rng, dt)
            err = abs(end_inner(d_A_end(a, phi), psi) - end_inner(phi, d_A_star_end(a, psi)))
            out["adjoint_end"] = max(out["adjoint_end"], float(err))
    return out


def laplacian_identities(a: Connection) -> dict[str, float]:
    """Closed-form Delta_A at degree 0 and the generalized Weitzenboeck formula."""
    cx = a.complex
    out = {"hodge_explicit_vs_composed": 0.0, "connection_laplacian_k0": 0.0, "weitzenboeck": 0.0}
    for k in range(cx.omega):
        hodge_laplacian_matrix(cx, k)  # raises if the two constructions differ
        terms = generalized_weitzenboeck(a, k)
        out["weitzenboeck"] = max(out["weitzenboeck"], _max_abs(terms.total() - connection_laplacian_matrix(a, k)))
    f = random_vector_form(cx, 0, a.n, np.random.default_rng(0), a.group.dtype)
    out["connection_laplacian_k0"] = _max_abs(connection_laplacian(a, f).values - connection_laplacian_k0(a, f).values)
    return out


def gauge_identities(a: Connection, rng: np.random.Generator) -> dict[str, float]:
    """Covariance of F, invariance of the functional and of the Delta_A spectrum."""
    cx = a.complex
    g = GaugeTransformation.random(cx, a.group, rng)
    b = gauge_act_connection(g, a)
    out = {"curvature_covariance": 0.0, "ym_gauge_invariance": 0.0, "residual_gauge_invariance": 0.0,
           "laplacian_spectrum_gauge_invariance": 0.0}
    if cx.omega > 2:
        moved = gauge_act_end_form(cx, g, curvature(a))
        out["curvature_covariance"] = _max_abs(curvature(b).values - moved.values)
        out["ym_gauge_invariance"] = abs(ym_value(b) - ym_value(a))
        ra, rb = residual_norms(ym_residual(a)), residual_norms(ym_residual(b))
        out["residual_gauge_invariance"] = max((abs(ra[e] - rb[e]) for e in ra), default=0.0)
    for k in range(cx.omega):
        ea = np.linalg.eigvalsh(connection_laplacian_matrix(a, k))
        eb = np.linalg.eigvalsh(connection_laplacian_matrix(b, k))
        out["laplacian_spectrum_gauge_invariance"] = max(out["laplacian_spectrum_gauge_invariance"], _max_abs(ea - eb))
    return out


def identity_suite(a: Connection, rng: np.random.Generator) -> dict[str, float]:
    """All identities; also reports the curvature size and the Wilson cross-check."""
    out = {}
    out.update(exterior_identities(a, rng))
    out.update(adjoint_identities(a, rng))
    out.update(laplacian_identities(a))
    out.update(gauge_identities(a, rng))
    cx = a.complex
    if cx.omega > 2:
        F = curvature(a)
        out["ym_wilson_agreement"] = abs(0.5 * float(np.real(end_inner(F, F))) - wilson_action(a))
        out["curvature_max_abs"] = _max_abs(F.values)
    else:
        out["ym_wilson_agreement"] = 0.0
        out["curvature_max_abs"] = 0.0
    return out


IDENTITY_KEYS = (
    "d_d", "dA_dA_equals_F", "bianchi", "leibniz", "curvature_formula",
    "adjoint_real", "adjoint_vector", "adjoint_end",
    "hodge_explicit_vs_composed", "connection_laplacian_k0", "weitzenboeck",
    "curvature_covariance", "ym_gauge_invariance", "residual_gauge_invariance",
    "laplacian_spectrum_gauge_invariance", "ym_wilson_agreement",
)
