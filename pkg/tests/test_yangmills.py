import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphgauge.calculus import Form
from graphgauge.errors import UnsupportedPotential, ValidationError
from graphgauge.gauge import (
    Connection,
    GaugeTransformation,
    end_eval,
    gauge_act_connection,
    wilson_curvature,
)
from graphgauge.graph import Graph, build_complex, disjoint_union, random_graph, spanning_forest
from graphgauge.groups import Group
from graphgauge.yangmills import (
    OptimizerOptions,
    YMProblem,
    constant_higgs,
    descend,
    holonomy_traces,
    is_trivial_endpoint,
    known_families,
    lie_pairing,
    max_connection,
    path_join,
    path_join_product_check,
    random_higgs,
    residual_norms,
    retract,
    spanning_tree_gauge_fix,
    u1_grid_oracle,
    u1_tree_gauge_connection,
    wilson_action,
    ym_gradient,
    ym_optimize,
    ym_residual,
    ym_upper_bound,
    ym_value,
    ymh_pairing,
    ymh_residuals,
    ymh_value,
)

from .conftest import graphs, seeds

GROUPS = [Group("U1"), Group("On", 3), Group("Un", 2)]


def inf_norm(a):
    return max(residual_norms(ym_residual(a)).values(), default=0.0)


def u1_angles(cx, theta):
    return u1_tree_gauge_connection(cx, dict(zip(cx.graph.edges, theta)))


# Functional --------------------------------------------------------------------


def test_flat_value_zero(k4):
    assert ym_value(Connection.trivial(k4, Group("Un", 2))) == 0.0


def test_k3_minus_one_attains_bound(k3):
    a = Connection(k3, Group("U1"), -np.ones((3, 1, 1)))
    assert ym_value(a) == pytest.approx(2.0, abs=1e-14)
    assert ym_upper_bound(a) == 2.0


def test_value_independent_of_orientation(rng):
    g = random_graph(7, 0.7, rng)
    a = Connection.random(build_complex(g), Group("Un", 2), rng)
    order = list(rng.permutation(7))
    cx2 = build_complex(g.reoriented(order))
    b = Connection.from_function(cx2, a.group, a)
    assert abs(ym_value(a) - ym_value(b)) < 1e-12
    na, nb = residual_norms(ym_residual(a)), residual_norms(ym_residual(b))
    for (u, v), x in na.items():
        y = nb[(u, v)] if (u, v) in nb else nb[(v, u)]
        assert abs(x - y) < 1e-12


def test_u1_wilson_closed_form(k4, rng):
    theta = rng.uniform(0, 2 * np.pi, 6)
    a = u1_angles(k4, theta)
    pos = {e: i for i, e in enumerate(k4.graph.edges)}
    expected = sum(
        1 - np.cos(theta[pos[(i, j)]] + theta[pos[(j, k)]] - theta[pos[(i, k)]]) for i, j, k in k4.simplices[2]
    )
    assert ym_value(a) == pytest.approx(expected, abs=1e-12)


# Residuals and gradient ----------------------------------------------------------


def test_residual_examples(k3, k4):
    assert inf_norm(Connection.trivial(k4, Group("Un", 2))) == 0
    for alpha in (0.3, 1.0, 2.5):
        assert inf_norm(u1_tree_gauge_connection(k3, {(1, 2): alpha})) > 1e-3
    fam = known_families("K4")[1]
    for alpha in (0.0, 0.4, 2.0):
        assert inf_norm(fam.connection(k4, alpha)) < 1e-12


def test_u1_gradient_matches_phase_formula(k4, rng):
    theta = rng.uniform(0, 2 * np.pi, 6)
    a = u1_angles(k4, theta)
    pos = {e: i for i, e in enumerate(k4.graph.edges)}
    expected = np.zeros(6)
    for i, j, k in k4.simplices[2]:
        s = np.sin(theta[pos[(i, j)]] + theta[pos[(j, k)]] - theta[pos[(i, k)]])
        expected[pos[(i, j)]] += s
        expected[pos[(j, k)]] += s
        expected[pos[(i, k)]] -= s
    # the gradient is i * dYM/dtheta in the Lie algebra of U(1)
    assert np.allclose(ym_gradient(a)[:, 0, 0], 1j * expected, atol=1e-14)


@pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.kind)
def test_gradient_finite_difference(group, k4, rng):
    for _ in range(5):
        a = Connection.random(k4, group, rng)
        xi = group.random_tangent(rng, 6)
        eps = 1e-6
        fd = (ym_value(retract(a, xi, eps)) - ym_value(retract(a, xi, -eps))) / (2 * eps)
        pred = lie_pairing(xi, ym_gradient(a))
        assert abs(fd - pred) <= 1e-5 * max(1.0, abs(pred))


@pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.kind)
def test_gradient_is_transported_residual(group, k4, rng):
    a = Connection.random(k4, group, rng)
    res = ym_residual(a)
    grad = ym_gradient(a)
    for r, e in enumerate(k4.graph.edges):
        A = a.mats[r]
        assert np.allclose(grad[r], -0.5 * A.conj().T @ res[e] @ A, atol=1e-13)
        assert np.isclose(np.linalg.norm(grad[r], 2), 0.5 * np.linalg.norm(res[e], 2))


def test_gradient_vanishes_with_residual(k4):
    for fam in known_families("K4"):
        for alpha in fam.parameters(8):
            a = fam.connection(k4, alpha)
            assert np.max(np.abs(ym_gradient(a))) < 1e-8 and inf_norm(a) < 1e-8
    assert not np.any(ym_gradient(Connection.trivial(k4, Group("Un", 2))))


# Gauge fixing and extremal connections ---------------------------------------------


def test_gauge_fix_tree_graph(rng):
    cx = build_complex(Graph.path(5))
    fixed, _ = spanning_tree_gauge_fix(Connection.random(cx, Group("Un", 2), rng))
    assert np.array_equal(fixed.mats, np.broadcast_to(np.eye(2), fixed.mats.shape))


def test_gauge_fix_already_trivial(k4):
    tree = u1_tree_gauge_connection(k4, {(1, 2): 0.3, (1, 3): 1.2, (2, 3): -0.5})
    fixed, g = spanning_tree_gauge_fix(tree)
    assert np.allclose(fixed.mats, tree.mats, atol=1e-15)
    assert np.allclose(g.mats, 1.0)


def test_gauge_fix_u2_k4(k4, rng):
    a = Connection.random(k4, Group("Un", 2), rng)
    fixed, g = spanning_tree_gauge_fix(a)
    for e in spanning_forest(k4.graph).tree_edges:
        assert np.array_equal(fixed(*e), np.eye(2))
    assert abs(ym_value(fixed) - ym_value(a)) < 1e-12
    assert np.allclose(gauge_act_connection(g, a).mats, fixed.mats, atol=1e-12)


def test_gauge_fix_forest(rng):
    g = disjoint_union(Graph.complete(3), Graph.complete(4))
    a = Connection.random(build_complex(g), Group("On", 3), rng)
    fixed, _ = spanning_tree_gauge_fix(a)
    forest = spanning_forest(g)
    assert forest.roots == (0, 3)
    for e in forest.tree_edges:
        assert np.array_equal(fixed(*e), np.eye(3))


def test_max_connection_examples(k3, k4):
    assert ym_value(max_connection(k3)) == 2
    mc = max_connection(k4)
    tree = set(spanning_forest(k4.graph).tree_edges)
    for e, m in zip(k4.graph.edges, mc.mats):
        assert m[0, 0] == (1 if e in tree else -1)
    assert ym_value(mc) == 8


@given(graphs(max_vertices=9, p=0.6))
def test_max_connection_flips_every_triangle(g):
    cx = build_complex(g)
    if cx.omega < 3:
        return
    mc = max_connection(cx)
    hol = wilson_curvature(mc)
    for t in cx.simplices[2]:
        assert np.array_equal(end_eval(cx, hol, t), -np.eye(1))
    assert ym_value(mc) == ym_upper_bound(mc)


# Invariants ------------------------------------------------------------------------


@given(graphs(max_vertices=7, p=0.7), st.sampled_from(GROUPS), seeds)
def test_bounds_gauge_invariance_and_wilson(g, group, seed):
    cx = build_complex(g)
    rng = np.random.default_rng(seed)
    a = Connection.random(cx, group, rng)
    value = ym_value(a)
    assert -1e-12 <= value <= ym_upper_bound(a) + 1e-12
    assert abs(value - wilson_action(a)) < 1e-10
    b = gauge_act_connection(GaugeTransformation.random(cx, group, rng), a)
    assert abs(ym_value(b) - value) < 1e-10
    assert abs(inf_norm(b) - inf_norm(a)) < 1e-10


# Optimizer ------------------------------------------------------------------------


def test_k3_multistart_hits_plus_minus_one(k3):
    report = ym_optimize(YMProblem(k3, Group("U1")), "minimize", OptimizerOptions(starts=20, seed=7))
    assert report.converged
    from graphgauge.yangmills import multistart

    runs = multistart(YMProblem(k3, Group("U1")), "minimize", OptimizerOptions(starts=20, seed=7))
    for r in runs:
        assert r.converged
        z = r.connection(1, 2)[0, 0]
        assert min(abs(z - 1), abs(z + 1)) < 1e-6


@pytest.mark.parametrize("direction, target", [("minimize", 0.0), ("maximize", 8.0)])
def test_k4_extremes(k4, direction, target):
    report = ym_optimize(YMProblem(k4, Group("U1")), direction, OptimizerOptions(starts=4))
    assert report.converged
    assert report.value == pytest.approx(target, abs=1e-9)
    assert report.residual_inf_norm < 1e-6
    assert inf_norm(report.connection) < 1e-6


def test_descent_trace_monotone(rng):
    cx = build_complex(random_graph(6, 0.8, rng))
    for group, direction in [(Group("Un", 2), "minimize"), (Group("On", 3), "maximize"), (Group("U1"), "minimize")]:
        r = descend(Connection.random(cx, group, rng), direction, OptimizerOptions(max_iter=300))
        steps = np.diff(r.trace)
        if direction == "minimize":
            assert np.all(steps <= 1e-12)
        else:
            assert np.all(steps >= -1e-12)


def test_non_convergence_reported(k4, rng):
    r = descend(Connection.random(k4, Group("Un", 2), rng), "minimize", OptimizerOptions(max_iter=2))
    assert not r.converged and r.iterations == 2


def test_endpoint_classification(k4):
    assert is_trivial_endpoint(max_connection(k4))
    assert is_trivial_endpoint(Connection.trivial(k4, Group("U1")))
    assert not is_trivial_endpoint(known_families("K4")[1].connection(k4, 0.0))


def test_report_fields(k3):
    r = ym_optimize(YMProblem(k3, Group("U1")), "maximize", OptimizerOptions(starts=2))
    assert r.gauge_fixed and r.gauge is not None
    assert set(r.residuals) == set(k3.graph.edges)
    assert r.endpoints and r.endpoints[0]["trivial"]
    assert 0 <= r.value <= 2 + 1e-12
    assert len(holonomy_traces(r.connection)) == 1


def test_bad_direction(k3):
    with pytest.raises(ValidationError):
        descend(Connection.trivial(k3, Group("U1")), "sideways")


# Families and oracle ----------------------------------------------------------------


def test_k4_family_examples(k4):
    fams = known_families("K4")
    a = fams[1].connection(k4, 0.0)
    assert np.allclose([a(1, 2)[0, 0], a(1, 3)[0, 0], a(2, 3)[0, 0]], [1, 1, -1])
    assert inf_norm(a) < 1e-15
    assert inf_norm(fams[2].connection(k4, np.pi / 2)) < 1e-15


def test_families_sampled_and_perturbed(k3, k4, rng):
    for name, cx in (("K3", k3), ("K4", k4)):
        for fam in known_families(name):
            for alpha in fam.parameters(16):
                assert inf_norm(fam.connection(cx, alpha)) < 1e-10
                angles = np.array(fam.angles(alpha))
                # off-family direction: move one free edge by 0.1 rad
                bumped = angles.copy()
                bumped[0] += 0.1
                if name == "K4" and fam.n_params == 1:
                    # a bump along the curve itself could stay on-family; use the normal of the last angle
                    bumped = angles.copy()
                    bumped[-1] += 0.1
                moved = u1_tree_gauge_connection(cx, dict(zip(fam.free_edges, bumped)))
                assert inf_norm(moved) > 1e-3


def test_unknown_family_name():
    with pytest.raises(ValidationError):
        known_families("K5")


def test_grid_refuses_many_free_edges():
    with pytest.raises(ValidationError, match="refusing"):
        u1_grid_oracle(build_complex(Graph.complete(5)), 10)


def test_k3_grid_resolution_360(k3):
    grid = u1_grid_oracle(k3, 360, tol=1e-3)
    assert set(grid.indices[:, 0].tolist()) == {0, 180}


def test_k4_grid_intersection_points(k4):
    grid = u1_grid_oracle(k4, 60)
    for target in ([15, 45, 15], [45, 15, 45]):  # (i, -i, i) and (-i, i, -i)
        assert target in grid.indices.tolist()


# Path joins ---------------------------------------------------------------------------


def test_path_join_shape():
    g = path_join(Graph.complete(3), Graph.complete(4), 2)
    assert g.num_vertices == 3 + 1 + 4
    assert (2, 3) in g.edges and (3, 4) in g.edges


def test_path_join_k3_k3():
    rep = path_join_product_check(Graph.complete(3), Graph.complete(3), 2)
    assert rep.pairs == 4 and rep.passed


def test_path_join_k3_k4_trivial():
    g = path_join(Graph.complete(3), Graph.complete(4), 1)
    assert inf_norm(Connection.trivial(build_complex(g), Group("U1"))) == 0
    rep = path_join_product_check(Graph.complete(3), Graph.complete(4), 1, samples=3)
    assert rep.passed


def test_path_join_needs_known_pieces():
    with pytest.raises(ValidationError):
        path_join_product_check(Graph.path(3), Graph.complete(3), 1)


# Yang-Mills-Higgs ---------------------------------------------------------------------


def test_ymh_zero_higgs(k4, rng):
    a = Connection.random(k4, Group("Un", 2), rng)
    phi = Form(0, np.zeros((4, 2), dtype=complex))
    assert ymh_value(a, phi) == pytest.approx(ym_value(a), abs=1e-14)
    edge, vertex = ymh_residuals(a, phi)
    res = ym_residual(a)
    assert all(np.allclose(edge[e], res[e], atol=1e-15) for e in res)
    assert not np.any(vertex)


def test_ymh_flat_constant_higgs(k4):
    a = Connection.trivial(k4, Group("Un", 2))
    phi = constant_higgs(k4, [1.0, 2.0 - 1j])
    assert ymh_value(a, phi) == pytest.approx(0.0, abs=1e-14)
    _, vertex = ymh_residuals(a, phi)
    assert np.allclose(vertex, 0)


@pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.kind)
def test_ymh_pairing_matches_finite_difference(group, k4, rng):
    for _ in range(4):
        a = Connection.random(k4, group, rng)
        phi = random_higgs(k4, group, rng)
        xi = group.random_tangent(rng, 6)
        eta = random_higgs(k4, group, rng).values
        edge, vertex = ymh_residuals(a, phi)
        eps = 1e-6

        def f(t):
            return ymh_value(retract(a, xi, t), Form(0, phi.values + t * eta))

        fd = (f(eps) - f(-eps)) / (2 * eps)
        pred = ymh_pairing(a, edge, vertex, xi, eta)
        assert abs(fd - pred) <= 1e-5 * max(1.0, abs(pred))


def test_ymh_errors(k4, rng):
    a = Connection.random(k4, Group("Un", 2), rng)
    with pytest.raises(ValidationError):
        ymh_value(a, Form(0, np.zeros((4, 3), dtype=complex)))
    phi = random_higgs(k4, a.group, rng)
    with pytest.raises(UnsupportedPotential):
        ymh_residuals(a, phi, potential="quartic")
    with pytest.raises(UnsupportedPotential):
        ymh_value(a, phi, potential="quartic")
