import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from graphgauge.graph import Graph, build_complex, random_graph

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def graphs(draw, max_vertices=8, p=0.5):
    """Erdos-Renyi graphs with the natural orientation, drawn through a seed."""
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_graph(n, p, np.random.default_rng(seed))


@st.composite
def oriented_graphs(draw, max_vertices=8):
    """Random graphs re-oriented along a random vertex permutation."""
    g = draw(graphs(max_vertices))
    order = draw(st.permutations(list(range(g.num_vertices))))
    return g.reoriented(order)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def k3():
    return build_complex(Graph.complete(3))


@pytest.fixture
def k4():
    return build_complex(Graph.complete(4))
