from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from ctqw import build_graph, parse_family

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

FINITE_SPECS = (
    [f"complete:n={n}" for n in range(2, 11)]
    + [f"cycle:n={n}" for n in range(3, 13)]
    + [f"path:n={n}" for n in range(2, 13)]
    + [f"glued-trees:n={n}" for n in range(1, 4)]
    + [f"hypercube:n={n}" for n in range(1, 7)]
)
TIMES = np.array([0.1, 1.0, 5.0, 20.0])


@pytest.fixture(params=FINITE_SPECS)
def finite_spec(request):
    return parse_family(request.param)


@st.composite
def connected_graphs(draw, max_n: int = 12):
    """Random spanning tree plus extra edges; origin drawn uniformly."""
    n = draw(st.integers(1, max_n))
    edges = set()
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges.add((u, v))
    if n > 2:
        extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
        edges |= {(min(a, b), max(a, b)) for a, b in extra if a != b}
    origin = draw(st.integers(0, n - 1))
    return build_graph(sorted(edges), origin=origin, n=n)
