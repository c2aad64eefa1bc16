from __future__ import annotations

import numpy as np
import pytest

from dagcraft import CausalGraph, Edge, generate_toy_dataset

GENERATING_EDGES = (
    ("Winter_Ind", "Sea_Temperature", 3),
    ("Winter_Ind", "Wind_Speed", 3),
    ("Wind_Speed", "Rotational_RPM", 3),
    ("Rotational_RPM", "Energy_Yield", 3),
    ("Strength_Degradation", "Energy_Yield", 2),
    ("Wind_Speed", "Perceived_Noise", 3),
    ("Rotational_RPM", "Perceived_Noise", 3),
)

# the first-draft graph an expert would sketch: the generating edges plus
# a suspected Degradation->RPM link and extra weather inputs to Energy
DRAFT_EDGES = (
    ("Winter_Ind", "Sea_Temperature", 3),
    ("Winter_Ind", "Wind_Speed", 3),
    ("Strength_Degradation", "Rotational_RPM", 3),
    ("Wind_Speed", "Rotational_RPM", 3),
    ("Rotational_RPM", "Energy_Yield", 3),
    ("Wind_Speed", "Energy_Yield", 2),
    ("Sea_Temperature", "Energy_Yield", 1),
    ("Wind_Speed", "Perceived_Noise", 3),
    ("Rotational_RPM", "Perceived_Noise", 3),
)


def graph_from(edges, nodes=None, version=0):
    names = set()
    for parent, child, _ in edges:
        names.add(parent)
        names.add(child)
    if nodes is not None:
        names.update(nodes)
    return CausalGraph(
        frozenset(names),
        tuple(Edge(p, c, b) for p, c, b in edges),
        version,
    )


def forward_simulate(fit, n, seed):
    """Draw n rows from the fitted equations, bypassing the path algebra.

    Exogenous nodes are drawn normal with their fitted moments, children
    follow their fitted linear equations with fresh normal noise. The
    empirical covariance of the draw is an independent oracle for the
    model-implied covariance matrix.
    """
    rng = np.random.default_rng(seed)
    order = list(fit.induced.names)
    columns = {}
    for name in order:
        if name in fit.equations:
            eq = fit.equations[name]
            value = np.full(n, eq.intercept.estimate)
            for parent, stat in eq.coefficients.items():
                value = value + stat.estimate * columns[parent]
            value = value + rng.normal(0.0, np.sqrt(eq.residual_variance), size=n)
        else:
            mean, var = fit.exogenous_moments[name]
            value = rng.normal(mean, np.sqrt(var), size=n)
        columns[name] = value
    return order, np.column_stack([columns[name] for name in order])


@pytest.fixture(scope="session")
def toy_small():
    return generate_toy_dataset(400, 1)


@pytest.fixture(scope="session")
def toy_large():
    return generate_toy_dataset(20000, 1)


@pytest.fixture(scope="session")
def generating_graph(toy_large):
    return graph_from(GENERATING_EDGES, nodes=toy_large.names)


@pytest.fixture(scope="session")
def draft_graph(toy_large):
    return graph_from(DRAFT_EDGES, nodes=toy_large.names)
