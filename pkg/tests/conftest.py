"""Shared fixtures and helpers for the test suite.

Registers a deterministic hypothesis profile (simulations make per-example
deadlines meaningless) and provides random-instance builders used by several
modules: strongly connected digraphs, reachability oracles, and small agent
pools.
"""

from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def random_strongly_connected_adjacency(
    rng: np.random.Generator, n: int, extra_arc_prob: float = 0.3
) -> np.ndarray:
    """Random strongly connected weighted adjacency: a directed ring backbone
    (guaranteeing strong connectivity) plus Bernoulli extra arcs, weights
    uniform in [0.1, 2.0]."""
    a = np.zeros((n, n))
    for i in range(n):
        a[i, (i - 1) % n] = rng.uniform(0.1, 2.0)
    for j in range(n):
        for k in range(n):
            if j != k and a[j, k] == 0.0 and rng.random() < extra_arc_prob:
                a[j, k] = rng.uniform(0.1, 2.0)
    return a


def reachability_closure(adjacency: np.ndarray) -> np.ndarray:
    """Boolean transitive closure via repeated boolean matrix products:
    closure[j, k] is True iff a walk k -> j exists (following the row =
    incoming-arcs convention of the adjacency matrix)."""
    support = (np.asarray(adjacency) > 0).astype(int)
    n = support.shape[0]
    reach = support.copy()
    for _ in range(n):
        reach = ((reach + reach @ support + reach @ reach) > 0).astype(int)
    return reach > 0
