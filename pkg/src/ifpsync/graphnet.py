"""Weighted digraphs: construction, connectivity, Laplacians, Perron weights.

Adjacency convention: ``a[j, k] > 0`` means there is an arc from node ``k``
into node ``j`` (information flows k -> j), so row ``j`` collects the arcs
*into* node ``j`` and the in-degree ``d_plus[j]`` is the j-th row sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import NegativeWeight, NotSquare, NotStronglyConnected, SelfLoop

__all__ = [
    "Digraph",
    "ConnectivityReport",
    "PerronWeights",
    "build_digraph",
    "degrees",
    "connectivity",
    "laplacian",
    "perron_weights",
]

#: weights at or below this are treated as absent arcs when deciding
#: connectivity (support pattern only; numerics elsewhere use the raw weights)
SUPPORT_THRESHOLD = 1e-15

#: relative tolerance for the zero singular value of L^T
_NULLSPACE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Digraph:
    """A weighted digraph on nodes 0..n-1 with non-negative adjacency."""

    n: int
    adjacency: NDArray[np.float64]

    def support(self) -> NDArray[np.bool_]:
        """Boolean arc pattern: support()[j, k] is True iff arc k -> j exists."""
        return self.adjacency > SUPPORT_THRESHOLD


@dataclass(frozen=True)
class ConnectivityReport:
    strongly_connected: bool
    quasi_strongly_connected: bool
    scc_count: int


@dataclass(frozen=True, eq=False)
class PerronWeights:
    """Positive left null vector of the Laplacian, normalized to sum 1."""

    p: NDArray[np.float64]

    def residual(self, g: Digraph) -> float:
        """Max-norm of p^T L, for diagnostics."""
        return float(np.abs(self.p @ laplacian(g)).max())


def build_digraph(adjacency) -> Digraph:
    """Validate an adjacency matrix and wrap it as a Digraph.

    Parameters
    ----------
    adjacency : array_like
        Square matrix with non-negative entries and zero diagonal; entry
        (j, k) is the weight of the arc from node k into node j.

    Raises
    ------
    NotSquare, NegativeWeight, SelfLoop
    """
    a = np.array(adjacency, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSquare(f"adjacency must be square and non-empty, got shape {a.shape}")
    if np.any(a < 0.0):
        j, k = np.argwhere(a < 0.0)[0]
        raise NegativeWeight(f"negative weight a[{j},{k}] = {a[j, k]}")
    if np.any(np.diagonal(a) != 0.0):
        (j,) = np.argwhere(np.diagonal(a) != 0.0)[0]
        raise SelfLoop(f"nonzero diagonal entry a[{j},{j}] = {a[j, j]}")
    a.setflags(write=False)
    return Digraph(n=a.shape[0], adjacency=a)


def degrees(g: Digraph) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Return (d_plus, d_minus): weighted in-degrees (row sums) and out-degrees
    (column sums)."""
    a = g.adjacency
    return a.sum(axis=1), a.sum(axis=0)


def laplacian(g: Digraph) -> NDArray[np.float64]:
    """Laplacian L = diag(d_plus) - A; every row sums to zero."""
    d_plus, _ = degrees(g)
    return np.diag(d_plus) - g.adjacency


def _successor_lists(g: Digraph) -> list[list[int]]:
    # successors of k are the nodes j with an arc k -> j, i.e. support column k
    sup = g.support()
    return [list(np.flatnonzero(sup[:, k])) for k in range(g.n)]


def _tarjan_scc_count(succ: list[list[int]]) -> int:
    """Number of strongly connected components (iterative Tarjan)."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    count = 0
    next_index = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = next_index
                next_index += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if index[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                count += 1
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    if w == v:
                        break
    return count


def _reaches_all(succ: list[list[int]], root: int, n: int) -> bool:
    seen = [False] * n
    seen[root] = True
    frontier = [root]
    reached = 1
    while frontier:
        v = frontier.pop()
        for w in succ[v]:
            if not seen[w]:
                seen[w] = True
                reached += 1
                frontier.append(w)
    return reached == n


def connectivity(g: Digraph) -> ConnectivityReport:
    """Strong / quasi-strong connectivity of the arc support pattern.

    Quasi-strong connectivity means some root node reaches every node along
    arc directions (equivalently, the graph has a directed spanning tree).
    """
    succ = _successor_lists(g)
    scc_count = _tarjan_scc_count(succ)
    strong = scc_count == 1
    quasi = strong or any(_reaches_all(succ, r, g.n) for r in range(g.n))
    return ConnectivityReport(
        strongly_connected=strong,
        quasi_strongly_connected=quasi,
        scc_count=scc_count,
    )


def perron_weights(g: Digraph) -> PerronWeights:
    """Left null vector p of the Laplacian: p^T L = 0, p > 0, sum(p) = 1.

    Exists with strictly positive entries exactly when the graph is strongly
    connected; computed from the SVD null space of L^T.

    Raises
    ------
    NotStronglyConnected
    """
    if not connectivity(g).strongly_connected:
        raise NotStronglyConnected("Perron weights require a strongly connected digraph")
    lap_t = laplacian(g).T
    _, s, vt = np.linalg.svd(lap_t)
    if g.n > 1 and s[-1] > _NULLSPACE_RTOL * s[0]:
        raise NotStronglyConnected(
            f"L^T has no numerical null vector (smallest sv {s[-1]:.3e})"
        )
    p = vt[-1]
    p = p * np.sign(p[np.abs(p).argmax()])
    if np.any(p <= 0.0):
        raise NotStronglyConnected("null vector of L^T is not strictly positive")
    p = p / p.sum()
    p.setflags(write=False)
    return PerronWeights(p=p)
