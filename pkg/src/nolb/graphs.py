"""Interaction graph, behind graph, relaxed behind graph, connectivity.

The interaction graph joins agents within unit distance.  The behind
graph directs an edge (i, j) when j sits in the critical region of i;
it is a directed subgraph of the interaction graph.  Relaxation removes
behind edges whose target is already cared for by an interaction
neighbor, following a random owner order drawn fresh each time step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_GEOMETRY_EPS

# When True, every relaxation call exhaustively re-checks its defining
# property after construction.  Enabled by the test suite.
VALIDATE_RELAXATION = False

# Constraint vectors shorter than this are treated as absent; they can
# only arise between coincident agents when r* = 1 and impose nothing.
TINY_NORM = 1e-12


@dataclass(frozen=True)
class DirectedGraph:
    n_vertices: int
    edges: frozenset

    def __post_init__(self):
        for i, j in self.edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise ValueError(f"edge ({i},{j}) out of range")

    def to_mask(self) -> np.ndarray:
        mask = np.zeros((self.n_vertices, self.n_vertices), dtype=bool)
        for i, j in self.edges:
            mask[i, j] = True
        return mask


@dataclass(frozen=True)
class UndirectedGraph:
    """Edges stored as sorted (i, j) tuples with i < j."""

    n_vertices: int
    edges: frozenset

    def __post_init__(self):
        canon = frozenset((min(i, j), max(i, j)) for i, j in self.edges)
        object.__setattr__(self, "edges", canon)
        for i, j in canon:
            if i == j:
                raise ValueError("self-loops are not allowed")
            if not (0 <= i and j < self.n_vertices):
                raise ValueError(f"edge ({i},{j}) out of range")

    def to_mask(self) -> np.ndarray:
        mask = np.zeros((self.n_vertices, self.n_vertices), dtype=bool)
        for i, j in self.edges:
            mask[i, j] = True
            mask[j, i] = True
        return mask


def _positions_of(config) -> np.ndarray:
    pos = getattr(config, "positions", config)
    return np.asarray(pos, dtype=float)


def pairwise_distances(positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(distances, difference vectors) with diffs[i, j] = x_j - x_i."""
    diffs = positions[None, :, :] - positions[:, None, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs))
    return dist, diffs


def adjacency_from_distances(dist: np.ndarray,
                             geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> np.ndarray:
    adj = dist <= 1.0 + geometry_eps
    np.fill_diagonal(adj, False)
    return adj


def behind_mask(dist: np.ndarray, diffs: np.ndarray, desired: np.ndarray,
                r_star: float,
                geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> np.ndarray:
    """mask[i, j] is True when j lies in the critical region of i.

    Membership needs distance in [1 - r*, 1] (inclusive with eps slack,
    biased toward inclusion) and a nonpositive inner product between i's
    desired velocity and the offset to j.  A zero desired velocity makes
    the inner-product condition hold for every annulus member.
    """
    annulus = (dist >= 1.0 - r_star - geometry_eps) & (dist <= 1.0 + geometry_eps)
    inner = np.einsum("id,ijd->ij", desired, diffs)
    mask = annulus & (inner <= 0.0)
    np.fill_diagonal(mask, False)
    return mask


def connected_from_adjacency(adj: np.ndarray) -> bool:
    """Breadth-first reachability from vertex 0 over a boolean adjacency."""
    n = adj.shape[0]
    if n <= 1:
        return True
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    frontier = visited.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~visited
        if not nxt.any():
            break
        visited |= nxt
        frontier = nxt
    return bool(visited.all())


def relax_mask(adj: np.ndarray, behind: np.ndarray,
               order: np.ndarray) -> np.ndarray:
    """Greedy single-pass relaxation of a behind mask.

    Edges are visited with owners in `order` priority and targets in
    ascending index; an edge (i, j) is kept unless some already-kept
    edge (k, j) has k an interaction neighbor of i.
    """
    n = adj.shape[0]
    kept = np.zeros_like(behind)
    owners, targets = np.nonzero(behind)
    if owners.size:
        rank = np.empty(n, dtype=int)
        rank[np.asarray(order, dtype=int)] = np.arange(n)
        idx = np.lexsort((targets, rank[owners]))
        keepers_by_target: dict[int, list[int]] = {}
        for i, j in zip(owners[idx].tolist(), targets[idx].tolist()):
            carers = keepers_by_target.get(j)
            if carers is not None and any(adj[i, k] for k in carers):
                continue
            kept[i, j] = True
            if carers is None:
                keepers_by_target[j] = [i]
            else:
                carers.append(i)
    if VALIDATE_RELAXATION:
        _assert_relaxation(adj, behind, kept)
    return kept


def _assert_relaxation(adj: np.ndarray, behind: np.ndarray,
                       kept: np.ndarray) -> None:
    if (kept & ~behind).any():
        raise AssertionError("relaxed graph is not a subgraph of the behind graph")
    k = kept.astype(np.int64)
    conflicts = np.einsum("ik,ij,jk->k", k, adj.astype(np.int64), k)
    if (conflicts > 0).any():
        raise AssertionError("relaxation property violated: adjacent owners share a target")


def interaction_graph(config, geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> UndirectedGraph:
    """Undirected edge {i, j} whenever |x_i - x_j| <= 1 (+ eps)."""
    positions = _positions_of(config)
    dist, _ = pairwise_distances(positions)
    adj = adjacency_from_distances(dist, geometry_eps)
    ii, jj = np.nonzero(np.triu(adj, k=1))
    edges = frozenset(zip(ii.tolist(), jj.tolist()))
    return UndirectedGraph(n_vertices=positions.shape[0], edges=edges)


def behind_graph(config, averages, r_star: float,
                 geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> DirectedGraph:
    """Directed edge (i, j) whenever j is in the critical region of i."""
    positions = _positions_of(config)
    averages = np.asarray(averages, dtype=float)
    dist, diffs = pairwise_distances(positions)
    mask = behind_mask(dist, diffs, averages - positions, r_star, geometry_eps)
    ii, jj = np.nonzero(mask)
    edges = frozenset(zip(ii.tolist(), jj.tolist()))
    return DirectedGraph(n_vertices=positions.shape[0], edges=edges)


def relax_behind_graph(interaction: UndirectedGraph, behind: DirectedGraph,
                       permutation) -> DirectedGraph:
    """Relaxed behind graph under the owner order given by `permutation`.

    The result is a subgraph of `behind` in which, for every interaction
    edge {i, j}, at most one of i and j keeps an edge to any shared
    target.
    """
    if interaction.n_vertices != behind.n_vertices:
        raise ValueError("graphs must share the vertex set")
    adj = interaction.to_mask()
    behind_m = behind.to_mask()
    if (behind_m & ~adj).any():
        raise ValueError("behind graph must be a directed subgraph of the interaction graph")
    kept = relax_mask(adj, behind_m, np.asarray(permutation, dtype=int))
    ii, jj = np.nonzero(kept)
    edges = frozenset(zip(ii.tolist(), jj.tolist()))
    return DirectedGraph(n_vertices=behind.n_vertices, edges=edges)


def is_connected(g: UndirectedGraph) -> bool:
    """True iff the graph has a single connected component."""
    if g.n_vertices < 1:
        raise ValueError("graph needs at least one vertex")
    return connected_from_adjacency(g.to_mask())
