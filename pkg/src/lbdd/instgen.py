"""Seeded synthetic instances.

Two cost sources are supported: Euclidean distances between uniform points
in the unit square, and shortest-path distances on a random road-like graph
(k-nearest-neighbour geometric graph made connected by its Euclidean minimum
spanning tree).  Total capacity is ``round(theta * n)`` split over the
centers by a multinomial draw; each center gets a constant overload penalty
drawn uniformly from ``penalty_range``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components, floyd_warshall, minimum_spanning_tree, shortest_path
from scipy.spatial import cKDTree

from .core import PenaltySpec, ProblemInstance

COST_SOURCES = ("euclidean", "road_graph")

# above this many vertices the all-pairs table is too large; run one search per center instead
FLOYD_WARSHALL_MAX_NODES = 1500


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n: int = 1000
    ratio: float = 500
    theta: float = 0.7
    penalty_range: tuple = (1, 200)
    cost_source: str = "euclidean"
    graph_nodes: int | None = None  # road_graph only; default n + k
    avg_degree: int = 4
    scale: int = 1000  # cost units per unit of distance
    centers: int | None = None  # explicit k; overrides ratio when set

    @property
    def k(self) -> int:
        if self.centers is not None:
            return self.centers
        return centers_for_ratio(self.n, self.ratio)

    def problems(self) -> list[str]:
        errs = []
        if self.n < 1:
            errs.append("n must be >= 1")
        if self.ratio <= 0:
            errs.append("ratio must be positive")
        if not 0 < self.theta <= 1:
            errs.append("theta must lie in (0, 1]")
        lo, hi = self.penalty_range
        if lo < 1 or hi < lo:
            errs.append("penalty_range must be positive integers with lo <= hi")
        if self.cost_source not in COST_SOURCES:
            errs.append(f"cost_source must be one of {COST_SOURCES}")
        if self.avg_degree < 1:
            errs.append("avg_degree must be >= 1")
        if self.scale < 1:
            errs.append("scale must be >= 1")
        if self.centers is not None and self.centers < 1:
            errs.append("centers must be >= 1")
        if self.graph_nodes is not None and self.graph_nodes < 2:
            errs.append("graph_nodes must be >= 2")
        return errs


def centers_for_ratio(n: int, ratio: float) -> int:
    """Number of centers for a demand:center ratio (whole centers only)."""
    return max(1, int(n // ratio))


def split_capacity(rng: np.random.Generator, total: int, k: int) -> np.ndarray:
    return rng.multinomial(total, np.full(k, 1.0 / k))


def random_road_graph(rng: np.random.Generator, nodes: int, avg_degree: int = 4, scale: int = 1000):
    """Connected undirected graph on random points with positive integer weights.

    Returns ``(points, adjacency)`` where ``adjacency`` is a symmetric CSR
    matrix of edge lengths.
    """
    pts = rng.random((nodes, 2))
    m = min(avg_degree, nodes - 1)
    _, nbr = cKDTree(pts).query(pts, k=m + 1)
    rows = np.repeat(np.arange(nodes), m)
    cols = nbr[:, 1 : m + 1].ravel()
    dense_w = _edge_weights(pts, rows, cols, scale)
    knn = coo_matrix((dense_w, (rows, cols)), shape=(nodes, nodes)).tocsr()
    knn = knn.maximum(knn.T)
    adj = knn
    if connected_components(knn, directed=False)[0] > 1:
        # stitch components together with the minimum spanning tree of a denser neighbour graph
        wide = min(nodes - 1, 16)
        _, nb = cKDTree(pts).query(pts, k=wide + 1)
        r = np.repeat(np.arange(nodes), wide)
        c = nb[:, 1:].ravel()
        dense = coo_matrix((_edge_weights(pts, r, c, scale), (r, c)), shape=(nodes, nodes)).tocsr()
        if connected_components(dense, directed=False)[0] > 1 and nodes <= 3000:
            dense = _complete_graph(pts, scale)
        mst = minimum_spanning_tree(dense.maximum(dense.T))
        adj = knn.maximum(mst).maximum(mst.T)
    adj = csr_matrix(adj)
    if connected_components(adj, directed=False)[0] > 1:
        raise GraphError("generated graph is not connected")
    return pts, adj


def _edge_weights(pts, rows, cols, scale):
    d = np.linalg.norm(pts[rows] - pts[cols], axis=1)
    return np.maximum(1, np.rint(d * scale)).astype(np.int64)


def _complete_graph(pts, scale):
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    w = np.maximum(1, np.rint(d * scale))
    np.fill_diagonal(w, 0)
    return csr_matrix(w)


def apsp_costs(graph, centers, demands, method: str = "auto") -> np.ndarray:
    """Cost matrix of shortest-path distances, demands x centers.

    ``graph`` is a (sparse or dense) symmetric adjacency matrix of positive
    integer edge weights.  Distances of 0 (a demand sitting on a center
    vertex) are clamped to 1.  ``method`` is ``"floyd-warshall"``,
    ``"dijkstra"`` (one search per center) or ``"auto"``.
    """
    adj = csr_matrix(graph)
    nodes = adj.shape[0]
    if adj.nnz and adj.data.min() <= 0:
        raise GraphError("edge weights must be positive")
    if connected_components(adj, directed=False)[0] > 1:
        raise GraphError("graph is disconnected")
    centers = np.asarray(centers, dtype=np.int64)
    demands = np.asarray(demands, dtype=np.int64)
    if method == "auto":
        method = "floyd-warshall" if nodes <= FLOYD_WARSHALL_MAX_NODES else "dijkstra"
    if method == "floyd-warshall":
        dist = floyd_warshall(adj, directed=False)[np.ix_(demands, centers)]
    elif method == "dijkstra":
        dist = shortest_path(adj, method="D", directed=False, indices=centers).T[demands]
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.maximum(1, np.rint(dist)).astype(np.int64)


def generate(config: GenConfig) -> ProblemInstance:
    errs = config.problems()
    if errs:
        raise ValueError("; ".join(errs))
    rng = np.random.default_rng(config.seed)
    n, k = config.n, config.k
    if config.cost_source == "euclidean":
        demand_pts = rng.random((n, 2))
        center_pts = rng.random((k, 2))
        d = np.linalg.norm(demand_pts[:, None, :] - center_pts[None, :, :], axis=2)
        cm = np.maximum(1, np.rint(d * config.scale)).astype(np.int64)
    else:
        nodes = config.graph_nodes or n + k
        _, adj = random_road_graph(rng, nodes, config.avg_degree, config.scale)
        perm = rng.permutation(nodes)
        centers = perm[:k]
        if nodes >= n + k:
            demands = perm[k : k + n]
        else:
            demands = rng.integers(0, nodes, n)
        cm = apsp_costs(adj, centers, demands)
    caps = split_capacity(rng, int(round(config.theta * n)), k)
    lo, hi = config.penalty_range
    pens = [PenaltySpec.constant(int(p)) for p in rng.integers(lo, hi + 1, k)]
    return ProblemInstance.build(cm, caps, pens)
