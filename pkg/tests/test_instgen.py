import networkx as nx
import numpy as np
import pytest
from scipy.sparse import csr_matrix

from lbdd import validate_instance
from lbdd.instgen import GenConfig, GraphError, apsp_costs, centers_for_ratio, generate, random_road_graph


@pytest.mark.parametrize("n, ratio, k", [(65771, 500, 131), (65829, 900, 73), (10, 500, 1)])
def test_centers_for_ratio_table_values(n, ratio, k):
    assert centers_for_ratio(n, ratio) == k
    assert GenConfig(n=n, ratio=ratio).k == k


@pytest.mark.parametrize("source", ["euclidean", "road_graph"])
def test_deterministic(source):
    cfg = GenConfig(seed=11, n=300, ratio=50, cost_source=source)
    a, b = generate(cfg), generate(cfg)
    assert a == b
    assert a.cost_matrix.tobytes() == b.cost_matrix.tobytes()
    assert generate(GenConfig(seed=12, n=300, ratio=50, cost_source=source)) != a


@pytest.mark.parametrize("source", ["euclidean", "road_graph"])
@pytest.mark.parametrize("theta", [0.3, 0.7, 1.0])
def test_valid_and_capacity_sum(source, theta):
    cfg = GenConfig(seed=3, n=257, centers=7, theta=theta, penalty_range=(200, 400), cost_source=source)
    inst = generate(cfg)
    assert validate_instance(inst) == []
    assert inst.k == 7 and inst.n == 257
    assert inst.total_capacity == round(theta * 257)
    ps = [c.penalty.params[0] for c in inst.centers]
    assert all(c.penalty.family == "constant" for c in inst.centers)
    assert all(200 <= p <= 400 for p in ps)


def test_bad_config():
    with pytest.raises(ValueError):
        generate(GenConfig(theta=0))
    with pytest.raises(ValueError):
        generate(GenConfig(penalty_range=(5, 1)))
    with pytest.raises(ValueError):
        generate(GenConfig(cost_source="osm"))


def test_path_graph():
    # a - b - c with weights 2 and 3
    adj = csr_matrix(np.array([[0, 2, 0], [2, 0, 3], [0, 3, 0]]))
    assert apsp_costs(adj, centers=[2], demands=[0]).tolist() == [[5]]


def test_colocated_demand_clamped():
    adj = csr_matrix(np.array([[0, 4], [4, 0]]))
    assert apsp_costs(adj, centers=[0, 1], demands=[0]).tolist() == [[1, 4]]


def test_disconnected_rejected():
    adj = csr_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]]))
    with pytest.raises(GraphError):
        apsp_costs(adj, centers=[0], demands=[2])


def test_road_graph_connected():
    rng = np.random.default_rng(0)
    _, adj = random_road_graph(rng, 400, avg_degree=2)
    g = nx.from_scipy_sparse_array(adj)
    assert nx.is_connected(g)
    assert (adj.data > 0).all()


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("method", ["floyd-warshall", "dijkstra"])
def test_matches_single_source_oracle(seed, method):
    rng = np.random.default_rng(seed)
    _, adj = random_road_graph(rng, 30, avg_degree=3, scale=50)
    g = nx.from_scipy_sparse_array(adj)
    centers = rng.choice(30, 4, replace=False)
    demands = rng.integers(0, 30, 12)
    cm = apsp_costs(adj, centers, demands, method=method)
    for j, c in enumerate(centers):
        lengths = nx.single_source_dijkstra_path_length(g, int(c))
        for i, d in enumerate(demands):
            assert cm[i, j] == max(1, lengths[int(d)])


def test_triangle_inequality():
    rng = np.random.default_rng(4)
    _, adj = random_road_graph(rng, 60, scale=100)
    verts = rng.choice(60, 20, replace=False)
    full = apsp_costs(adj, verts, verts).astype(np.int64)
    np.fill_diagonal(full, 0)
    # d(a, c) <= d(a, b) + d(b, c) for every triple (clamping only affects the diagonal)
    for b in range(20):
        assert (full <= full[:, [b]] + full[[b], :]).all()
