"""
Costs from shortest paths on a road-like graph
==============================================

A random geometric graph stands in for a road network.  Centers and demands
are vertices and the cost matrix holds shortest-path distances.
"""

import numpy as np

from lbdd.instgen import apsp_costs, random_road_graph

rng = np.random.default_rng(0)
points, adj = random_road_graph(rng, nodes=300, avg_degree=4, scale=1000)
print("vertices:", adj.shape[0], "undirected edges:", adj.nnz // 2)

centers = rng.choice(300, size=5, replace=False)
demands = rng.integers(0, 300, size=8)

###############################################################################
# Both all-pairs strategies agree; a demand placed on a center vertex costs 1.
fw = apsp_costs(adj, centers, demands, method="floyd-warshall")
dj = apsp_costs(adj, centers, demands, method="dijkstra")
print(fw)
print("methods agree:", bool((fw == dj).all()))
print("on-center cost:", apsp_costs(adj, centers[:1], centers[:1]).item())
