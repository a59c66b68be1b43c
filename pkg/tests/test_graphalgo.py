import random

import networkx as nx
import numpy as np
import pytest

from oracle import brute_clique_number, brute_is_clique
from qfgl import formgraph as fg
from qfgl import gf
from qfgl import graphalgo as ga
from qfgl import subspace as ss
from qfgl.errors import CliqueCapExceeded, NotSymmetric


def random_graph(rng, n, p):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return fg.DiGraph.from_edges(n, edges)


def nx_graph(G):
    H = nx.Graph()
    H.add_nodes_from(range(G.vertex_count))
    H.add_edges_from((x, y) for x, y in G.edges() if x < y)
    return H


@pytest.mark.parametrize("seed", range(6))
def test_against_networkx(seed):
    rng = random.Random(seed)
    for _ in range(10):
        n = rng.randrange(1, 45)
        G = random_graph(rng, n, rng.choice([0.05, 0.15, 0.4, 0.8]))
        H = nx_graph(G)
        comps = sorted((frozenset(c) for c in nx.connected_components(H)), key=min)
        assert ga.components(G) == comps
        assert ga.is_connected(G) == nx.is_connected(H)
        d = ga.diameter(G)
        if nx.is_connected(H):
            assert d.connected and d.diameter == nx.diameter(H)
        else:
            assert d.diameter is ga.Disconnected
        rep = ga.clique_number(G)
        expected = max(len(c) for c in nx.find_cliques(H))
        assert rep.omega == expected and brute_is_clique(G.adj, rep.witness)
        ours = sorted(sorted(c) for c in ga.maximal_cliques(G))
        theirs = sorted(sorted(c) for c in nx.find_cliques(H))
        assert ours == theirs


def test_brute_force_small():
    rng = random.Random(42)
    for _ in range(40):
        n = rng.randrange(1, 15)
        G = random_graph(rng, n, rng.random())
        assert ga.clique_number(G).omega == brute_clique_number(G.adj)


def test_diameter_two_witness_matches_bfs():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randrange(3, 40)
        G = random_graph(rng, n, rng.choice([0.3, 0.5, 0.7, 0.95]))
        H = nx_graph(G)
        expected = nx.is_connected(H) and nx.diameter(H) == 2
        assert ga.has_diameter_two(G) == expected
        w = ga.diameter_two_witness(G, chunk=5)
        if w is not None:
            x, y = w
            assert not G.has_edge(x, y) and not (G.rows[x] & G.rows[y])


def test_complete_graph_has_diameter_one():
    K = fg.DiGraph.from_adjacency(~np.eye(5, dtype=bool))
    assert ga.diameter(K).diameter == 1
    assert not ga.has_diameter_two(K)
    assert ga.clique_number(K).omega == 5


def test_edgeless_convention():
    E = fg.DiGraph.from_adjacency(np.zeros((4, 4), dtype=bool))
    assert ga.clique_number(E).omega == 1
    assert len(list(ga.maximal_cliques(E))) == 4


@pytest.mark.parametrize("q,omega", [(5, 2), (9, 3), (13, 3), (17, 3), (25, 5), (29, 4), (37, 4), (41, 5)])
def test_paley_clique_numbers(q, omega):
    # x ~ y iff x - y is a nonzero square; these are the known values
    p = next(p for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41) if q % p == 0)
    k = round(np.log(q) / np.log(p))
    ctx = gf.make_tower(p, 1, k, allow_trivial_extension=True)
    xs = ctx.elements()
    diff = ctx.sub_arr(xs[:, None], xs[None, :])
    adj = ctx.eta_arr(diff) == 1
    G = fg.DiGraph.from_adjacency(adj)
    assert ga.clique_number(G).omega == omega


def test_degeneracy_order_is_permutation():
    rng = random.Random(1)
    G = random_graph(rng, 30, 0.3)
    order = ga.degeneracy_order(G.rows)
    assert sorted(order) == list(range(30))


def test_errors():
    D = fg.DiGraph.from_adjacency([[0, 1], [0, 0]])
    for fn in (ga.components, ga.diameter, ga.clique_number, ga.has_diameter_two):
        with pytest.raises(NotSymmetric):
            fn(D)
    with pytest.raises(NotSymmetric):
        list(ga.maximal_cliques(D))
    K = fg.DiGraph.from_adjacency(~np.eye(6, dtype=bool))
    with pytest.raises(CliqueCapExceeded):
        ga.clique_number(K, cap=5)


def test_report_json():
    G = fg.DiGraph.from_edges(3, [(0, 1)])
    assert ga.diameter(G).to_json()["diameter"] == "disconnected"
    assert ga.clique_number(G).to_json()["omega"] == 2


def test_form_graphs_against_networkx(f27):
    for V in ss.all_subspaces(f27, proper=True)[:8]:
        for Q in (fg.q_plus(f27), fg.q_minus(f27), fg.q_b(f27, 5)):
            G = fg.build_graph(Q, V)
            H = nx_graph(G)
            assert ga.clique_number(G).omega == max(len(c) for c in nx.find_cliques(H))
            assert len(ga.components(G)) == nx.number_connected_components(H)
