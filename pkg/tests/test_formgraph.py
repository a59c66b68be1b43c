import itertools

import networkx as nx
import numpy as np
import pytest

from conftest import naive
from qfgl import formgraph as fg
from qfgl import gf
from qfgl import subspace as ss
from qfgl.errors import GraphCapExceeded, ZeroForm


def literal_rule(ref, a, b, c):
    """always undirected iff a == c, or b == 0 and a == -c != 0"""
    return a == c or (b == 0 and a != 0 and a == ref.neg(c))


@pytest.mark.parametrize("params", [(3, 1, 2), (2, 1, 2), (5, 1, 2)])
def test_undirected_classification_by_oracle(params):
    ctx = gf.make_tower(*params)
    ref = naive(ctx)
    N = ctx.size
    mul = [[ref.mul(x, y) for y in range(N)] for x in range(N)]
    add = [[ref.add(x, y) for y in range(N)] for x in range(N)]
    sq = [mul[x][x] for x in range(N)]
    subspaces = ref.all_subspaces()
    triples = itertools.product(range(N), repeat=3)
    if N > 9:
        rng = np.random.default_rng(0)
        triples = [tuple(t) for t in rng.integers(0, N, (150, 3))] + [(a, 0, ref.neg(a)) for a in range(1, N)]
    checked = 0
    for a, b, c in triples:
        if (a, b, c) == (0, 0, 0):
            continue
        vals = [[add[add[mul[a][sq[x]]][mul[b][mul[x][y]]]][mul[c][sq[y]]] for y in range(N)] for x in range(N)]
        observed = all(
            (vals[x][y] in V) == (vals[y][x] in V) for V in subspaces for x in range(N) for y in range(x + 1, N)
        )
        assert observed == literal_rule(ref, a, b, c) == fg.classify_form(ctx, a, b, c).always_undirected
        checked += 1
    assert checked >= min(150, N**3 - 1)


def test_predicted_count_f9(f9):
    count = sum(
        fg.classify_form(f9, a, b, c).always_undirected
        for a, b, c in itertools.product(range(9), repeat=3)
        if (a, b, c) != (0, 0, 0)
    )
    # a = c (9*9 - 1 nonzero) plus b = 0, a = -c != a (8)
    assert count == 80 + 8 == 88


def test_classify_labels(f9):
    m1 = f9.neg(1)
    assert str(fg.classify_form(f9, 0, 1, 0)) == "Star"
    assert str(fg.classify_form(f9, 0, 5, 0)) == "ScalarMultipleOf(Star, 5)"
    assert str(fg.classify_form(f9, 1, 0, 1)) == "Plus"
    assert str(fg.classify_form(f9, 1, 0, m1)) == "Minus"
    assert str(fg.classify_form(f9, 1, 4, 1)) == "Qb(4)"
    cls = fg.classify_form(f9, 2, f9.mul(2, 4), 2)
    assert cls.kind is fg.FormKind.QB and cls.b == 4 and cls.scale == 2
    assert not fg.classify_form(f9, 1, 1, 0).always_undirected
    with pytest.raises(ZeroForm):
        fg.classify_form(f9, 0, 0, 0)
    with pytest.raises(ZeroForm):
        fg.QuadForm(f9, 0, 0, 0)
    with pytest.raises(ValueError):
        fg.q_b(f9, 0)


def test_even_characteristic_minus_is_plus(f4):
    assert fg.q_minus(f4).cls.kind is fg.FormKind.PLUS


@pytest.mark.parametrize("params", [(3, 1, 2), (3, 1, 3), (2, 1, 3), (3, 2, 2)])
def test_build_graph_matches_oracle(params):
    ctx = gf.make_tower(*params)
    ref = naive(ctx)
    rng = np.random.default_rng(5)
    Vs = ss.all_subspaces(ctx)
    for _ in range(4):
        a, b, c = (int(t) for t in rng.integers(0, ctx.size, 3))
        if (a, b, c) == (0, 0, 0):
            continue
        V = Vs[int(rng.integers(len(Vs)))]
        G = fg.build_graph(fg.QuadForm(ctx, a, b, c), V)
        expected = ref.adjacency(a, b, c, set(V.element_array.tolist()))
        assert np.array_equal(G.adj, expected)
        H = fg.graph_from_values(fg.form_values(fg.QuadForm(ctx, a, b, c), chunk=7), V)
        assert np.array_equal(H.adj, G.adj)


def test_count_N_direct(f27):
    sq = f27.square_arr(f27.elements())
    for V in ss.all_subspaces(f27):
        for u in range(27):
            direct = int(V.mask[f27.sub_arr(sq, u)].sum())
            assert fg.count_N(f27, u, V) == direct


def test_plus_structure(f9):
    F3 = ss.from_rows(f9, [[1, 0]])
    plus = fg.structured_cliques_plus(f9, F3)
    assert not plus.trivial and len(plus.clique) == fg.count_N(f9, 0, F3) == 5
    G = fg.build_graph(fg.q_plus(f9), F3)
    assert G.is_clique(plus.clique)
    zero = fg.structured_cliques_plus(f9, ss.zero(f9))
    assert zero.trivial and zero.clique == frozenset({0})


def test_components_minus_against_networkx(f25, f27):
    for ctx in (f25, f27):
        for V in ss.all_subspaces(ctx, proper=True):
            G = fg.build_graph(fg.q_minus(ctx), V)
            H = nx.from_numpy_array(G.adj.astype(int))
            expected = sorted((frozenset(c) for c in nx.connected_components(H)), key=min)
            assert fg.components_minus(ctx, V) == expected


def test_exports(f9):
    G = fg.build_graph(fg.q_plus(f9), ss.from_rows(f9, [[1, 0]]))
    dot = fg.to_dot(G)
    assert dot.startswith("graph G {") and dot.count(" -- ") == G.arc_count() // 2
    rows = fg.to_edge_csv(G).splitlines()
    assert len(rows) == G.arc_count()
    assert all(G.has_edge(*map(int, r.split(","))) for r in rows)
    D = fg.build_graph(fg.QuadForm(f9, 1, 1, 0), ss.from_rows(f9, [[1, 0]]))
    assert not D.symmetric and fg.to_dot(D).startswith("digraph")


def test_graph_cap(f81):
    with pytest.raises(GraphCapExceeded):
        fg.build_graph(fg.q_plus(f81), ss.zero(f81), cap=50)


def test_from_edges_roundtrip():
    G = fg.DiGraph.from_edges(4, [(0, 1), (1, 2)])
    assert G.symmetric and G.arc_count() == 4 and G.out_degree(1) == 2
    assert G.rows[1] == 0b101
