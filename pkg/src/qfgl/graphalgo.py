"""Components, diameter and exact clique search on symmetric :class:`DiGraph`s.

Neighbourhoods are handled as Python int bitsets taken from ``G.rows``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import caps as _caps
from .errors import CliqueCapExceeded, NotSymmetric
from .formgraph import DiGraph


class _Disconnected:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Disconnected"

    def __reduce__(self):
        return (_Disconnected, ())


Disconnected = _Disconnected()


@dataclass(frozen=True)
class DiamReport:
    diameter: int | _Disconnected
    witness: tuple[int, int] | None  # realises the diameter, or an unreachable pair

    @property
    def connected(self) -> bool:
        return self.diameter is not Disconnected

    def to_json(self) -> dict:
        return {
            "diameter": "disconnected" if not self.connected else self.diameter,
            "witness": list(self.witness) if self.witness else None,
        }


@dataclass(frozen=True)
class CliqueReport:
    omega: int
    witness: frozenset[int]
    node_count_explored: int = 0

    def to_json(self) -> dict:
        return {"omega": self.omega, "witness": sorted(self.witness), "nodes": self.node_count_explored}


def _require_symmetric(G: DiGraph):
    if not G.symmetric:
        raise NotSymmetric("operation needs an undirected (symmetric) graph")


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _bfs_layers(rows: list[int], source: int) -> tuple[int, int, int]:
    """(eccentricity within the component, visited bitset, a farthest vertex)."""
    visited = frontier = 1 << source
    depth, last = 0, source
    while True:
        nxt = 0
        for v in _bits(frontier):
            nxt |= rows[v]
        nxt &= ~visited
        if not nxt:
            return depth, visited, last
        visited |= nxt
        frontier = nxt
        depth += 1
        last = (nxt & -nxt).bit_length() - 1


def components(G: DiGraph) -> list[frozenset[int]]:
    """Connected components, sorted by smallest vertex."""
    _require_symmetric(G)
    rows = G.rows
    unseen = (1 << G.vertex_count) - 1
    out = []
    while unseen:
        s = (unseen & -unseen).bit_length() - 1
        _, comp, _ = _bfs_layers(rows, s)
        out.append(frozenset(_bits(comp)))
        unseen &= ~comp
    return out


def is_connected(G: DiGraph) -> bool:
    _require_symmetric(G)
    if G.vertex_count == 0:
        return True
    _, comp, _ = _bfs_layers(G.rows, 0)
    return comp == (1 << G.vertex_count) - 1


def diameter(G: DiGraph) -> DiamReport:
    _require_symmetric(G)
    N = G.vertex_count
    full = (1 << N) - 1
    rows = G.rows
    best, witness = 0, (0, 0) if N else None
    for s in range(N):
        ecc, comp, far = _bfs_layers(rows, s)
        if comp != full:
            missing = ((full & ~comp) & -(full & ~comp)).bit_length() - 1
            return DiamReport(Disconnected, (s, missing))
        if ecc > best:
            best, witness = ecc, (s, far)
    return DiamReport(best, witness)


def diameter_two_witness(G: DiGraph, chunk: int = 256) -> tuple[int, int] | None:
    """First non-adjacent pair (x, y), x < y, without a common neighbour.

    Scans row blocks and stops at the first failing block. Returns None when
    every pair is within distance 2 (a complete graph included).
    """
    _require_symmetric(G)
    A = G.adj
    N = G.vertex_count
    Af = A.astype(np.float32)
    for start in range(0, N, chunk):
        block = Af[start:start + chunk] @ Af
        ok = (block > 0.5) | A[start:start + chunk]
        ok[np.arange(ok.shape[0]), np.arange(start, start + ok.shape[0])] = True
        if not ok.all():
            r, c = np.argwhere(~ok)[0]
            x, y = int(start + r), int(c)
            return (min(x, y), max(x, y))
    return None


def has_diameter_two(G: DiGraph) -> bool:
    """True iff G is not complete and every non-adjacent pair has a common neighbour."""
    _require_symmetric(G)
    N = G.vertex_count
    if N < 3 or int(G.adj.sum()) == N * (N - 1):
        return False
    return diameter_two_witness(G) is None


def degeneracy_order(rows: list[int]) -> list[int]:
    """Smallest-last removal order."""
    n = len(rows)
    deg = [r.bit_count() for r in rows]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * n
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for u in _bits(rows[v]):
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return order


@dataclass
class _CliqueSearch:
    rows: list[int]
    best: list[int] = field(default_factory=list)
    nodes: int = 0

    def color_sort(self, cand: int) -> tuple[list[int], list[int]]:
        order, colors = [], []
        color = 0
        rows = self.rows
        while cand:
            color += 1
            avail = cand
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                avail &= ~(rows[v] | low)
                cand ^= low
                order.append(v)
                colors.append(color)
        return order, colors

    def expand(self, cand: int, clique: list[int]):
        self.nodes += 1
        order, colors = self.color_sort(cand)
        for i in range(len(order) - 1, -1, -1):
            if len(clique) + colors[i] <= len(self.best):
                return
            v = order[i]
            clique.append(v)
            nxt = cand & self.rows[v]
            if nxt:
                self.expand(nxt, clique)
            elif len(clique) > len(self.best):
                self.best = list(clique)
            clique.pop()
            cand &= ~(1 << v)


def clique_number(G: DiGraph, *, cap: int | None = None) -> CliqueReport:
    """Exact maximum clique (colour-bounded branch and bound, degeneracy order)."""
    _require_symmetric(G)
    N = G.vertex_count
    cap = _caps.current().clique if cap is None else cap
    if N > cap:
        raise CliqueCapExceeded(f"{N} vertices exceed the clique cap {cap}")
    if N == 0:
        return CliqueReport(0, frozenset(), 0)
    order = degeneracy_order(G.rows)[::-1]  # densest core first
    perm = np.asarray(order, dtype=np.int64)
    relabelled = DiGraph(G.adj[np.ix_(perm, perm)])
    search = _CliqueSearch(relabelled.rows, best=[0])
    search.expand((1 << N) - 1, [])
    witness = frozenset(int(perm[v]) for v in search.best)
    if not G.is_clique(witness):
        raise AssertionError("clique search returned a non-clique")
    return CliqueReport(len(witness), witness, search.nodes)


def maximal_cliques(G: DiGraph) -> Iterator[frozenset[int]]:
    """Bron-Kerbosch with Tomita pivoting; isolated vertices yield singletons."""
    _require_symmetric(G)
    rows = G.rows

    def bk(R: list[int], P: int, X: int):
        if not P and not X:
            yield frozenset(R)
            return
        px = P | X
        pivot = max(_bits(px), key=lambda u: (P & rows[u]).bit_count())
        for v in list(_bits(P & ~rows[pivot])):
            yield from bk(R + [v], P & rows[v], X & rows[v])
            P &= ~(1 << v)
            X |= 1 << v

    yield from bk([], (1 << G.vertex_count) - 1, 0)
