"""Quadratic forms aX^2 + bXY + cY^2 and the graphs they induce with a subspace.

The graph of ``(Q, V)`` has vertex set F_{q^n} and an arc x -> y whenever
x != y and Q(x, y) lies in V.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import caps as _caps
from .errors import GraphCapExceeded, ZeroForm
from .gf import Elem, FieldCtx
from .subspace import Subspace


class FormKind(enum.Enum):
    STAR = "Star"
    PLUS = "Plus"
    MINUS = "Minus"
    QB = "Qb"
    NOT_ALWAYS_UNDIRECTED = "NotAlwaysUndirected"


@dataclass(frozen=True)
class FormClass:
    """Normal form of a quadratic form up to a nonzero scalar.

    ``scale`` is the lambda with lambda * (normal form) == (a, b, c); it is
    1 exactly when the triple is already one of XY, X^2+Y^2, X^2-Y^2,
    X^2+bXY+Y^2. ``b`` is the normalised middle coefficient of a Qb class.
    """

    kind: FormKind
    b: int | None = None
    scale: int = 1

    @property
    def always_undirected(self) -> bool:
        return self.kind is not FormKind.NOT_ALWAYS_UNDIRECTED

    @property
    def is_scalar_multiple(self) -> bool:
        return self.always_undirected and self.scale != 1

    def _base_tag(self) -> str:
        return f"Qb({self.b})" if self.kind is FormKind.QB else self.kind.value

    def __str__(self):
        if self.is_scalar_multiple:
            return f"ScalarMultipleOf({self._base_tag()}, {self.scale})"
        return self._base_tag()


def classify_form(ctx: FieldCtx, a: Elem, b: Elem, c: Elem) -> FormClass:
    if a == 0 and b == 0 and c == 0:
        raise ZeroForm("the zero form has no class")
    if a == c:
        if a == 0:
            return FormClass(FormKind.STAR, scale=b)
        nb = ctx.div(b, a)
        if nb == 0:
            return FormClass(FormKind.PLUS, scale=a)
        return FormClass(FormKind.QB, b=nb, scale=a)
    if b == 0 and a == ctx.neg(c):
        return FormClass(FormKind.MINUS, scale=a)
    return FormClass(FormKind.NOT_ALWAYS_UNDIRECTED)


@dataclass(frozen=True)
class QuadForm:
    ctx: FieldCtx
    a: Elem
    b: Elem
    c: Elem

    def __post_init__(self):
        if self.a == 0 and self.b == 0 and self.c == 0:
            raise ZeroForm("quadratic form must be nonzero")

    @cached_property
    def cls(self) -> FormClass:
        return classify_form(self.ctx, self.a, self.b, self.c)

    def __call__(self, x: Elem, y: Elem) -> Elem:
        ctx = self.ctx
        t1 = ctx.mul(self.a, ctx.mul(x, x))
        t2 = ctx.mul(self.b, ctx.mul(x, y))
        t3 = ctx.mul(self.c, ctx.mul(y, y))
        return ctx.add(ctx.add(t1, t2), t3)

    def values(self, xs, ys) -> np.ndarray:
        """Matrix Q(xs[i], ys[j])."""
        ctx = self.ctx
        xs, ys = np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.int64)
        ax2 = ctx.mul_arr(self.a, ctx.square_arr(xs))
        bx = ctx.mul_arr(self.b, xs)
        cy2 = ctx.mul_arr(self.c, ctx.square_arr(ys))
        cross = ctx.mul_arr(bx[:, None], ys[None, :])
        return ctx.add_arr(ctx.add_arr(ax2[:, None], cross), cy2[None, :])

    def scaled(self, lam: Elem) -> "QuadForm":
        m = self.ctx.mul
        return QuadForm(self.ctx, m(lam, self.a), m(lam, self.b), m(lam, self.c))

    def triple(self) -> list[int]:
        return [self.a, self.b, self.c]

    def __str__(self):
        return f"{self.a}X^2+{self.b}XY+{self.c}Y^2"


def q_star(ctx: FieldCtx) -> QuadForm:
    return QuadForm(ctx, 0, 1, 0)


def q_plus(ctx: FieldCtx) -> QuadForm:
    return QuadForm(ctx, 1, 0, 1)


def q_minus(ctx: FieldCtx) -> QuadForm:
    return QuadForm(ctx, 1, 0, ctx.neg(1))


def q_b(ctx: FieldCtx, b: Elem) -> QuadForm:
    if b == 0:
        raise ValueError("Q_b needs b != 0")
    return QuadForm(ctx, 1, b, 1)


@dataclass(frozen=True, eq=False)
class DiGraph:
    """Dense directed graph; ``adj[x, y]`` is the arc x -> y."""

    adj: np.ndarray
    ctx: FieldCtx | None = None
    form: QuadForm | None = None
    subspace: Subspace | None = None

    @property
    def vertex_count(self) -> int:
        return self.adj.shape[0]

    @cached_property
    def rows(self) -> list[int]:
        """Out-neighbourhoods as int bitsets (bit y set iff x -> y)."""
        packed = np.packbits(self.adj, axis=1, bitorder="little")
        return [int.from_bytes(r.tobytes(), "little") for r in packed]

    @cached_property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.adj, self.adj.T))

    def has_edge(self, x: int, y: int) -> bool:
        return bool(self.adj[x, y])

    def out_degree(self, x: int) -> int:
        return int(self.adj[x].sum())

    def out_degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def arc_count(self) -> int:
        return int(self.adj.sum())

    def edges(self) -> list[tuple[int, int]]:
        """Arcs as (x, y) pairs in row-major order."""
        xs, ys = np.nonzero(self.adj)
        return list(zip(xs.tolist(), ys.tolist()))

    def induced(self, vertices) -> np.ndarray:
        idx = np.asarray(sorted(vertices), dtype=np.int64)
        return self.adj[np.ix_(idx, idx)]

    def is_clique(self, vertices) -> bool:
        sub = self.induced(vertices)
        k = sub.shape[0]
        return bool((sub | np.eye(k, dtype=bool)).all())

    @classmethod
    def from_adjacency(cls, matrix) -> "DiGraph":
        adj = np.array(matrix, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        np.fill_diagonal(adj, False)
        adj.setflags(write=False)
        return cls(adj)

    @classmethod
    def from_edges(cls, count: int, edges, undirected: bool = True) -> "DiGraph":
        adj = np.zeros((count, count), dtype=bool)
        for x, y in edges:
            adj[x, y] = True
            if undirected:
                adj[y, x] = True
        return cls.from_adjacency(adj)


def _check_graph_cap(ctx: FieldCtx, cap: int | None):
    cap = _caps.current().graph if cap is None else cap
    if ctx.size > cap:
        raise GraphCapExceeded(f"q^n = {ctx.size} vertices exceed the graph cap {cap}")


def form_values(Q: QuadForm, *, cap: int | None = None, chunk: int | None = None) -> np.ndarray:
    """The full matrix Q(x, y) over F_{q^n} x F_{q^n}, built in row chunks."""
    ctx = Q.ctx
    _check_graph_cap(ctx, cap)
    N = ctx.size
    out = np.empty((N, N), dtype=np.int64)
    ys = ctx.elements()
    step = chunk or max(1, 2**21 // N)
    for start in range(0, N, step):
        out[start:start + step] = Q.values(ys[start:start + step], ys)
    return out


def graph_from_values(values: np.ndarray, V: Subspace, Q: QuadForm | None = None) -> DiGraph:
    adj = V.mask[values]
    np.fill_diagonal(adj, False)
    adj.setflags(write=False)
    return DiGraph(adj, V.ctx, Q, V)


def build_graph(Q: QuadForm, V: Subspace, *, cap: int | None = None) -> DiGraph:
    if Q.ctx != V.ctx:
        raise ValueError("form and subspace live over different fields")
    ctx = Q.ctx
    _check_graph_cap(ctx, cap)
    N = ctx.size
    adj = np.empty((N, N), dtype=bool)
    ys = ctx.elements()
    step = max(1, 2**21 // N)
    mask = V.mask
    for start in range(0, N, step):
        adj[start:start + step] = mask[Q.values(ys[start:start + step], ys)]
    np.fill_diagonal(adj, False)
    adj.setflags(write=False)
    return DiGraph(adj, ctx, Q, V)


def is_undirected(G: DiGraph) -> bool:
    return G.symmetric


def count_N(ctx: FieldCtx, u: Elem, V: Subspace) -> int:
    """N(u, V) = #{z : z^2 in u + V}, as sum over v in V of 1 + eta(u + v)."""
    shifted = ctx.add_arr(u, V.element_array)
    return int(V.size + ctx.eta_arr(shifted).sum())


def squares_in(ctx: FieldCtx, V: Subspace) -> np.ndarray:
    """Elements of V that are squares (0 included)."""
    els = V.element_array
    return els[ctx.eta_arr(els) >= 0]


@dataclass(frozen=True)
class PlusStructure:
    trivial: bool  # True iff the only square in V is 0
    clique: frozenset[int]  # C_V = {u : u^2 in V}


def structured_cliques_plus(ctx: FieldCtx, V: Subspace) -> PlusStructure:
    ctx._require_odd()
    sq = ctx.square_arr(ctx.elements())
    members = np.nonzero(V.mask[sq])[0]
    trivial = len(squares_in(ctx, V)) == 1
    return PlusStructure(trivial, frozenset(members.tolist()))


def components_minus(ctx: FieldCtx, V: Subspace) -> list[frozenset[int]]:
    """Classes of x ~ y iff x^2 - y^2 in V, sorted by smallest member."""
    ctx._require_odd()
    labels = V.reduce_arr(ctx.square_arr(ctx.elements()))
    _, inverse = np.unique(labels, return_inverse=True)
    classes: dict[int, list[int]] = {}
    for x, lab in enumerate(inverse.tolist()):
        classes.setdefault(lab, []).append(x)
    return sorted((frozenset(c) for c in classes.values()), key=min)


def to_dot(G: DiGraph, name: str = "G") -> str:
    """DOT text; symmetric graphs collapse to undirected edges."""
    buf = io.StringIO()
    undirected = G.symmetric
    buf.write(f"{'graph' if undirected else 'digraph'} {name} {{\n")
    for v in range(G.vertex_count):
        buf.write(f"  {v};\n")
    sep = "--" if undirected else "->"
    for x, y in G.edges():
        if undirected and x > y:
            continue
        buf.write(f"  {x} {sep} {y};\n")
    buf.write("}\n")
    return buf.getvalue()


def to_edge_csv(G: DiGraph) -> str:
    """One ``x_index,y_index`` row per arc; no header."""
    return "".join(f"{x},{y}\n" for x, y in G.edges())
