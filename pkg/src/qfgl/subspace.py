"""F_q-subspaces of F_{q^n} in canonical reduced row echelon form.

A subspace is stored as its RREF basis over F_q: rows are F_q-coordinate
vectors (see :meth:`FieldCtx.coeffs`), pivots increase left to right and are
normalised to 1. Equal subspaces therefore have equal bases.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import caps as _caps
from .errors import EnumerationCapExceeded, IterationCapExceeded, NotADivisor
from .gf import Elem, FieldCtx, PrimeField

Row = tuple[int, ...]


def rref(F, rows: Iterable[Sequence[int]], ncols: int) -> tuple[Row, ...]:
    """Reduced row echelon form over the field object ``F`` (zero rows dropped)."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = F.inv(mat[r][c])
        mat[r] = [F.mul(inv, v) for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r])


def nullspace(F, rows: Sequence[Sequence[int]], ncols: int) -> list[Row]:
    """Basis of {u : sum_k u_k * M[., k] = 0}, i.e. the right kernel of ``rows``."""
    red = rref(F, rows, ncols)
    pivots = [next(c for c, v in enumerate(row) if v) for row in red]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for row, pc in zip(red, pivots):
            vec[pc] = F.neg(row[fc])
        basis.append(tuple(vec))
    return basis


def gaussian_binomial(n: int, j: int, q: int) -> int:
    if j < 0 or j > n:
        return 0
    num = den = 1
    for i in range(j):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True, eq=False)
class Subspace:
    ctx: FieldCtx
    basis: tuple[Row, ...]
    _pivots: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_pivots", tuple(next(c for c, v in enumerate(r) if v) for r in self.basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.ctx.q ** self.dim

    @property
    def is_proper(self) -> bool:
        return self.dim < self.ctx.n

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ctx == other.ctx and self.basis == other.basis

    def __hash__(self):
        return hash((self.ctx.key, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, basis={list(map(list, self.basis))})"

    def __contains__(self, x: Elem) -> bool:
        return contains(self, x)

    def basis_elements(self) -> list[Elem]:
        return [self.ctx.from_coeffs(r) for r in self.basis]

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.basis]

    def reduce_arr(self, xs) -> np.ndarray:
        """Canonical coset representative of each element (pivot coordinates cleared)."""
        F = self.ctx.base
        cs = self.ctx.coeff_arr(xs).copy()
        for row, pc in zip(self.basis, self._pivots):
            f = cs[..., pc].copy()
            for k, v in enumerate(row):
                if v:
                    cs[..., k] = F.add_arr(cs[..., k], F.neg_arr(F.mul_arr(f, v)))
        return self.ctx.from_coeff_arr(cs)

    @cached_property
    def element_array(self) -> np.ndarray:
        cap = _caps.current().iteration
        if self.size > cap:
            raise IterationCapExceeded(f"#V = {self.size} exceeds the iteration cap {cap}")
        ctx = self.ctx
        out = np.zeros(1, dtype=np.int64)
        scalars = np.arange(ctx.q, dtype=np.int64)
        for b in self.basis_elements():
            multiples = ctx.mul_arr(scalars, b) if ctx.has_log_table else np.array([ctx.mul(int(s), b) for s in scalars])
            out = ctx.add_arr(out[:, None], multiples[None, :]).ravel()
        out.setflags(write=False)
        return out

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean membership vector indexed by element."""
        m = np.zeros(self.ctx.size, dtype=bool)
        m[self.element_array] = True
        m.setflags(write=False)
        return m


def from_rows(ctx: FieldCtx, rows: Iterable[Sequence[int]]) -> Subspace:
    """Subspace spanned by F_q-coordinate rows (the JSON wire format)."""
    rows = [tuple(int(v) for v in r) for r in rows]
    for r in rows:
        if len(r) != ctx.n or not all(0 <= v < ctx.q for v in r):
            raise ValueError(f"row {list(r)} is not a length-{ctx.n} vector over F_{ctx.q}")
    return Subspace(ctx, rref(ctx.base, rows, ctx.n))


def span(ctx: FieldCtx, gens: Iterable[Elem]) -> Subspace:
    return Subspace(ctx, rref(ctx.base, [ctx.coeffs(int(x)) for x in gens], ctx.n))


def zero(ctx: FieldCtx) -> Subspace:
    return Subspace(ctx, ())


def whole(ctx: FieldCtx) -> Subspace:
    return span(ctx, [ctx.q**i for i in range(ctx.n)])


def contains(V: Subspace, x: Elem) -> bool:
    if "mask" in V.__dict__:
        return bool(V.mask[x])
    F = V.ctx.base
    cs = list(V.ctx.coeffs(x))
    for row, pc in zip(V.basis, V._pivots):
        f = cs[pc]
        if f:
            cs = [F.sub(a, F.mul(f, b)) for a, b in zip(cs, row)]
    return not any(cs)


def elements(V: Subspace) -> Iterator[Elem]:
    """All q^dim elements, lexicographic in the coordinates w.r.t. the basis."""
    for x in V.element_array:
        yield int(x)


def scale(V: Subspace, lam: Elem) -> Subspace:
    """lam * V."""
    return span(V.ctx, [V.ctx.mul(lam, b) for b in V.basis_elements()])


def dual(V: Subspace) -> Subspace:
    """Annihilator of V under (u, v) -> Tr(u v), Tr the absolute trace to F_p.

    Computed as an F_p-kernel in base-p digit coordinates; the kernel is
    F_q-closed, so its span over F_q is the kernel itself.
    """
    ctx = V.ctx
    fp = PrimeField(ctx.p)
    mn = ctx.m * ctx.n
    # w ranges over an F_p-spanning set of V: Y^k * v_i
    spanning = [ctx.mul(ctx.p**k, v) for v in V.basis_elements() for k in range(ctx.m)]
    basis_t = [ctx.p**t for t in range(mn)]
    constraints = [[ctx.trace(ctx.mul(e, w)) for e in basis_t] for w in spanning]
    kernel = nullspace(fp, constraints, mn) if constraints else [tuple(int(i == t) for i in range(mn)) for t in range(mn)]
    gens = [sum(d * e for d, e in zip(vec, basis_t)) for vec in kernel]
    out = span(ctx, gens)
    if out.dim != ctx.n - V.dim:
        raise AssertionError(f"dual has dimension {out.dim}, expected {ctx.n - V.dim}")
    return out


def enumerate_subspaces(ctx: FieldCtx, j: int, *, cap: int | None = None) -> Iterator[Subspace]:
    """Every j-dimensional subspace once, pivots lexicographic, then free entries."""
    n, q = ctx.n, ctx.q
    if not 0 <= j <= n:
        raise ValueError(f"dimension {j} outside [0, {n}]")
    cap = _caps.current().enumeration if cap is None else cap
    total = gaussian_binomial(n, j, q)
    if total > cap:
        raise EnumerationCapExceeded(f"[{n} choose {j}]_{q} = {total} subspaces exceed the cap {cap}")
    for pivots in itertools.combinations(range(n), j):
        slots = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for values in itertools.product(range(q), repeat=len(slots)):
            rows = [[0] * n for _ in range(j)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), v in zip(slots, values):
                rows[r][c] = v
            yield Subspace(ctx, tuple(tuple(r) for r in rows))


def all_subspaces(ctx: FieldCtx, *, proper: bool = False, cap: int | None = None) -> list[Subspace]:
    top = ctx.n - 1 if proper else ctx.n
    return [V for j in range(top + 1) for V in enumerate_subspaces(ctx, j, cap=cap)]


def random_subspace(ctx: FieldCtx, j: int, rng: random.Random) -> Subspace:
    """Uniform j-dimensional subspace: span of j random independent vectors."""
    while True:
        rows = [tuple(rng.randrange(ctx.q) for _ in range(ctx.n)) for _ in range(j)]
        red = rref(ctx.base, rows, ctx.n)
        if len(red) == j:
            return Subspace(ctx, red)


def coset_reps(V: Subspace) -> list[Elem]:
    """Minimal-index representative of each coset x + V, ascending."""
    ctx = V.ctx
    cap = _caps.current().iteration
    count = ctx.q ** (ctx.n - V.dim)
    if count > cap or ctx.size > cap:
        raise IterationCapExceeded(f"{count} cosets over {ctx.size} elements exceed the iteration cap {cap}")
    labels = V.reduce_arr(ctx.elements())
    _, first = np.unique(labels, return_index=True)
    reps = sorted(int(i) for i in first)
    if len(reps) != count:
        raise AssertionError("coset count disagrees with q^(n - dim)")
    return reps


def frobenius_fixed(ctx: FieldCtx, d: int) -> Subspace:
    """The subfield F_{q^d} = {x : x^(q^d) = x}, as an F_q-subspace."""
    if d <= 0 or ctx.n % d:
        raise NotADivisor(f"{d} does not divide n = {ctx.n}")
    F = ctx.base
    cols = []
    for i in range(ctx.n):
        e = ctx.q**i
        cols.append(ctx.coeffs(ctx.sub(ctx.frobenius(e, d), e)))
    # row k of the matrix holds coordinate k of each column image
    rows = [[cols[i][k] for i in range(ctx.n)] for k in range(ctx.n)]
    kernel = nullspace(F, rows, ctx.n)
    out = Subspace(ctx, rref(F, kernel, ctx.n))
    if out.dim != d:
        raise AssertionError(f"fixed field has dimension {out.dim}, expected {d}")
    return out
