"""Character sums over F_{q^n} and their bound checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConstantPolynomial, DegreeDividesChar, TrivialCharacter, WrongFormClass
from .formgraph import FormKind, QuadForm
from .gf import Elem, FieldCtx
from .subspace import Subspace

TOL = 1e-6


@dataclass(frozen=True)
class SumCheck:
    value: complex
    bound: float
    context: str
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return abs(self.value) <= self.bound + TOL

    def to_json(self) -> dict:
        out = {
            "sum_re": float(self.value.real),
            "sum_im": float(self.value.imag),
            "abs": float(abs(self.value)),
            "bound": float(self.bound),
            "ok": self.ok,
            "context": self.context,
        }
        out.update(self.extras)
        return out


def indicator_value(V_star: Subspace, x: Elem) -> complex:
    """sum over u in V_star of psi_u(x), as a complex number."""
    ctx = V_star.ctx
    return complex(ctx.psi_arr(x, V_star.element_array).sum())


def indicator_sum(V_star: Subspace, x: Elem) -> float:
    """Real part of :func:`indicator_value`; equals #V_star * [x in dual(V_star)]."""
    return indicator_value(V_star, x).real


def indicator_table(V_star: Subspace) -> np.ndarray:
    """:func:`indicator_value` for every x at once (complex vector)."""
    ctx = V_star.ctx
    xs = ctx.elements()
    us = V_star.element_array
    out = np.zeros(ctx.size, dtype=complex)
    for u in us.tolist():
        out += ctx.psi_arr(u, xs)
    return out


def affine_eta_sum(V: Subspace, y: Elem) -> SumCheck:
    """sum over v in V of eta(y + v), against q^(n/2).

    ``extras`` records whether y + V holds a nonzero square and whether that
    is forced (#V > q^(n/2)).
    """
    ctx = V.ctx
    ctx._require_odd()
    if not V.is_proper:
        raise ValueError("affine_eta_sum needs a proper subspace")
    shifted = ctx.add_arr(y, V.element_array)
    etas = ctx.eta_arr(shifted)
    value = int(etas.sum())
    forced = V.size**2 > ctx.size
    return SumCheck(
        complex(value),
        math.sqrt(ctx.size),
        f"sum_{{v in V}} eta({y}+v), dim V={V.dim}",
        {"has_nonzero_square": bool((etas == 1).any()), "square_forced": forced},
    )


def gs_double_sum(A: Iterable[Elem], B: Iterable[Elem], Q: QuadForm, w: Elem) -> SumCheck:
    """sum over a in A, b in B of psi_w(Q(a, b)) for Q = X^2 + bXY + Y^2, b != 0."""
    ctx = Q.ctx
    ctx._require_odd()
    if w == 0:
        raise TrivialCharacter("psi_0 is the trivial character")
    if Q.cls.kind is not FormKind.QB or Q.a != 1 or Q.c != 1:
        raise WrongFormClass(f"expected X^2+bXY+Y^2 with b != 0, got {Q}")
    A, B = np.fromiter(A, dtype=np.int64), np.fromiter(B, dtype=np.int64)
    if not len(A) or not len(B):
        raise ValueError("A and B must be nonempty")
    vals = Q.values(A, B)
    value = complex(ctx.root_of_unity(ctx.trace_arr(ctx.mul_arr(w, vals))).sum())
    bound = math.sqrt(ctx.size * len(A) * len(B))
    return SumCheck(value, bound, f"GS double sum b={Q.b} w={w} #A={len(A)} #B={len(B)}")


def poly_eval_arr(ctx: FieldCtx, f: Sequence[Elem], xs) -> np.ndarray:
    """Horner evaluation; ``f`` lists coefficients lowest degree first."""
    xs = np.asarray(xs, dtype=np.int64)
    acc = np.zeros_like(xs)
    for c in reversed(list(f)):
        acc = ctx.add_arr(ctx.mul_arr(acc, xs), c)
    return acc


def poly_degree(f: Sequence[Elem]) -> int:
    d = len(f) - 1
    while d >= 0 and f[d] == 0:
        d -= 1
    return d


def weil_sum(ctx: FieldCtx, f: Sequence[Elem], a: Elem) -> SumCheck:
    """sum over x in F_{q^n} of psi_a(f(x)), against (deg f - 1) * sqrt(q^n)."""
    d = poly_degree(f)
    if d < 1:
        raise ConstantPolynomial("f must have degree at least 1")
    if d % ctx.p == 0:
        raise DegreeDividesChar(f"deg f = {d} is divisible by the characteristic {ctx.p}")
    if a == 0:
        raise TrivialCharacter("psi_0 is the trivial character")
    vals = poly_eval_arr(ctx, f[: d + 1], ctx.elements())
    value = complex(ctx.psi_arr(a, vals).sum())
    return SumCheck(value, (d - 1) * math.sqrt(ctx.size), f"Weil sum deg={d} a={a} f={list(f[: d + 1])}")
