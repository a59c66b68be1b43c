"""Arithmetic in the tower F_p < F_q = F_p[Y]/(g) < F_{q^n} = F_q[X]/(h).

Elements are plain ``int`` indices. An element of F_{q^n} with F_q-coordinates
``(c_0, ..., c_{n-1})`` (coefficients of 1, X, ..., X^{n-1}) has index
``sum c_i q^i``; each ``c_i`` is itself the index ``sum d_k p^k`` of
``sum d_k Y^k`` in F_q. Consequently the base-p digits of an index are its
F_p-coordinates, F_q sits inside F_{q^n} as the indices ``< q`` and F_p as
the indices ``< p``.

Scalar operations work on ints; the ``*_arr`` variants work elementwise on
numpy integer arrays and are what the graph code uses.
"""

from __future__ import annotations

import cmath
import functools
import math
import random
from typing import Sequence

import numpy as np

from . import caps as _caps
from .errors import DivisionByZero, EvenCharacteristic, NonPrime, SizeCapExceeded

Elem = int


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    return all(k % d for d in range(3, math.isqrt(k) + 1, 2))


def prime_factors(k: int) -> list[int]:
    out, d = [], 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1
    if k > 1:
        out.append(k)
    return out


# -- polynomials over a field object (lists, lowest degree first) -----------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _psub(F, a, b):
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = F.sub(out[i], c)
    return _trim(out)


def _pmul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def _pmod(F, a, f):
    """Remainder of ``a`` modulo the monic polynomial ``f``."""
    a = list(a)
    d = len(f) - 1
    for top in range(len(a) - 1, d - 1, -1):
        c = a[top]
        if c == 0:
            continue
        shift = top - d
        for i in range(d + 1):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, f[i]))
    return _trim(a[:d])


def _pdivmod_general(F, a, b):
    """Remainder of ``a`` modulo an arbitrary nonzero ``b``."""
    inv_lead = F.inv(b[-1])
    monic = [F.mul(c, inv_lead) for c in b]
    return _pmod(F, a, monic)


def _pgcd(F, a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pdivmod_general(F, a, b)
    return a


def _ppowmod(F, a, e, f):
    result, base = [1], _pmod(F, a, f)
    while e:
        if e & 1:
            result = _pmod(F, _pmul(F, result, base), f)
        base = _pmod(F, _pmul(F, base, base), f)
        e >>= 1
    return result


def is_irreducible(F, f: Sequence[int], field_size: int) -> bool:
    """Ben-Or test for a monic polynomial over the field ``F`` of ``field_size`` elements."""
    f = _trim(list(f))
    d = len(f) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    xp = [0, 1]
    for _ in range(d // 2):
        xp = _ppowmod(F, xp, field_size, f)
        g = _pgcd(F, f, _psub(F, xp, [0, 1]))
        if len(g) > 1:
            return False
    return True


def _monic_from_rank(k: int, d: int, s: int) -> list[int]:
    coeffs = []
    for _ in range(d):
        coeffs.append(k % s)
        k //= s
    return coeffs + [1]


def find_irreducible(F, d: int, s: int, rng: random.Random | None = None) -> tuple[int, ...]:
    """Lowest monic irreducible of degree ``d`` (ranked by ``sum c_i s^i``), or a random one."""
    total = s**d
    if rng is None:
        for k in range(total):
            f = _monic_from_rank(k, d, s)
            if is_irreducible(F, f, s):
                return tuple(f)
    else:
        while True:
            f = _monic_from_rank(rng.randrange(total), d, s)
            if is_irreducible(F, f, s):
                return tuple(f)
    raise AssertionError("no irreducible polynomial found")


class PrimeField:
    def __init__(self, p: int):
        self.p = p
        self.size = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero("inverse of 0")
        return pow(a, self.p - 2, self.p)


class BaseField:
    """F_q = F_p[Y]/(g) with elements indexed by their base-p digit vectors."""

    def __init__(self, p: int, m: int, g: Sequence[int]):
        self.p, self.m = p, m
        self.size = q = p**m
        self.g = tuple(g)
        self._fp = PrimeField(p)
        self._pw = [p**k for k in range(m)]
        self.add_table = None
        if q <= 1024:
            idx = np.arange(q)
            self.add_table = self._add_digits(idx[:, None], idx[None, :])
            self.neg_table = self._neg_digits(idx)
        self._build_log_tables()

    # digit-level helpers, valid for ints and arrays
    def _add_digits(self, a, b):
        if self.p == 2:
            return a ^ b
        out = 0
        for w in self._pw:
            out = out + ((a // w + b // w) % self.p) * w
        return out

    def _neg_digits(self, a):
        if self.p == 2:
            return a
        out = 0
        for w in self._pw:
            out = out + ((-(a // w)) % self.p) * w
        return out

    def _to_poly(self, a):
        return _trim([(a // w) % self.p for w in self._pw])

    def _from_poly(self, c):
        return sum(x * w for x, w in zip(c, self._pw))

    def _mul_slow(self, a, b):
        return self._from_poly(_pmod(self._fp, _pmul(self._fp, self._to_poly(a), self._to_poly(b)), list(self.g)))

    def _build_log_tables(self):
        q = self.size
        order = q - 1
        factors = prime_factors(order) if order > 1 else []

        def power(x, e):
            r, b = 1, x
            while e:
                if e & 1:
                    r = self._mul_slow(r, b)
                b = self._mul_slow(b, b)
                e >>= 1
            return r

        gen = 1
        for cand in range(1, q):
            if all(power(cand, order // r) != 1 for r in factors):
                gen = cand
                break
        self.generator = gen
        exp = np.zeros(2 * order if order else 2, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for k in range(order):
            exp[k] = x
            log[x] = k
            x = self._mul_slow(x, gen)
        exp[order:2 * order] = exp[:order]
        self.exp, self.log = exp, log

    # scalar ops
    def add(self, a, b):
        if self.add_table is not None:
            return int(self.add_table[a, b])
        return self._add_digits(a, b)

    def neg(self, a):
        if self.add_table is not None:
            return int(self.neg_table[a])
        return self._neg_digits(a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in F_q")
        return int(self.exp[(self.size - 1 - self.log[a]) % (self.size - 1)])

    # array ops
    def add_arr(self, a, b):
        if self.add_table is not None:
            return self.add_table[a, b]
        return self._add_digits(np.asarray(a), np.asarray(b))

    def neg_arr(self, a):
        if self.add_table is not None:
            return self.neg_table[a]
        return self._neg_digits(np.asarray(a))

    def mul_arr(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        prod = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)


class FieldCtx:
    """Immutable description of F_p < F_q < F_{q^n} with arithmetic.

    Build with :func:`make_tower`. ``g`` and ``h`` are stored lowest degree
    first, monic; ``h`` has F_q-element indices as coefficients.
    """

    def __init__(self, p: int, m: int, n: int, g: Sequence[int], h: Sequence[int], log_cap: int | None = None):
        self.p, self.m, self.n = p, m, n
        self.q = p**m
        self.size = self.q**n
        self.g, self.h = tuple(g), tuple(h)
        self.base = BaseField(p, m, g)
        self._qpw = [self.q**i for i in range(n)]
        self._ppw = np.array([p**t for t in range(m * n)], dtype=np.int64)
        self._log_cap = _caps.current().log_table if log_cap is None else log_cap
        self.exp = self.log = None
        self.generator = self._find_generator()
        if self.size <= self._log_cap:
            self._build_log_tables()
        self._trace_basis = np.array([self._trace_def(int(w)) for w in self._ppw], dtype=np.int64)
        p_root = np.exp(2j * np.pi * np.arange(p) / p)
        self._roots = p_root

    # -- identity, serialisation --------------------------------------------
    def params(self) -> dict:
        return {"p": self.p, "m": self.m, "n": self.n, "g": list(self.g), "h": list(self.h)}

    @property
    def key(self):
        return (self.p, self.m, self.n, self.g, self.h)

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __reduce__(self):
        return (_cached_tower, self.key + (self._log_cap,))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, m={self.m}, n={self.n}, q={self.q}, size={self.size})"

    # -- coordinates ----------------------------------------------------------
    def coeffs(self, x: Elem) -> tuple[int, ...]:
        """F_q-coordinates of ``x`` in the basis 1, X, ..., X^{n-1}."""
        return tuple((x // w) % self.q for w in self._qpw)

    def from_coeffs(self, cs: Sequence[int]) -> Elem:
        if len(cs) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(cs)}")
        return sum(int(c) * w for c, w in zip(cs, self._qpw))

    def coeff_arr(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        return np.stack([(xs // w) % self.q for w in self._qpw], axis=-1)

    def from_coeff_arr(self, cs) -> np.ndarray:
        cs = np.asarray(cs, dtype=np.int64)
        return (cs * np.array(self._qpw, dtype=np.int64)).sum(axis=-1)

    def digits(self, x: Elem) -> tuple[int, ...]:
        """F_p-coordinates (base-p digits of the index)."""
        return tuple((x // int(w)) % self.p for w in self._ppw)

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def in_base(self, x: Elem) -> bool:
        return 0 <= x < self.q

    # -- additive structure ---------------------------------------------------
    def add(self, x: Elem, y: Elem) -> Elem:
        if self.p == 2:
            return x ^ y
        out = 0
        p = self.p
        for w in self._ppw:
            w = int(w)
            out += ((x // w + y // w) % p) * w
        return out

    def neg(self, x: Elem) -> Elem:
        if self.p == 2:
            return x
        out = 0
        for w in self._ppw:
            w = int(w)
            out += ((-(x // w)) % self.p) * w
        return out

    def sub(self, x: Elem, y: Elem) -> Elem:
        return self.add(x, self.neg(y))

    def add_arr(self, x, y) -> np.ndarray:
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        if self.p == 2:
            return x ^ y
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
        p = self.p
        for w in self._ppw:
            out += ((x // w + y // w) % p) * w
        return out

    def neg_arr(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if self.p == 2:
            return x.copy()
        out = np.zeros_like(x)
        for w in self._ppw:
            out += ((-(x // w)) % self.p) * w
        return out

    def sub_arr(self, x, y) -> np.ndarray:
        return self.add_arr(x, self.neg_arr(y))

    # -- multiplicative structure ---------------------------------------------
    def _mul_poly(self, x: Elem, y: Elem) -> Elem:
        F = self.base
        a = _trim(list(self.coeffs(x)))
        b = _trim(list(self.coeffs(y)))
        r = _pmod(F, _pmul(F, a, b), list(self.h))
        return self.from_coeffs(r + [0] * (self.n - len(r)))

    def _pow_poly(self, x: Elem, e: int) -> Elem:
        r, b = 1, x
        while e:
            if e & 1:
                r = self._mul_poly(r, b)
            b = self._mul_poly(b, b)
            e >>= 1
        return r

    def _find_generator(self) -> Elem:
        order = self.size - 1
        factors = prime_factors(order)
        for cand in range(1, self.size):
            if all(self._pow_poly(cand, order // r) != 1 for r in factors):
                return cand
        raise AssertionError("multiplicative group has no generator")

    def _mul_const_arr(self, xs: np.ndarray, c: Elem) -> np.ndarray:
        """xs * c without log tables: F_q-linear combination of X^i * c."""
        F = self.base
        images = [self.coeffs(self._mul_poly(self._qpw[i], c)) for i in range(self.n)]
        cx = self.coeff_arr(xs)
        out = np.zeros_like(cx)
        for i in range(self.n):
            for k in range(self.n):
                if images[i][k]:
                    out[..., k] = F.add_arr(out[..., k], F.mul_arr(cx[..., i], images[i][k]))
        return self.from_coeff_arr(out)

    def _build_log_tables(self):
        order = self.size - 1
        exp = np.zeros(2 * order, dtype=np.int64)
        block = min(order, 256)
        x = 1
        for k in range(block):
            exp[k] = x
            x = self._mul_poly(x, self.generator)
        filled = block
        while filled < order:
            step = min(filled, order - filled)
            shift = self._pow_poly(self.generator, filled)
            exp[filled:filled + step] = self._mul_const_arr(exp[:step], shift)
            filled += step
        exp[order:] = exp[:order]
        log = np.zeros(self.size, dtype=np.int64)
        log[exp[:order]] = np.arange(order)
        if len(np.unique(exp[:order])) != order:
            raise AssertionError("generator does not have full order")
        self.exp, self.log = exp, log

    @property
    def has_log_table(self) -> bool:
        return self.exp is not None

    def mul(self, x: Elem, y: Elem) -> Elem:
        if x == 0 or y == 0:
            return 0
        if self.exp is not None:
            return int(self.exp[self.log[x] + self.log[y]])
        return self._mul_poly(x, y)

    def inv(self, x: Elem) -> Elem:
        if x == 0:
            raise DivisionByZero("inverse of 0")
        order = self.size - 1
        if self.exp is not None:
            return int(self.exp[(order - self.log[x]) % order])
        return self._pow_poly(x, order - 1)

    def div(self, x: Elem, y: Elem) -> Elem:
        return self.mul(x, self.inv(y))

    def pow(self, x: Elem, e: int) -> Elem:
        if x == 0:
            if e < 0:
                raise DivisionByZero("0 to a negative power")
            return 1 if e == 0 else 0
        order = self.size - 1
        if self.exp is not None:
            return int(self.exp[(int(self.log[x]) * e) % order])
        e %= order
        return self._pow_poly(x, e)

    def mul_arr(self, x, y) -> np.ndarray:
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        if self.exp is None:
            f = np.vectorize(self.mul, otypes=[np.int64])
            return f(x, y)
        prod = self.exp[self.log[x] + self.log[y]]
        return np.where((x == 0) | (y == 0), 0, prod)

    def square_arr(self, x) -> np.ndarray:
        return self.mul_arr(x, x)

    # -- trace and characters -------------------------------------------------
    def _trace_def(self, x: Elem) -> int:
        total, y = 0, x
        for _ in range(self.m * self.n):
            total = self.add(total, y)
            y = self.pow(y, self.p)
        if total >= self.p:
            raise AssertionError("trace left the prime field")
        return total

    def trace(self, x: Elem) -> int:
        """Absolute trace to F_p, as an int in ``range(p)``."""
        return int(sum(d * t for d, t in zip(self.digits(x), self._trace_basis)) % self.p)

    def trace_arr(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        out = np.zeros_like(xs)
        for w, t in zip(self._ppw, self._trace_basis):
            if t:
                out += ((xs // w) % self.p) * t
        return out % self.p

    def _require_odd(self):
        if self.p == 2:
            raise EvenCharacteristic("quadratic character needs odd characteristic")

    def eta(self, x: Elem) -> int:
        self._require_odd()
        if x == 0:
            return 0
        if self.exp is not None:
            return 1 if self.log[x] % 2 == 0 else -1
        return 1 if self.pow(x, (self.size - 1) // 2) == 1 else -1

    def eta_arr(self, xs) -> np.ndarray:
        self._require_odd()
        xs = np.asarray(xs, dtype=np.int64)
        if self.exp is None:
            return np.vectorize(self.eta, otypes=[np.int64])(xs)
        vals = np.where(self.log[xs] % 2 == 0, 1, -1)
        return np.where(xs == 0, 0, vals)

    def is_square(self, x: Elem) -> bool:
        return self.eta(x) >= 0

    def psi(self, a: Elem, x: Elem) -> complex:
        """Additive character exp(2 pi i Tr(a x) / p)."""
        return complex(self._roots[self.trace(self.mul(a, x))])

    def psi_arr(self, a, xs) -> np.ndarray:
        return self._roots[self.trace_arr(self.mul_arr(a, xs))]

    def root_of_unity(self, k) -> np.ndarray:
        """exp(2 pi i k / p) for trace values ``k``."""
        return self._roots[np.asarray(k) % self.p]

    def frobenius(self, x: Elem, times: int = 1) -> Elem:
        """x -> x^(q^times)."""
        return self.pow(x, self.q**times)

    def minus_one(self) -> Elem:
        return self.neg(1)

    def first_nonsquare(self) -> Elem:
        self._require_odd()
        for x in range(1, self.size):
            if self.eta(x) == -1:
                return x
        raise AssertionError("no nonsquare found")


@functools.lru_cache(maxsize=64)
def _cached_tower(p, m, n, g, h, log_cap=None):
    return FieldCtx(p, m, n, g, h, log_cap=log_cap)


def make_tower(
    p: int,
    m: int,
    n: int,
    seed: int | None = None,
    *,
    size_cap: int | None = None,
    log_cap: int | None = None,
    allow_trivial_extension: bool = False,
) -> FieldCtx:
    """Build the tower F_p < F_{p^m} < F_{p^{mn}}.

    Moduli are the lowest-ranked monic irreducibles unless ``seed`` is given,
    in which case they are drawn at random (reproducibly) from the irreducibles.
    ``allow_trivial_extension`` admits ``n == 1`` for base-field computations.
    """
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if m < 1:
        raise ValueError("m must be positive")
    if n < (1 if allow_trivial_extension else 2):
        raise ValueError(f"extension degree n must be at least 2, got {n}")
    cap = _caps.current().field if size_cap is None else size_cap
    if p ** (m * n) > cap:
        raise SizeCapExceeded(f"q^n = {p}^{m * n} exceeds the field cap {cap}")
    rng = random.Random(seed) if seed is not None else None
    fp = PrimeField(p)
    g = find_irreducible(fp, m, p, rng)
    base = BaseField(p, m, g)
    h = find_irreducible(base, n, base.size, rng)
    return _cached_tower(p, m, n, g, h, log_cap)


def tower_from_params(params: dict, log_cap: int | None = None) -> FieldCtx:
    """Rebuild a context from :meth:`FieldCtx.params` output (e.g. a report header)."""
    p, m, n = int(params["p"]), int(params["m"]), int(params["n"])
    g, h = tuple(params["g"]), tuple(params["h"])
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if not is_irreducible(PrimeField(p), g, p) or len(g) != m + 1:
        raise ValueError(f"g={g} is not an irreducible of degree {m} over F_{p}")
    base = BaseField(p, m, g)
    if not is_irreducible(base, h, base.size) or len(h) != n + 1:
        raise ValueError(f"h={h} is not an irreducible of degree {n} over F_{base.size}")
    return _cached_tower(p, m, n, g, h, log_cap)


def arith(ctx: FieldCtx, op: str, x: Elem, y: Elem | int | None = None) -> Elem:
    """Dispatch ``op`` in {add, sub, mul, inv, pow, neg, div}."""
    if op == "inv":
        return ctx.inv(x)
    if op == "neg":
        return ctx.neg(x)
    if y is None:
        raise ValueError(f"{op} needs two operands")
    ops = {"add": ctx.add, "sub": ctx.sub, "mul": ctx.mul, "pow": ctx.pow, "div": ctx.div}
    try:
        return ops[op](x, y)
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


def trace_abs(ctx: FieldCtx, x: Elem) -> int:
    return ctx.trace(x)


def eta(ctx: FieldCtx, x: Elem) -> int:
    return ctx.eta(x)


def additive_char(ctx: FieldCtx, a: Elem, x: Elem) -> complex:
    return ctx.psi(a, x)
