"""Claim-by-claim verification over enumerated (q, n, Q, V) instances.

Every check produces :class:`VerifyReport` records keyed by claim id and an
instance descriptor that is enough to rebuild and rerun the check
(:func:`replay`). Work items are independent; reports are merged by sorted
key, so output does not depend on the worker count.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import charsum as cs
from . import formgraph as fg
from . import graphalgo as ga
from . import subspace as ss
from .errors import EvenCharacteristic, OddDegree
from .gf import FieldCtx, tower_from_params

CLAIMS: dict[str, str] = {
    "thm1.2": "Gamma(Q,V) undirected for every V iff a=c, or b=0 and a=-c!=0",
    "thm1.3.i": "Gamma(Q+-,V) disconnected; Gamma(Q-,V) has q^n/#V components if #V > q^(n/2)",
    "thm1.3.ii": "omega(Q+,V) = 2 if N(0,V)=1, else N(0,V); omega(Q+,V) = #V for odd n",
    "thm1.3.iii": "omega(Q-,V) = max_u N(u^2,V); >= N(0,V) = #V for odd n",
    "thm1.3.iv": "omega(Qb,V) <= q^(n/2)+2 for every b != 0",
    "eq.near": "|omega(Q,V) - #V| <= q^(n/2) for Q = Q+, Q-",
    "thm1.4": "#V >= q^(3n/4) implies Gamma(Qb,V) has diameter 2 for every b != 0",
    "lem2.1": "odd n: exactly #V elements y have y^2 in V",
    "lem2.2": "sum_{u in V*} psi_u(x) = q^(n-j) if x in V, else 0",
    "lem2.3": "|sum_v eta(y+v)| <= q^(n/2); #V > q^(n/2) forces a nonzero square in y+V",
    "lem2.4": "|sum_{a in A, b in B} psi(Qb(a,b))| <= (q^n #A #B)^(1/2)",
    "lem2.5": "|sum_x psi(f(x))| <= (deg f - 1) q^(n/2) when p does not divide deg f",
    "rem1.5": "n=2k: omega(Qb, F_{q^k}) >= q^k for b in F_{q^k}*",
    "rem1.6": "n=2k, alpha nonsquare: 0 is isolated in Gamma(Qb, alpha F_{q^k})",
    "rem2.2": "proper V: some nontrivial additive character is 1 on V",
    "prop3.1": "C_V = {u : u^2 in V} is a maximal clique (size >= 3) unless S_V = {0}; other maximal cliques have size <= 2",
    "lem3.2": "classes of x^2 - y^2 in V are the components of Gamma(Q-,V), each a clique",
    "rem3.3": "Gamma(Q-,V) has <= q^n/#V components, equality iff every coset of V contains a square",
}
CLAIM_ORDER = {c: i for i, c in enumerate(CLAIMS)}
STATUSES = ("pass", "fail", "known_exception", "vacuous")

FAMILY = {
    "thm1.2": "undirected",
    **{c: "main" for c in ("thm1.3.i", "thm1.3.ii", "thm1.3.iii", "thm1.3.iv", "eq.near")},
    "thm1.4": "diam",
    **{c: "lemmas" for c in ("lem2.1", "lem2.2", "lem2.3", "lem2.4", "lem2.5")},
    **{c: "remarks" for c in ("rem1.5", "rem1.6", "rem2.2", "prop3.1", "lem3.2", "rem3.3")},
}
ODD_ONLY = {c for c in CLAIMS if c != "thm1.2"}

EXHAUSTIVE_B_LIMIT = 3**5
DEFAULT_B_SAMPLE = 32
DEFAULT_V_SAMPLE = 10
DEFAULT_V_LIMIT = 500
DEFAULT_FORM_SAMPLE = 200
FORM_EXHAUSTIVE_LIMIT = 5000
MAXCLIQUE_ENUM_LIMIT = 729
BFS_CROSS_CHECK_LIMIT = 2048


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class VerifyReport:
    claim_id: str
    instance: dict
    status: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def key(self) -> tuple:
        return (CLAIM_ORDER.get(self.claim_id, len(CLAIM_ORDER)), self.claim_id, _dumps(self.instance))

    def to_dict(self) -> dict:
        return {"claim_id": self.claim_id, "instance": self.instance, "status": self.status, "details": self.details}

    def to_json(self) -> str:
        return _dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "VerifyReport":
        return cls(d["claim_id"], d["instance"], d["status"], d.get("details", {}))


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _le_sqrt(x: int, N: int) -> bool:
    """x <= sqrt(N), exactly."""
    return x <= 0 or x * x <= N


def _instance(ctx: FieldCtx, **kw) -> dict:
    out = {"field": ctx.params()}
    for k, v in kw.items():
        if isinstance(v, ss.Subspace):
            v = v.to_json()
        out[k] = v
    return out


def _ambient(ctx: FieldCtx) -> str:
    return "odd prime" if ctx.m == 1 else "odd prime power"


def _rng(seed, *tags) -> random.Random:
    return random.Random(":".join(str(t) for t in (seed, *tags)))


def b_values(ctx: FieldCtx, b_sample: int | None = None, seed=0, tag="b") -> list[int]:
    """All nonzero b when q^n <= 3^5 (or the sample covers them), else a seeded sample."""
    total = ctx.size - 1
    if b_sample is None:
        b_sample = total if ctx.size <= EXHAUSTIVE_B_LIMIT else DEFAULT_B_SAMPLE
    if b_sample >= total:
        return list(range(1, ctx.size))
    return sorted(_rng(seed, tag, ctx.size).sample(range(1, ctx.size), b_sample))


def subspaces_for(
    ctx: FieldCtx, dims: Iterable[int], v_sample: int | None = None, seed=0, tag="V", v_limit: int = DEFAULT_V_LIMIT
) -> list[ss.Subspace]:
    """Every subspace of the given dimensions, or a seeded per-dimension sample.

    Enumeration is exhaustive when ``v_sample`` is None and the count is at
    most ``v_limit``; otherwise ``v_sample`` (default 10) distinct random
    subspaces per dimension are drawn.
    """
    out = []
    for j in dims:
        total = ss.gaussian_binomial(ctx.n, j, ctx.q)
        k = v_sample if v_sample is not None else (total if total <= v_limit else DEFAULT_V_SAMPLE)
        if k >= total:
            out.extend(ss.enumerate_subspaces(ctx, j))
            continue
        rng = _rng(seed, tag, j)
        seen: dict[tuple, ss.Subspace] = {}
        while len(seen) < k:
            V = ss.random_subspace(ctx, j, rng)
            seen.setdefault(V.basis, V)
        out.extend(sorted(seen.values(), key=lambda V: V.basis))
    return out


# -- worker pool ---------------------------------------------------------------


def _call(job):
    fn, args = job
    return fn(*args)


def pool_map(fn, arg_tuples: Sequence[tuple], workers: int = 1) -> list:
    """``[fn(*a) for a in arg_tuples]``, optionally across processes (order kept)."""
    jobs = [(fn, a) for a in arg_tuples]
    if workers <= 1 or len(jobs) < 2:
        return [_call(j) for j in jobs]
    chunk = max(1, len(jobs) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_call, jobs, chunksize=chunk))


def merge(report_lists: Iterable[Iterable[VerifyReport]]) -> list[VerifyReport]:
    out = [r for lst in report_lists for r in lst]
    out.sort(key=lambda r: r.key)
    return out


@functools.lru_cache(maxsize=8)
def _all_subspaces(ctx: FieldCtx) -> tuple[ss.Subspace, ...]:
    return tuple(ss.all_subspaces(ctx))


# -- which forms give undirected graphs ----------------------------------------


def check_form_undirected(ctx: FieldCtx, triple: tuple[int, int, int]) -> list[VerifyReport]:
    Q = fg.QuadForm(ctx, *triple)
    values = fg.form_values(Q)
    witness = None
    for V in _all_subspaces(ctx):
        if not fg.is_undirected(fg.graph_from_values(values, V, Q)):
            witness = V
            break
    observed = witness is None
    predicted = Q.cls.always_undirected
    details = {
        "class": str(Q.cls),
        "predicted_always_undirected": predicted,
        "observed_always_undirected": observed,
        "directed_witness": witness.to_json() if witness is not None else None,
        "ambient": "even characteristic" if ctx.p == 2 else "odd characteristic",
    }
    return [VerifyReport("thm1.2", _instance(ctx, form=list(triple)), _status(observed == predicted), details)]


def _sample_forms(ctx: FieldCtx, count: int, seed) -> list[tuple[int, int, int]]:
    """Half uniform nonzero triples, half drawn from the predicted-undirected families."""
    rng = _rng(seed, "forms", ctx.size)
    N = ctx.size
    forms: set[tuple[int, int, int]] = set()
    while len(forms) < count // 2:
        t = (rng.randrange(N), rng.randrange(N), rng.randrange(N))
        if t != (0, 0, 0):
            forms.add(t)
    while len(forms) < count:
        a, b = rng.randrange(N), rng.randrange(N)
        if rng.random() < 0.5 and (a or b):
            forms.add((a, b, a))
        elif a:
            forms.add((a, 0, ctx.neg(a)))
    return sorted(forms)


def verify_undirected_classification(
    ctx: FieldCtx, *, form_sample: int = DEFAULT_FORM_SAMPLE, seed=0, workers: int = 1,
    exhaustive_limit: int = FORM_EXHAUSTIVE_LIMIT,
) -> list[VerifyReport]:
    """Per-form reports plus one summary record (instance has ``summary: true``)."""
    N = ctx.size
    total = N**3 - 1
    if total <= exhaustive_limit:
        forms = [(a, b, c) for a in range(N) for b in range(N) for c in range(N) if (a, b, c) != (0, 0, 0)]
        mode = "exhaustive"
    else:
        forms = _sample_forms(ctx, form_sample, seed)
        mode = "sampled"
    reports = merge(pool_map(check_form_undirected, [(ctx, f) for f in forms], workers))
    predicted = sum(r.details["predicted_always_undirected"] for r in reports)
    observed = sum(r.details["observed_always_undirected"] for r in reports)
    bad = [r.instance["form"] for r in reports if r.status == "fail"]
    summary = VerifyReport(
        "thm1.2",
        _instance(ctx, summary=True),
        _status(not bad),
        {
            "mode": mode,
            "forms_checked": len(reports),
            "subspaces": len(_all_subspaces(ctx)),
            "predicted_always_undirected": predicted,
            "observed_always_undirected": observed,
            "mismatches": bad,
        },
    )
    return merge([reports, [summary]])


# -- clique numbers and connectivity -------------------------------------------


def _components_match(G: fg.DiGraph, classes: list[frozenset[int]]) -> bool:
    return ga.components(G) == classes


def check_main(ctx: FieldCtx, V: ss.Subspace, bs: Sequence[int], claims: frozenset[str] | None = None) -> list[VerifyReport]:
    ctx._require_odd()
    if not V.is_proper:
        raise ValueError("clique checks need a proper subspace")
    want = claims or frozenset(FAMILY_CLAIMS["main"])
    N, size = ctx.size, V.size
    inst = _instance(ctx, subspace=V)
    out = []
    need_pm = want & {"thm1.3.i", "thm1.3.ii", "thm1.3.iii", "eq.near"}
    if need_pm:
        Gp = fg.build_graph(fg.q_plus(ctx), V)
        Gm = fg.build_graph(fg.q_minus(ctx), V)
    if "thm1.3.i" in want:
        comp_p, comp_m = ga.components(Gp), ga.components(Gm)
        structured_m = fg.components_minus(ctx, V)
        plus = fg.structured_cliques_plus(ctx, V)
        predicted = N // size if size * size > N else None
        agree_m = comp_m == structured_m
        agree_p = plus.trivial or plus.clique in comp_p
        ok = len(comp_p) > 1 and len(comp_m) > 1 and agree_m and agree_p
        if predicted is not None:
            ok = ok and len(comp_m) == predicted
        out.append(VerifyReport("thm1.3.i", inst, _status(ok), {
            "components_plus": len(comp_p),
            "components_minus": len(comp_m),
            "predicted_components_minus": predicted,
            "structured_agree": agree_m and agree_p,
        }))
    omega_p = omega_m = None
    if want & {"thm1.3.ii", "eq.near"}:
        omega_p = ga.clique_number(Gp).omega
    if want & {"thm1.3.iii", "eq.near"}:
        omega_m = ga.clique_number(Gm).omega
    if "thm1.3.ii" in want:
        n0 = fg.count_N(ctx, 0, V)
        predicted = 2 if n0 == 1 else n0
        ok = omega_p == predicted and (ctx.n % 2 == 0 or omega_p == size)
        status = _status(ok)
        details = {"omega": omega_p, "N0": n0, "predicted": predicted, "size": size}
        if not ok and n0 == 1 and Gp.arc_count() == 0 and omega_p == 1:
            status = "known_exception"
            details["note"] = "empty graph: clique number 1, formula gives 2"
        out.append(VerifyReport("thm1.3.ii", inst, status, details))
    if "thm1.3.iii" in want:
        sq = ctx.square_arr(ctx.elements())
        labels = V.reduce_arr(sq)
        _, first = np.unique(labels, return_index=True)
        best = max(fg.count_N(ctx, int(sq[i]), V) for i in first)
        ok = omega_m == best and (ctx.n % 2 == 0 or omega_m >= size)
        out.append(VerifyReport("thm1.3.iii", inst, _status(ok), {"omega": omega_m, "max_N_u2": best, "size": size}))
    if "eq.near" in want:
        dev_p, dev_m = omega_p - size, omega_m - size
        ok = dev_p * dev_p <= N and dev_m * dev_m <= N
        out.append(VerifyReport("eq.near", inst, _status(ok), {
            "omega_plus": omega_p, "omega_minus": omega_m, "size": size, "bound": math.sqrt(N),
        }))
    if "thm1.3.iv" in want:
        omegas = {b: ga.clique_number(fg.build_graph(fg.q_b(ctx, b), V)).omega for b in bs}
        bad = sorted(b for b, w in omegas.items() if not _le_sqrt(w - 2, N))
        worst = max(omegas, key=lambda b: (omegas[b], -b)) if omegas else None
        out.append(VerifyReport("thm1.3.iv", _instance(ctx, subspace=V, b_values=list(bs)), _status(not bad), {
            "max_omega": omegas[worst] if worst is not None else None,
            "argmax_b": worst,
            "bound": math.sqrt(N) + 2,
            "violations": bad,
        }))
    return out


FAMILY_CLAIMS = {fam: [c for c, f in FAMILY.items() if f == fam] for fam in set(FAMILY.values())}


def verify_main(ctx: FieldCtx, V: ss.Subspace, *, b_sample: int | None = None, seed=0, claims=None) -> list[VerifyReport]:
    """Every clique and connectivity check for one proper subspace."""
    return merge([check_main(ctx, V, b_values(ctx, b_sample, seed), frozenset(claims) if claims else None)])


def verify_main_all(
    ctx: FieldCtx, *, b_sample: int | None = None, v_sample: int | None = None, seed=0, workers: int = 1, claims=None,
) -> list[VerifyReport]:
    ctx._require_odd()
    bs = b_values(ctx, b_sample, seed)
    Vs = subspaces_for(ctx, range(ctx.n), v_sample, seed)
    want = frozenset(claims) if claims else None
    return merge(pool_map(check_main, [(ctx, V, bs, want) for V in Vs], workers))


# -- diameter two for large subspaces ------------------------------------------


def diam_dims(ctx: FieldCtx) -> list[int]:
    """Dimensions j < n with q^j >= q^(3n/4)."""
    return [j for j in range(ctx.n) if 4 * j >= 3 * ctx.n]


def check_diam(ctx: FieldCtx, V: ss.Subspace, bs: Sequence[int]) -> list[VerifyReport]:
    failures = []
    bfs_agree = True
    for i, b in enumerate(bs):
        G = fg.build_graph(fg.q_b(ctx, b), V)
        ok = ga.has_diameter_two(G)
        if i == 0 and ctx.size <= BFS_CROSS_CHECK_LIMIT:
            bfs_agree = (ga.diameter(G).diameter == 2) == ok
        if not ok:
            failures.append({"b": b, "witness": list(ga.diameter_two_witness(G) or ())})
    return [VerifyReport("thm1.4", _instance(ctx, subspace=V, b_values=list(bs)), _status(not failures and bfs_agree), {
        "size": V.size,
        "checked_b": len(bs),
        "failures": failures,
        "bfs_cross_check": bfs_agree,
        "ambient": _ambient(ctx),
    })]


def verify_diam(
    ctx: FieldCtx, *, b_sample: int | None = None, v_sample: int | None = None, seed=0, workers: int = 1,
) -> list[VerifyReport]:
    ctx._require_odd()
    dims = diam_dims(ctx)
    if not dims:
        return [VerifyReport("thm1.4", _instance(ctx), "vacuous", {
            "reason": "no proper subspace has #V >= q^(3n/4)", "ambient": _ambient(ctx)})]
    bs = b_values(ctx, b_sample, seed)
    Vs = subspaces_for(ctx, dims, v_sample, seed)
    return merge(pool_map(check_diam, [(ctx, V, bs) for V in Vs], workers))


# -- character sums and square counts ------------------------------------------


def check_lemmas_subspace(ctx: FieldCtx, V: ss.Subspace, claims: frozenset[str] | None = None) -> list[VerifyReport]:
    ctx._require_odd()
    want = claims or frozenset({"lem2.1", "lem2.2", "lem2.3"})
    N, size = ctx.size, V.size
    inst = _instance(ctx, subspace=V)
    out = []
    if "lem2.1" in want and ctx.n % 2 == 1:
        count = int(V.mask[ctx.square_arr(ctx.elements())].sum())
        out.append(VerifyReport("lem2.1", inst, _status(count == size), {"count": count, "size": size}))
    if "lem2.2" in want:
        Vs = ss.dual(V)
        table = cs.indicator_table(Vs)
        predicted = np.where(V.mask, float(Vs.size), 0.0)
        err = float(np.abs(table - predicted).max())
        ok = err <= cs.TOL and Vs.dim == ctx.n - V.dim
        out.append(VerifyReport("lem2.2", inst, _status(ok), {
            "dual": Vs.to_json(), "dual_size": Vs.size, "max_error": err}))
    if "lem2.3" in want and V.is_proper:
        ys = range(N) if N <= 6561 else ss.coset_reps(V)
        worst, bad, identity_ok, square_ok = 0.0, [], True, True
        for y in ys:
            chk = cs.affine_eta_sum(V, y)
            worst = max(worst, abs(chk.value))
            if not chk.ok:
                bad.append(y)
            if chk.extras["square_forced"] and not chk.extras["has_nonzero_square"]:
                square_ok = False
                bad.append(y)
            if fg.count_N(ctx, y, V) != size + round(chk.value.real):
                identity_ok = False
        out.append(VerifyReport("lem2.3", inst, _status(not bad and identity_ok), {
            "max_abs": worst,
            "bound": math.sqrt(N),
            "square_forced": size * size > N,
            "squares_ok": square_ok,
            "count_identity_ok": identity_ok,
            "violations": sorted(set(bad)),
        }))
    return out


def check_lem24(ctx: FieldCtx, trials: int, seed) -> list[VerifyReport]:
    ctx._require_odd()
    rng = _rng(seed, "lem2.4", ctx.size)
    N = ctx.size
    worst, bad = 0.0, []
    plans = [("full", None)] + [("random", t) for t in range(trials)]
    for kind, t in plans:
        if kind == "full":
            b, w, A, B = 1, 1, range(N), range(N)
        else:
            b, w = rng.randrange(1, N), rng.randrange(1, N)
            A = rng.sample(range(N), rng.randrange(1, N + 1))
            B = rng.sample(range(N), rng.randrange(1, N + 1))
        chk = cs.gs_double_sum(A, B, fg.q_b(ctx, b), w)
        worst = max(worst, abs(chk.value) / chk.bound)
        if not chk.ok:
            bad.append(t)
    return [VerifyReport("lem2.4", _instance(ctx, seed=seed, trials=trials), _status(not bad), {
        "instances": len(plans), "max_ratio": worst, "failures": bad})]


def check_lem25(ctx: FieldCtx, trials: int, seed, max_degree: int = 6, exhaustive_limit: int = 10**4) -> list[VerifyReport]:
    ctx._require_odd()
    rng = _rng(seed, "lem2.5", ctx.size)
    N, p = ctx.size, ctx.p
    worst, bad, gauss_dev, quadratics = 0.0, [], 0.0, 0
    if N * N <= exhaustive_limit:
        quad = [(c0, c1) for c1 in range(N) for c0 in range(N)]
    else:
        quad = [(rng.randrange(N), rng.randrange(N)) for _ in range(min(trials, exhaustive_limit))]
    for c0, c1 in quad:
        chk = cs.weil_sum(ctx, [c0, c1, 1], 1)
        quadratics += 1
        worst = max(worst, abs(chk.value) / chk.bound)
        gauss_dev = max(gauss_dev, abs(abs(chk.value) - math.sqrt(N)))
        if not chk.ok:
            bad.append({"f": [c0, c1, 1], "a": 1})
    degrees = [d for d in range(1, max_degree + 1) if d % p]
    for _ in range(trials):
        d = rng.choice(degrees)
        f = [rng.randrange(N) for _ in range(d)] + [rng.randrange(1, N)]
        a = rng.randrange(1, N)
        chk = cs.weil_sum(ctx, f, a)
        if chk.bound > 0:
            worst = max(worst, abs(chk.value) / chk.bound)
        if d == 2:
            gauss_dev = max(gauss_dev, abs(abs(chk.value) - math.sqrt(N)))
        if not chk.ok:
            bad.append({"f": f, "a": a})
    gauss_ok = gauss_dev <= cs.TOL
    return [VerifyReport("lem2.5", _instance(ctx, seed=seed, trials=trials), _status(not bad and gauss_ok), {
        "quadratics": quadratics, "random_instances": trials, "max_ratio": worst,
        "gauss_max_deviation": gauss_dev, "failures": bad})]


def verify_lemmas(ctx: FieldCtx, *, trials: int = 1000, seed=0, workers: int = 1, claims=None) -> list[VerifyReport]:
    ctx._require_odd()
    want = frozenset(claims) if claims else frozenset(FAMILY_CLAIMS["lemmas"])
    lists = []
    if "lem2.1" in want and ctx.n % 2 == 0:
        lists.append([VerifyReport("lem2.1", _instance(ctx), "vacuous", {"reason": "n is even"})])
    per_v = want & {"lem2.1", "lem2.2", "lem2.3"}
    if per_v:
        lists += pool_map(check_lemmas_subspace, [(ctx, V, per_v) for V in _all_subspaces(ctx)], workers)
    if "lem2.4" in want:
        lists.append(check_lem24(ctx, trials, seed))
    if "lem2.5" in want:
        lists.append(check_lem25(ctx, trials, seed))
    return merge(lists)


# -- subfield bounds, maximal cliques, components ------------------------------


def subfield_clique_bound(ctx: FieldCtx) -> list[VerifyReport]:
    """omega(Qb, F_{q^k}) >= q^k for every b in F_{q^k}*, n = 2k."""
    if ctx.n % 2:
        raise OddDegree("needs n = 2k")
    k = ctx.n // 2
    U = ss.frobenius_fixed(ctx, k)
    target = ctx.q**k
    omegas, bad = {}, []
    for b in U.element_array.tolist():
        if b == 0:
            continue
        G = fg.build_graph(fg.q_b(ctx, b), U)
        w = ga.clique_number(G).omega
        omegas[b] = w
        if w < target or not G.is_clique(U.element_array.tolist()):
            bad.append(b)
    return [VerifyReport("rem1.5", _instance(ctx, subspace=U), _status(not bad), {
        "subfield_size": target, "min_omega": min(omegas.values()), "max_omega": max(omegas.values()),
        "upper_bound": math.sqrt(ctx.size) + 2, "violations": bad})]


def isolated_zero(ctx: FieldCtx, bs: Sequence[int]) -> list[VerifyReport]:
    """0 has no neighbour in Gamma(Qb, alpha F_{q^k}), alpha a nonsquare, n = 2k."""
    if ctx.n % 2:
        raise OddDegree("needs n = 2k")
    ctx._require_odd()
    alpha = ctx.first_nonsquare()
    W = ss.scale(ss.frobenius_fixed(ctx, ctx.n // 2), alpha)
    nonsquares = bool((ctx.eta_arr(W.element_array[W.element_array != 0]) == -1).all())
    bad = [b for b in bs if fg.build_graph(fg.q_b(ctx, b), W).out_degree(0) != 0]
    return [VerifyReport("rem1.6", _instance(ctx, subspace=W, alpha=alpha, b_values=list(bs)),
                         _status(not bad and nonsquares), {"all_nonzero_nonsquares": nonsquares, "violations": bad})]


def check_remarks_subspace(ctx: FieldCtx, V: ss.Subspace, claims: frozenset[str] | None = None) -> list[VerifyReport]:
    ctx._require_odd()
    want = claims or frozenset({"rem2.2", "prop3.1", "lem3.2", "rem3.3"})
    N, size = ctx.size, V.size
    inst = _instance(ctx, subspace=V)
    out = []
    if "rem2.2" in want:
        Vs = ss.dual(V)
        u = min(x for x in Vs.element_array.tolist() if x)
        trivial_on_v = bool(np.abs(ctx.psi_arr(u, V.element_array) - 1).max() <= 1e-9)
        nontrivial = bool(np.abs(ctx.psi_arr(u, ctx.elements()) - 1).max() > 1e-9)
        out.append(VerifyReport("rem2.2", inst, _status(trivial_on_v and nontrivial), {"character": u}))
    if want & {"lem3.2", "rem3.3"}:
        Gm = fg.build_graph(fg.q_minus(ctx), V)
        comps = ga.components(Gm)
    if "lem3.2" in want:
        classes = fg.components_minus(ctx, V)
        cliques = all(Gm.is_clique(c) for c in classes)
        ok = comps == classes and cliques and len(comps) > 1
        out.append(VerifyReport("lem3.2", inst, _status(ok), {
            "classes": len(classes), "components": len(comps), "classes_are_cliques": cliques}))
    if "rem3.3" in want:
        cosets = N // size
        square_cosets = len(np.unique(V.reduce_arr(ctx.square_arr(ctx.elements()))))
        every_coset_square = square_cosets == cosets
        equality = len(comps) == cosets
        threshold = size * size > N
        ok = len(comps) <= cosets and equality == every_coset_square and (equality or not threshold)
        out.append(VerifyReport("rem3.3", inst, _status(ok), {
            "components": len(comps), "cosets": cosets, "cosets_with_square": square_cosets,
            "above_threshold": threshold, "equality": equality,
            "exploratory": not threshold,
        }))
    if "prop3.1" in want:
        out.append(_check_prop31(ctx, V, inst))
    return out


def _check_prop31(ctx: FieldCtx, V: ss.Subspace, inst: dict) -> VerifyReport:
    Gp = fg.build_graph(fg.q_plus(ctx), V)
    plus = fg.structured_cliques_plus(ctx, V)
    N = ctx.size
    details: dict = {"trivial": plus.trivial, "C_V_size": len(plus.clique)}
    if plus.trivial:
        rep = ga.clique_number(Gp)
        details["omega"] = rep.omega
        ok = rep.omega == 2
        if rep.omega == 1 and Gp.arc_count() == 0:
            details["note"] = "empty graph: clique number 1, statement gives 2"
            return VerifyReport("prop3.1", inst, "known_exception", details)
        return VerifyReport("prop3.1", inst, _status(ok), details)
    C = plus.clique
    rest = sorted(set(range(N)) - C)
    is_clique = Gp.is_clique(C)
    comps = ga.components(Gp)
    is_component = C in comps
    # other cliques of size >= 3 would be triangles off C_V (C_V is a component)
    off = fg.DiGraph(Gp.induced(rest)) if rest else None
    off_omega = ga.clique_number(off).omega if off is not None else 0
    ok = is_clique and is_component and len(C) >= 3 and off_omega <= 2 and len(comps) > 1
    details.update({"is_clique": is_clique, "is_component": is_component, "max_clique_off_C_V": off_omega})
    if N <= MAXCLIQUE_ENUM_LIMIT:
        sizes: dict[int, int] = {}
        found_c = False
        for K in ga.maximal_cliques(Gp):
            if K == C:
                found_c = True
            else:
                sizes[len(K)] = sizes.get(len(K), 0) + 1
        others_ok = all(s <= 2 for s in sizes)
        details["other_maximal_clique_sizes"] = {str(k): v for k, v in sorted(sizes.items())}
        ok = ok and found_c and others_ok
    return VerifyReport("prop3.1", inst, _status(ok), details)


def verify_remarks(ctx: FieldCtx, *, b_sample: int | None = None, seed=0, workers: int = 1, claims=None) -> list[VerifyReport]:
    ctx._require_odd()
    want = frozenset(claims) if claims else frozenset(FAMILY_CLAIMS["remarks"])
    lists = []
    for claim, fn in (("rem1.5", lambda: subfield_clique_bound(ctx)),
                      ("rem1.6", lambda: isolated_zero(ctx, b_values(ctx, b_sample, seed)))):
        if claim not in want:
            continue
        if ctx.n % 2:
            lists.append([VerifyReport(claim, _instance(ctx), "vacuous", {"reason": "n is odd"})])
        else:
            lists.append(fn())
    per_v = want & {"rem2.2", "prop3.1", "lem3.2", "rem3.3"}
    if per_v:
        Vs = subspaces_for(ctx, range(ctx.n), None, seed)
        lists += pool_map(check_remarks_subspace, [(ctx, V, per_v) for V in Vs], workers)
    return merge(lists)


# -- top level -----------------------------------------------------------------


def verify(
    ctx: FieldCtx, claim: str = "all", *, b_sample: int | None = None, v_sample: int | None = None,
    form_sample: int = DEFAULT_FORM_SAMPLE, trials: int = 1000, seed=0, workers: int = 1,
) -> list[VerifyReport]:
    """Run one claim id, or ``"all"``; odd-only claims are vacuous for even q."""
    if claim != "all" and claim not in CLAIMS:
        raise KeyError(f"unknown claim {claim!r}")
    wanted = list(CLAIMS) if claim == "all" else [claim]
    families = []
    for c in wanted:
        if FAMILY[c] not in families:
            families.append(FAMILY[c])
    lists = []
    odd = ctx.p != 2
    for fam in families:
        claims = [c for c in wanted if FAMILY[c] == fam]
        if fam != "undirected" and not odd:
            lists.append([VerifyReport(c, _instance(ctx), "vacuous", {"reason": "needs odd characteristic"}) for c in claims])
            continue
        if fam == "undirected":
            lists.append(verify_undirected_classification(ctx, form_sample=form_sample, seed=seed, workers=workers))
        elif fam == "main":
            lists.append(verify_main_all(ctx, b_sample=b_sample, v_sample=v_sample, seed=seed, workers=workers, claims=claims))
        elif fam == "diam":
            lists.append(verify_diam(ctx, b_sample=b_sample, v_sample=v_sample, seed=seed, workers=workers))
        elif fam == "lemmas":
            lists.append(verify_lemmas(ctx, trials=trials, seed=seed, workers=workers, claims=claims))
        elif fam == "remarks":
            lists.append(verify_remarks(ctx, b_sample=b_sample, seed=seed, workers=workers, claims=claims))
    return merge(lists)


def replay(report: VerifyReport | dict) -> VerifyReport:
    """Re-run the check behind a report from its instance descriptor alone."""
    if isinstance(report, dict):
        report = VerifyReport.from_dict(report)
    inst = report.instance
    ctx = tower_from_params(inst["field"])
    claim = report.claim_id
    V = ss.from_rows(ctx, inst["subspace"]) if inst.get("subspace") is not None else None
    if report.status == "vacuous":
        return VerifyReport(claim, inst, "vacuous", report.details)
    fam = FAMILY[claim]
    if fam == "undirected":
        if inst.get("summary"):
            rerun = [r for r in verify_undirected_classification(ctx) if r.instance.get("summary")]
        else:
            rerun = check_form_undirected(ctx, tuple(inst["form"]))
    elif fam == "main":
        rerun = check_main(ctx, V, inst.get("b_values", []), frozenset({claim}))
    elif fam == "diam":
        rerun = check_diam(ctx, V, inst["b_values"])
    elif claim == "lem2.4":
        rerun = check_lem24(ctx, inst["trials"], inst["seed"])
    elif claim == "lem2.5":
        rerun = check_lem25(ctx, inst["trials"], inst["seed"])
    elif fam == "lemmas":
        rerun = check_lemmas_subspace(ctx, V, frozenset({claim}))
    elif claim == "rem1.5":
        rerun = subfield_clique_bound(ctx)
    elif claim == "rem1.6":
        rerun = isolated_zero(ctx, inst["b_values"])
    else:
        rerun = check_remarks_subspace(ctx, V, frozenset({claim}))
    matches = [r for r in rerun if r.claim_id == claim and r.instance == inst]
    if len(matches) != 1:
        raise ValueError(f"could not replay {claim} on {inst}")
    return matches[0]


def summarize(reports: Iterable[VerifyReport]) -> dict[str, dict[str, int]]:
    out: dict[str, dict[str, int]] = {}
    for r in reports:
        row = out.setdefault(r.claim_id, {s: 0 for s in STATUSES})
        row[r.status] += 1
    return dict(sorted(out.items(), key=lambda kv: CLAIM_ORDER.get(kv[0], 99)))


def summary_csv(reports: Iterable[VerifyReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["claim_id", *STATUSES])
    for claim, row in summarize(reports).items():
        w.writerow([claim, *(row[s] for s in STATUSES)])
    return buf.getvalue()


def has_failures(reports: Iterable[VerifyReport]) -> bool:
    return any(r.status == "fail" for r in reports)


# -- scans for the open problems -----------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    dim: int
    subspace: tuple
    b: int
    omega: int | None
    size: int
    connected: bool
    diameter: int | None  # None when disconnected
    rails_ok: bool = True

    @property
    def ratio(self) -> float | None:
        return None if self.omega is None else self.omega / self.size

    def to_dict(self) -> dict:
        return {
            "dim": self.dim, "subspace": [list(r) for r in self.subspace], "b": self.b, "omega": self.omega,
            "size": self.size, "ratio": self.ratio, "connected": self.connected,
            "diameter": self.diameter if self.connected else "disconnected", "rails_ok": self.rails_ok,
        }


@dataclass
class ScanReport:
    claim_id: str
    field: dict
    rows: list[ScanRow]
    summary: dict

    CSV_COLUMNS = ("dim", "subspace", "b", "omega", "size", "ratio", "connected", "diameter", "rails_ok")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for row in self.rows:
            d = row.to_dict()
            d["subspace"] = _dumps(d["subspace"])
            d["ratio"] = "" if d["ratio"] is None else f"{d['ratio']:.6f}"
            d["omega"] = "" if d["omega"] is None else d["omega"]
            w.writerow([d[c] for c in self.CSV_COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        return _dumps({"claim_id": self.claim_id, "field": self.field, "summary": self.summary})


def _scan_subspace(ctx: FieldCtx, V: ss.Subspace, bs: Sequence[int], with_omega: bool) -> list[ScanRow]:
    N = ctx.size
    rows = []
    for b in bs:
        G = fg.build_graph(fg.q_b(ctx, b), V)
        d = ga.diameter(G)
        omega = ga.clique_number(G).omega if with_omega else None
        rails = True
        if omega is not None:
            rails = 1 <= omega <= 2 * V.size and _le_sqrt(omega - 2, N)
        rows.append(ScanRow(V.dim, V.basis, b, omega, V.size, d.connected,
                            d.diameter if d.connected else None, rails))
    return rows


def scan_clique_ratio(
    ctx: FieldCtx, dims: Sequence[int], b_sample: int | None = None, seed=0, *,
    v_sample: int | None = None, workers: int = 1,
) -> ScanReport:
    """Exact omega(Qb, V) / #V over enumerated or sampled (V, b)."""
    ctx._require_odd()
    bs = b_values(ctx, b_sample, seed)
    Vs = subspaces_for(ctx, dims, v_sample, seed)
    rows = [r for lst in pool_map(_scan_subspace, [(ctx, V, bs, True) for V in Vs], workers) for r in lst]
    rows.sort(key=lambda r: (r.dim, r.subspace, r.b))
    N = ctx.size
    summary: dict = {"rows": len(rows), "per_dim": {}}
    for j in sorted(set(r.dim for r in rows)):
        sel = [r for r in rows if r.dim == j]
        top = max(sel, key=lambda r: r.omega)
        summary["per_dim"][str(j)] = {
            "instances": len(sel),
            "max_omega": top.omega,
            "max_ratio": top.ratio,
            "min_ratio": min(r.ratio for r in sel),
            "argmax": {"subspace": [list(x) for x in top.subspace], "b": top.b},
            "connected_fraction": sum(r.connected for r in sel) / len(sel),
        }
    summary["trivial_bound_violations"] = [
        {"dim": r.dim, "subspace": [list(x) for x in r.subspace], "b": r.b, "omega": r.omega}
        for r in rows if r.omega > 2 * r.size
    ]
    summary["thm1.3.iv_violations"] = sum(not _le_sqrt(r.omega - 2, N) for r in rows)
    return ScanReport("scan.ratio", ctx.params(), rows, summary)


def estimate_s(
    ctx: FieldCtx, *, b_sample: int | None = None, v_sample: int | None = None, seed=0, workers: int = 1,
) -> ScanReport:
    """Connectivity of Gamma(Qb, V) by dim V, from n-1 downward; omega is not computed."""
    ctx._require_odd()
    n = ctx.n
    bs = b_values(ctx, b_sample, seed)
    dims = list(range(n - 1, 0, -1))
    Vs = subspaces_for(ctx, dims, v_sample, seed)
    if n % 2 == 0:
        W = ss.scale(ss.frobenius_fixed(ctx, n // 2), ctx.first_nonsquare())
        if W not in Vs:
            Vs.append(W)
    rows = [r for lst in pool_map(_scan_subspace, [(ctx, V, bs, False) for V in Vs], workers) for r in lst]
    rows.sort(key=lambda r: (-r.dim, r.subspace, r.b))
    per_dim = {}
    for j in dims:
        sel = [r for r in rows if r.dim == j]
        per_dim[str(j)] = {
            "instances": len(sel),
            "connected_fraction": sum(r.connected for r in sel) / len(sel) if sel else None,
            "max_diameter": max((r.diameter for r in sel if r.connected), default=None),
        }
    s_hat = None
    for j in dims:
        if per_dim[str(j)]["connected_fraction"] == 1.0:
            s_hat = j
        else:
            break
    summary = {"per_dim": per_dim, "empirical_s": s_hat, "ambient": _ambient(ctx)}
    if n == 4:
        summary["consistent_with_s4_eq_3"] = s_hat == 3
    return ScanReport("scan.sn", ctx.params(), rows, summary)
