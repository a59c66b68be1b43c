"""``qfgl`` command line.

Exit codes: 0 success, 1 some check failed, 2 usage or input error,
3 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import caps as _caps
from . import charsum as cs
from . import formgraph as fg
from . import graphalgo as ga
from . import harness as hs
from . import subspace as ss
from .errors import CapExceeded, QfglError
from .gf import make_tower

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

# flag defaults applied after the config file has been merged
DEFAULTS = {"p": 3, "m": 1, "n": 2, "seed": 0, "form_sample": hs.DEFAULT_FORM_SAMPLE, "trials": 1000}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _form(text: str) -> tuple[int, int, int]:
    vals = _int_list(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("--form takes a,b,c")
    return tuple(vals)


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from None


def _claims_epilog() -> str:
    lines = ["claim ids:"]
    lines += [f"  {cid:<11} {desc}" for cid, desc in hs.CLAIMS.items()]
    lines.append("  all         every claim above")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("field and run options")
    g.add_argument("--p", type=int, help="characteristic (default 3)")
    g.add_argument("--m", type=int, help="F_q = F_{p^m} (default 1)")
    g.add_argument("--n", type=int, help="extension degree over F_q (default 2)")
    g.add_argument("--seed", type=int, help="sampling seed (default 0)")
    g.add_argument("--modulus-seed", type=int, help="pick random irreducible moduli with this seed")
    g.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    g.add_argument("--caps", help="cap overrides, e.g. graph=4096,clique=2**12")
    g.add_argument("--config", type=Path, help="key=value file; flags take precedence")
    g.add_argument("--out", type=Path, help="write JSON output here instead of stdout")
    g.add_argument("--csv", type=Path, help="also write a CSV table here")

    parser = _Parser(
        prog="qfgl",
        description="Graphs of quadratic forms over finite fields: construction, verification and scans.",
        epilog=_claims_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="{verify,graph,clique,charsum,scan}")
    sub.required = True

    v = sub.add_parser("verify", parents=[common], help="check a claim (or all) and emit JSON lines",
                       epilog=_claims_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    v.add_argument("claim", choices=[*hs.CLAIMS, "all"], metavar="CLAIM")
    v.add_argument("--b-sample", type=int, help="number of b values (default: all when q^n <= 243, else 32)")
    v.add_argument("--v-sample", type=int, help="subspaces per dimension (default: all when few, else 10)")
    v.add_argument("--form-sample", type=int, help="forms sampled when exhaustive search is too large")
    v.add_argument("--trials", type=int, help="randomized instances for the sum bounds (default 1000)")

    formopts = _Parser(add_help=False)
    formopts.add_argument("--form", type=_form, help="a,b,c for aX^2+bXY+cY^2 (default 1,0,1)")
    formopts.add_argument("--subspace", type=_json, help="JSON list of F_q row vectors, e.g. '[[1,0]]'")

    gr = sub.add_parser("graph", parents=[common, formopts], help="build a graph and export it")
    gr.add_argument("--dot", type=Path, help="write DOT here")
    gr.add_argument("--edges", type=Path, help="write x,y arc list here")

    sub.add_parser("clique", parents=[common, formopts], help="exact clique number and diameter")

    c = sub.add_parser("charsum", parents=[common], help="evaluate a character sum against its bound")
    c.add_argument("kind", choices=["indicator", "affine", "gs", "weil"])
    c.add_argument("--subspace", type=_json, help="JSON rows (indicator: V*, affine: V)")
    c.add_argument("--x", type=int, help="indicator: evaluation point")
    c.add_argument("--y", type=int, help="affine: shift")
    c.add_argument("--b", type=int, help="gs: middle coefficient of Q_b")
    c.add_argument("--w", type=int, help="gs: character index")
    c.add_argument("--A", type=_json, help="gs: JSON list of elements (default: whole field)")
    c.add_argument("--B", type=_json, help="gs: JSON list of elements (default: whole field)")
    c.add_argument("--poly", type=_json, help="weil: JSON coefficients, lowest degree first")
    c.add_argument("--a", type=int, help="weil: character index (default 1)")

    s = sub.add_parser("scan", parents=[common], help="open-problem scans (ratio: omega/#V, sn: connectivity)")
    s.add_argument("which", choices=["ratio", "sn"])
    s.add_argument("--dims", type=_int_list, help="subspace dimensions for the ratio scan (default 0..n-1)")
    s.add_argument("--b-sample", type=int)
    s.add_argument("--v-sample", type=int)
    return parser


def load_config(path: Path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _merge_config(parser: argparse.ArgumentParser, ns: argparse.Namespace) -> argparse.Namespace:
    if ns.config is not None:
        sub = parser._subparsers._group_actions[0].choices[ns.command]  # noqa: SLF001
        actions = {a.dest: a for a in sub._actions}  # noqa: SLF001
        for key, raw in load_config(ns.config).items():
            if key not in actions:
                raise UsageError(f"unknown config key {key!r}")
            if getattr(ns, key, None) is not None:
                continue
            action = actions[key]
            try:
                value = action.type(raw) if action.type else raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {key}: {exc}") from None
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config key {key}: {value!r} not in {sorted(action.choices)}")
            setattr(ns, key, value)
    for key, value in DEFAULTS.items():
        if getattr(ns, key, None) is None:
            setattr(ns, key, value)
    if getattr(ns, "workers", None) is None:
        ns.workers = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
    return ns


def _emit(ns, text: str):
    if ns.out is not None:
        ns.out.write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _subspace(ctx, rows, default_whole=False):
    if rows is None:
        return ss.whole(ctx) if default_whole else ss.zero(ctx)
    if not isinstance(rows, list):
        raise UsageError("--subspace must be a JSON list of rows")
    return ss.from_rows(ctx, rows)


def _cmd_verify(ns, ctx) -> int:
    reports = hs.verify(
        ctx, ns.claim, b_sample=ns.b_sample, v_sample=ns.v_sample, form_sample=ns.form_sample,
        trials=ns.trials, seed=ns.seed, workers=ns.workers,
    )
    _emit(ns, "".join(r.to_json() + "\n" for r in reports))
    if ns.csv is not None:
        ns.csv.write_text(hs.summary_csv(reports))
    for claim, row in hs.summarize(reports).items():
        counts = " ".join(f"{k}={v}" for k, v in row.items() if v)
        print(f"{claim}: {counts}", file=sys.stderr)
    return EXIT_FAIL if hs.has_failures(reports) else EXIT_OK


def _graph(ns, ctx):
    a, b, c = ns.form or (1, 0, 1)
    for v in (a, b, c):
        if not 0 <= v < ctx.size:
            raise UsageError(f"form coefficient {v} is not an element index of F_{ctx.size}")
    Q = fg.QuadForm(ctx, a, b, c)
    V = _subspace(ctx, ns.subspace)
    return Q, V, fg.build_graph(Q, V)


def _cmd_graph(ns, ctx) -> int:
    Q, V, G = _graph(ns, ctx)
    if ns.dot is not None:
        ns.dot.write_text(fg.to_dot(G))
    if ns.edges is not None:
        ns.edges.write_text(fg.to_edge_csv(G))
    info = {
        "field": ctx.params(), "form": Q.triple(), "class": str(Q.cls), "subspace": V.to_json(),
        "vertices": G.vertex_count, "arcs": G.arc_count(), "undirected": G.symmetric,
    }
    _emit(ns, _dumps(info) + "\n")
    return EXIT_OK


def _cmd_clique(ns, ctx) -> int:
    Q, V, G = _graph(ns, ctx)
    if not G.symmetric:
        raise UsageError(f"graph of {Q} is directed; clique search needs an undirected graph")
    rep = ga.clique_number(G)
    info = {"field": ctx.params(), "form": Q.triple(), "subspace": V.to_json(), "size": V.size,
            **rep.to_json(), **{"diameter": ga.diameter(G).to_json()["diameter"]}}
    _emit(ns, _dumps(info) + "\n")
    return EXIT_OK


def _cmd_charsum(ns, ctx) -> int:
    kind = ns.kind
    if kind == "indicator":
        Vs = _subspace(ctx, ns.subspace)
        x = 0 if ns.x is None else ns.x
        value = cs.indicator_value(Vs, x)
        predicted = Vs.size if ss.contains(ss.dual(Vs), x) else 0
        chk = cs.SumCheck(value, float(predicted), f"indicator x={x}", {"predicted": predicted})
        out = chk.to_json()
        out["ok"] = abs(value - predicted) <= cs.TOL
    elif kind == "affine":
        out = cs.affine_eta_sum(_subspace(ctx, ns.subspace), ns.y or 0).to_json()
    elif kind == "gs":
        if ns.b is None or ns.w is None:
            raise UsageError("gs needs --b and --w")
        A = ns.A if ns.A is not None else range(ctx.size)
        B = ns.B if ns.B is not None else range(ctx.size)
        out = cs.gs_double_sum(A, B, fg.q_b(ctx, ns.b), ns.w).to_json()
    else:
        if ns.poly is None:
            raise UsageError("weil needs --poly")
        out = cs.weil_sum(ctx, ns.poly, 1 if ns.a is None else ns.a).to_json()
    _emit(ns, _dumps(out) + "\n")
    return EXIT_OK if out["ok"] else EXIT_FAIL


def _cmd_scan(ns, ctx) -> int:
    if ns.which == "ratio":
        dims = ns.dims if ns.dims is not None else list(range(ctx.n))
        rep = hs.scan_clique_ratio(ctx, dims, ns.b_sample, ns.seed, v_sample=ns.v_sample, workers=ns.workers)
    else:
        rep = hs.estimate_s(ctx, b_sample=ns.b_sample, v_sample=ns.v_sample, seed=ns.seed, workers=ns.workers)
    _emit(ns, rep.to_json() + "\n")
    if ns.csv is not None:
        ns.csv.write_text(rep.to_csv())
    return EXIT_OK


COMMANDS = {"verify": _cmd_verify, "graph": _cmd_graph, "clique": _cmd_clique, "charsum": _cmd_charsum, "scan": _cmd_scan}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    saved_caps = os.environ.get(_caps.ENV_VAR)
    try:
        ns = parser.parse_args(argv)
        ns = _merge_config(parser, ns)
        if ns.caps:
            # workers inherit the environment, so overrides travel with them
            merged = {**_caps.parse_overrides(saved_caps or ""), **_caps.parse_overrides(ns.caps)}
            os.environ[_caps.ENV_VAR] = ",".join(f"{k}={v}" for k, v in merged.items())
        ctx = make_tower(ns.p, ns.m, ns.n, ns.modulus_seed)
        return COMMANDS[ns.command](ns, ctx)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except CapExceeded as exc:
        print(f"qfgl: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, QfglError, ValueError, KeyError, OSError) as exc:
        print(f"qfgl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if saved_caps is None:
            os.environ.pop(_caps.ENV_VAR, None)
        else:
            os.environ[_caps.ENV_VAR] = saved_caps


def main() -> None:
    sys.exit(run())
