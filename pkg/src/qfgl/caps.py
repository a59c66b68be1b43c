"""Size caps.

Defaults can be overridden process-wide with ``QFGL_CAP_OVERRIDE``, a comma
separated list of ``name=value`` pairs, e.g. ``graph=4096,clique=1024``.
Values accept ``2**k`` notation.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

ENV_VAR = "QFGL_CAP_OVERRIDE"


@dataclass(frozen=True)
class Caps:
    field: int = 2**24  # q^n for make_tower
    log_table: int = 2**20  # build discrete-log tables up to this q^n
    graph: int = 2**16  # vertices for build_graph
    clique: int = 2**14  # vertices for exact clique search
    enumeration: int = 10**6  # subspaces per enumerate_subspaces call
    iteration: int = 2**24  # elements materialised per subspace / coset list

    def replace(self, **kw) -> "Caps":
        return dataclasses.replace(self, **kw)


def _parse_int(text: str) -> int:
    text = text.strip()
    if "**" in text:
        base, exp = text.split("**", 1)
        return int(base) ** int(exp)
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


def parse_overrides(spec: str) -> dict[str, int]:
    names = {f.name for f in dataclasses.fields(Caps)}
    out = {}
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in names:
            raise ValueError(f"bad cap override {item!r}; known caps: {sorted(names)}")
        out[key] = _parse_int(value)
    return out


def current() -> Caps:
    """Defaults merged with the environment override (read on every call)."""
    spec = os.environ.get(ENV_VAR, "")
    if not spec:
        return Caps()
    return Caps(**parse_overrides(spec))
