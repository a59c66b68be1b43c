"""Graphs of quadratic forms over finite fields and verification of their structure."""

from .errors import CapExceeded, QfglError
from .formgraph import DiGraph, QuadForm, build_graph, classify_form
from .gf import FieldCtx, make_tower
from .graphalgo import clique_number, components, diameter
from .harness import CLAIMS, VerifyReport, replay, verify
from .subspace import Subspace

__all__ = [
    "CLAIMS", "CapExceeded", "DiGraph", "FieldCtx", "QfglError", "QuadForm", "Subspace", "VerifyReport",
    "build_graph", "classify_form", "clique_number", "components", "diameter", "make_tower", "replay", "verify",
]
__version__ = "0.1.0"
