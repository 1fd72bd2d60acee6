"""Simple-cycle counting on label-erased state graphs.

Two counters share one kernel contract: the plain root-by-root unfolding
(roots in ascending vertex order, each root removed after its turn) and the
variant that first restricts every unfolding to the root's strongly
connected component in the residual graph.  A compiled kernel is used when
available; set ``BOCY_PURE_PYTHON=1`` to force the Python one.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

from ..machine import MealyMachine, StateGraph, abstract_graph

if os.environ.get("BOCY_PURE_PYTHON") == "1":
    from . import _kernels_py as _kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _kernels
        BACKEND = "python"

from . import _kernels_py

DEFAULT_CAP = 10_000_000


@dataclass(frozen=True, order=True)
class Cycle:
    """A simple cycle, stored rotated so that its minimal vertex comes first."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        vs = tuple(self.vertices)
        if not vs:
            raise ValueError("a cycle needs at least one vertex")
        if len(set(vs)) != len(vs):
            raise ValueError(f"vertices repeat in {vs}")
        i = vs.index(min(vs))
        object.__setattr__(self, "vertices", vs[i:] + vs[:i])

    def __len__(self) -> int:
        return len(self.vertices)

    def successor(self, v: int) -> int:
        i = self.vertices.index(v)
        return self.vertices[(i + 1) % len(self.vertices)]

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def is_cycle_of(self, g: StateGraph) -> bool:
        return all(g.has_edge(u, v) for u, v in self.edges())


@dataclass(frozen=True)
class CycleCount:
    count: int
    cycles: tuple[Cycle, ...] | None
    steps: int
    overflow: bool = False
    cap: int = DEFAULT_CAP

    def __str__(self) -> str:
        return f"> {self.cap}" if self.overflow else str(self.count)


def _csr(g: StateGraph):
    offsets = [0]
    targets: list[int] = []
    for s in g.succ:
        targets.extend(s)
        offsets.append(len(targets))
    preds: list[list[int]] = [[] for _ in range(g.num_vertices)]
    for u, s in enumerate(g.succ):
        for v in s:
            preds[v].append(u)
    poffsets = [0]
    ptargets: list[int] = []
    for p in preds:
        ptargets.extend(p)
        poffsets.append(len(ptargets))
    return offsets, targets, poffsets, ptargets


def _as_graph(g) -> StateGraph:
    return abstract_graph(g) if isinstance(g, MealyMachine) else g


def _wrap(raw, cap: int) -> CycleCount:
    count, steps, overflow, cycles = raw
    return CycleCount(count, None if cycles is None else tuple(Cycle(c) for c in cycles), steps, overflow, cap)


def count_cycles_tiernan(g, cap: int = DEFAULT_CAP, collect: bool = True, max_steps: int | None = None,
                         pure: bool = False) -> CycleCount:
    """Root-by-root unfolding over the whole residual graph."""
    g = _as_graph(g)
    offsets, targets, _, _ = _csr(g)
    kernel = _kernels_py if pure else _kernels
    return _wrap(kernel.tiernan(g.num_vertices, offsets, targets, cap, max_steps, collect), cap)


def count_cycles_scc(g, cap: int = DEFAULT_CAP, collect: bool = True, max_steps: int | None = None,
                     pure: bool = False) -> CycleCount:
    """Unfolding restricted to the root's SCC of the residual graph."""
    g = _as_graph(g)
    kernel = _kernels_py if pure else _kernels
    return _wrap(kernel.scc_variant(g.num_vertices, *_csr(g), cap, max_steps, collect), cap)


def lemma1_bound(g: StateGraph) -> int:
    return (g.max_outdegree() + 1) ** g.num_vertices


def check_lemma1_bound(g) -> bool:
    """The cycle count never exceeds ``(max outdegree + 1) ** |V|``."""
    g = _as_graph(g)
    res = count_cycles_scc(g, collect=False)
    return not res.overflow and res.count <= lemma1_bound(g)


from .witness import (  # noqa: E402
    CycleCapExceeded,
    WitnessForest,
    WitnessReport,
    WitnessTree,
    extract_witness_from_graph,
    validate_witness_forest,
)

__all__ = [
    "BACKEND",
    "DEFAULT_CAP",
    "Cycle",
    "CycleCapExceeded",
    "CycleCount",
    "WitnessForest",
    "WitnessReport",
    "WitnessTree",
    "check_lemma1_bound",
    "count_cycles_scc",
    "count_cycles_tiernan",
    "extract_witness_from_graph",
    "lemma1_bound",
    "validate_witness_forest",
]
