"""Witness forests: per-root unfoldings whose red edges certify cycle counts.

A tree for root ``r`` unfolds the graph from ``r`` along simple paths.  Blue
edges extend a path, red edges close it back at the root.  Completeness is
judged relative to the path: every edge back to ``r`` must be red, and every
successor ``v > r`` that is not yet on the path and can still return to
``r`` through vertices ``> r`` off the path must be unfolded.  Read over all
successors, completeness would contradict the no-repetition condition;
without the return requirement, dead-end branches would make trees larger
than ``m * |V|`` (see ``extract_witness_from_graph(prune=False)``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .. import graphs
from ..machine import StateGraph


class CycleCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class WitnessTree:
    """Node 0 is the root; ``labels[i]`` is the graph vertex of node ``i``."""

    root: int
    labels: tuple[int, ...]
    blue: frozenset = frozenset()
    red: frozenset = frozenset()

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def num_red(self) -> int:
        return len(self.red)

    def children(self, i: int) -> list[int]:
        return sorted(j for a, j in self.blue if a == i)


@dataclass(frozen=True)
class WitnessForest:
    trees: tuple[WitnessTree, ...]

    @property
    def total_red(self) -> int:
        return sum(t.num_red for t in self.trees)

    def red_per_root(self) -> tuple[int, ...]:
        return tuple(t.num_red for t in self.trees)


@dataclass
class WitnessReport:
    violations: list[tuple[int | str, int, str]] = field(default_factory=list)
    total_red: int = 0
    cycle_count: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def conditions(self) -> set:
        return {c for c, _, _ in self.violations}

    def add(self, cond, root: int, detail: str) -> None:
        self.violations.append((cond, root, detail))

    def __str__(self) -> str:
        if self.ok:
            return f"valid witness forest, {self.total_red} red edges"
        return "\n".join(f"condition {c} (root {r}): {d}" for c, r, d in self.violations)


def root_scope(g: StateGraph, r: int) -> set[int]:
    """The SCC of ``r`` in the sub-graph of vertices ``>= r``."""
    def succ(v):
        return [w for w in g.succ[v] if w >= r]

    for comp in graphs.tarjan_scc(graphs.reachable(r, succ), succ):
        if r in comp:
            return set(comp)
    return {r}


def returning_successors(g: StateGraph, r: int, path) -> set[int]:
    """Vertices ``> r`` off ``path`` that reach ``r`` through vertices ``> r`` off ``path``."""
    free = {v for v in range(r + 1, g.num_vertices)} - set(path)
    back: dict[int, list[int]] = {}
    for u in free:
        for w in g.succ[u]:
            back.setdefault(w, []).append(u)
    seen: set[int] = set()
    stack = [r]
    while stack:
        w = stack.pop()
        for u in back.get(w, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def validate_witness_forest(f: WitnessForest, g: StateGraph, check_count: bool = True) -> WitnessReport:
    rep = WitnessReport(total_red=f.total_red)
    roots = [t.root for t in f.trees]
    if roots != list(range(g.num_vertices)):
        rep.add("forest", -1, f"expected one tree per vertex in order, got roots {roots}")
        return rep
    edges = set(g.edges)
    for t in f.trees:
        r = t.root
        n_w = len(t.labels)
        if n_w == 0:
            rep.add(9, r, "tree has no nodes")
            continue
        # 9
        if t.labels[0] != r:
            rep.add(9, r, f"root node labelled {t.labels[0]}")
        in_range = all(0 <= a < n_w and 0 <= b < n_w for a, b in t.blue | t.red)
        if not in_range:
            rep.add("structure", r, "edge endpoint outside the node set")
            continue
        # 1
        for e in sorted(t.blue & t.red):
            rep.add(1, r, f"edge {e} is both blue and red")
        # 2
        for a, b in sorted(t.red):
            if b != 0:
                rep.add(2, r, f"red edge {(a, b)} does not end at the root")
        # 3
        for a, b in sorted(t.blue):
            if b == 0:
                rep.add(3, r, f"blue edge {(a, b)} enters the root")
        parents: dict[int, list[int]] = {}
        for a, b in t.blue:
            parents.setdefault(b, []).append(a)
        # 4, 5
        for i in range(1, n_w):
            ps = parents.get(i, [])
            if not ps:
                rep.add(4, r, f"node {i} has no blue incoming edge")
            elif len(ps) > 1:
                rep.add(5, r, f"node {i} has blue parents {sorted(ps)}")
        # 6
        for a, b in sorted(t.blue | t.red):
            if (t.labels[a], t.labels[b]) not in edges:
                rep.add(6, r, f"edge {(a, b)} labelled {(t.labels[a], t.labels[b])} is not a graph edge")
        # 8: walk every node back to the root
        paths: dict[int, list[int] | None] = {0: [r]}
        for i in range(1, n_w):
            chain, cur, seen = [], i, set()
            while cur != 0 and cur not in seen and parents.get(cur):
                seen.add(cur)
                chain.append(t.labels[cur])
                cur = min(parents[cur])
            if cur != 0:
                paths[i] = None
                continue
            labels = [r] + chain[::-1]
            paths[i] = labels
            if len(set(labels)) != len(labels):
                rep.add(8, r, f"node {i} repeats a label on its root path {labels}")
        # 7
        blue_children: dict[int, set[int]] = {}
        for a, b in t.blue:
            blue_children.setdefault(a, set()).add(t.labels[b])
        red_sources = {a for a, _ in t.red}
        for i in range(n_w):
            path = paths.get(i)
            if path is None:
                continue
            returning = returning_successors(g, r, path)
            for v in g.succ[t.labels[i]]:
                if v == r:
                    if i not in red_sources:
                        rep.add(7, r, f"node {i} misses the red edge back to {r}")
                elif v in returning and v not in blue_children.get(i, ()):
                    rep.add(7, r, f"node {i} does not unfold successor {v}")
    if rep.ok and check_count:
        from . import count_cycles_scc

        res = count_cycles_scc(g)
        rep.cycle_count = res.count
        if res.overflow or res.count > f.total_red:
            rep.add("count", -1, f"graph has {res} cycles but only {f.total_red} red edges")
        else:
            per_root = [0] * g.num_vertices
            for c in res.cycles:
                per_root[c.vertices[0]] += 1
            for t in f.trees:
                if per_root[t.root] > t.num_red:
                    rep.add("count", t.root, f"{per_root[t.root]} cycles through the root, {t.num_red} red edges")
    return rep


def extract_witness_from_graph(g: StateGraph, cap: int = 10_000_000, prune: bool = True) -> WitnessForest:
    """Unfold every root in ascending order; red edges are exactly the edges back to the root.

    With ``prune`` only successors that can still return to the root are
    unfolded, so every node lies on a cycle.  Without it the unfolding is the
    plain search tree restricted to the root's SCC, dead ends included.
    """
    trees = []
    total = 0
    for r in range(g.num_vertices):
        scope = root_scope(g, r)
        labels = [r]
        blue, red = set(), set()
        stack = [(0, (r,))]
        while stack:
            node, path = stack.pop()
            v = labels[node]
            wanted = returning_successors(g, r, path) if prune else None
            for w in g.succ[v]:
                if w == r:
                    red.add((node, 0))
                elif w > r and w in scope and w not in path and (wanted is None or w in wanted):
                    labels.append(w)
                    child = len(labels) - 1
                    blue.add((node, child))
                    stack.append((child, path + (w,)))
                    total += 1
                    if total > cap:
                        raise CycleCapExceeded(f"witness forest exceeds {cap} nodes")
        trees.append(WitnessTree(r, tuple(labels), frozenset(blue), frozenset(red)))
    return WitnessForest(tuple(trees))
