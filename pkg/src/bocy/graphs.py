"""Small directed-graph helpers shared by the automata and cycle modules."""
from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable, Sequence


def tarjan_scc(vertices: Iterable[Hashable], succ: Callable[[Hashable], Iterable[Hashable]]) -> list[list]:
    """Strongly connected components, iteratively, in reverse topological order.

    Vertices are visited in the order given and successors in the order
    ``succ`` yields them, so the output is deterministic.
    """
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps: list[list] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def reachable(start: Hashable, succ: Callable[[Hashable], Iterable[Hashable]]) -> list:
    """Vertices reachable from ``start`` in BFS order."""
    seen = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in succ(v):
            if w not in seen:
                seen[w] = None
                queue.append(w)
    return list(seen)


def shortest_path(start: Hashable, goal: Callable[[Hashable], bool], succ, allowed=None) -> list | None:
    """BFS path ``[start, ..., v]`` to the first ``v`` (after at least one step) with ``goal(v)``."""
    parent: dict = {}
    queue = deque()
    for w in succ(start):
        if allowed is not None and w not in allowed:
            continue
        if w not in parent:
            parent[w] = start
            queue.append(w)
    while queue:
        v = queue.popleft()
        if goal(v):
            path = [v]
            while True:
                p = parent[path[-1]]
                path.append(p)
                if p == start:
                    return path[::-1]
        for w in succ(v):
            if allowed is not None and w not in allowed:
                continue
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def find_bad_cycle(
    start: Hashable, succ: Callable[[Hashable], Sequence[Hashable]], bad: Callable[[Hashable], bool]
) -> tuple[list, list] | None:
    """Look for a reachable cycle through a ``bad`` vertex.

    Returns ``(stem, loop)`` where ``stem`` runs from ``start`` to the bad
    vertex ``v`` (inclusive) and ``loop`` is a path from ``v`` back to ``v``
    (both endpoints included), or ``None`` if every bad vertex is visited at
    most once on every path.
    """
    verts = reachable(start, succ)
    for comp in tarjan_scc(verts, succ):
        members = set(comp)
        for v in sorted(comp, key=verts.index):
            if not bad(v):
                continue
            if len(comp) == 1 and v not in succ(v):
                continue
            loop = shortest_path(v, lambda x: x == v, succ, allowed=members)
            if start == v:
                stem = [v]
            else:
                stem = shortest_path(start, lambda x: x == v, succ)
            return stem, loop
    return None
