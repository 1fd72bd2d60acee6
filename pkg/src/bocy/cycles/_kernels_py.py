"""Pure-Python cycle-counting kernels (fallback for the compiled module).

Graphs arrive in CSR form: the successors of ``v`` are
``targets[offsets[v]:offsets[v + 1]]``.  Every kernel returns
``(count, steps, overflow, cycles)`` where ``cycles`` is a list of vertex
tuples starting at their minimal vertex, or ``None`` when not collected.
A ``step`` is one vertex pushed onto the unfolding path.
"""
from __future__ import annotations


def _unfold(root, offsets, targets, member, cap, max_steps, collect, cycles, count, steps):
    """Depth-first unfolding from ``root`` over vertices with ``member[v]`` set."""
    path = [root]
    on_path = {root}
    iters = [offsets[root]]
    while path:
        v = path[-1]
        i = iters[-1]
        end = offsets[v + 1]
        pushed = False
        while i < end:
            w = targets[i]
            i += 1
            if w == root:
                count += 1
                if collect:
                    cycles.append(tuple(path))
                if count > cap:
                    return count, steps, True
            elif member[w] and w not in on_path:
                iters[-1] = i
                path.append(w)
                on_path.add(w)
                iters.append(offsets[w])
                steps += 1
                if max_steps is not None and steps > max_steps:
                    return count, steps, True
                pushed = True
                break
        if not pushed:
            on_path.discard(path.pop())
            iters.pop()
    return count, steps, False


def tiernan(n, offsets, targets, cap, max_steps=None, collect=True):
    count = steps = 0
    cycles = [] if collect else None
    member = [False] * n
    for v in range(n):
        member[v] = True
    for root in range(n):
        member[root] = False
        # vertices below the root have been removed; the root closes cycles
        count, steps, over = _unfold(root, offsets, targets, member, cap, max_steps, collect, cycles, count, steps)
        if over:
            return count, steps, True, cycles
    return count, steps, False, cycles


def _root_component(root, n, offsets, targets, poffsets, ptargets):
    """Vertices ``>= root`` that reach and are reached from ``root`` inside the residual graph."""
    fwd = [False] * n
    fwd[root] = True
    stack = [root]
    while stack:
        v = stack.pop()
        for i in range(offsets[v], offsets[v + 1]):
            w = targets[i]
            if w > root and not fwd[w]:
                fwd[w] = True
                stack.append(w)
    comp = [False] * n
    comp[root] = True
    stack = [root]
    size = 1
    while stack:
        v = stack.pop()
        for i in range(poffsets[v], poffsets[v + 1]):
            w = ptargets[i]
            if fwd[w] and not comp[w]:
                comp[w] = True
                size += 1
                stack.append(w)
    return comp, size


def scc_variant(n, offsets, targets, poffsets, ptargets, cap, max_steps=None, collect=True):
    count = steps = 0
    cycles = [] if collect else None
    for root in range(n):
        comp, size = _root_component(root, n, offsets, targets, poffsets, ptargets)
        if size == 1:
            # a trivial component only carries the self-loop, if any
            for i in range(offsets[root], offsets[root + 1]):
                if targets[i] == root:
                    count += 1
                    if collect:
                        cycles.append((root,))
                    if count > cap:
                        return count, steps, True, cycles
            continue
        comp[root] = False
        count, steps, over = _unfold(root, offsets, targets, comp, cap, max_steps, collect, cycles, count, steps)
        if over:
            return count, steps, True, cycles
    return count, steps, False, cycles
