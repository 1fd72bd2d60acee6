# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cycle-counting kernels; same contract as ``_kernels_py``."""
from libc.stdlib cimport malloc, free
from libc.string cimport memset


cdef inline object _path_tuple(int* path, int depth):
    return tuple([path[j] for j in range(depth)])


cdef int _unfold(int root, int* offsets, int* targets, char* member, char* on_path,
                 int* path, int* iters, long long cap, long long max_steps, bint collect,
                 list cycles, long long* count, long long* steps) except -1:
    """Returns 1 on overflow, 0 otherwise."""
    cdef int depth = 1
    cdef int v, w, i, end
    cdef bint pushed
    path[0] = root
    iters[0] = offsets[root]
    on_path[root] = 1
    while depth > 0:
        v = path[depth - 1]
        i = iters[depth - 1]
        end = offsets[v + 1]
        pushed = False
        while i < end:
            w = targets[i]
            i += 1
            if w == root:
                count[0] += 1
                if collect:
                    cycles.append(_path_tuple(path, depth))
                if count[0] > cap:
                    on_path[root] = 0
                    for i in range(depth):
                        on_path[path[i]] = 0
                    return 1
            elif member[w] and not on_path[w]:
                iters[depth - 1] = i
                path[depth] = w
                iters[depth] = offsets[w]
                on_path[w] = 1
                depth += 1
                steps[0] += 1
                if max_steps >= 0 and steps[0] > max_steps:
                    for i in range(depth):
                        on_path[path[i]] = 0
                    return 1
                pushed = True
                break
        if not pushed:
            depth -= 1
            on_path[path[depth]] = 0
    return 0


cdef int* _copy(seq, int extra=0) except NULL:
    cdef int k = len(seq)
    cdef int* out = <int*> malloc((k + extra + 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    for j in range(k):
        out[j] = seq[j]
    return out


def tiernan(int n, offsets, targets, long long cap, max_steps=None, bint collect=True):
    cdef long long count = 0, steps = 0
    cdef long long ms = -1 if max_steps is None else max_steps
    cdef list cycles = [] if collect else None
    cdef int* off = _copy(offsets)
    cdef int* tg = _copy(targets)
    cdef char* member = <char*> malloc(n + 1)
    cdef char* on_path = <char*> malloc(n + 1)
    cdef int* path = <int*> malloc((n + 1) * sizeof(int))
    cdef int* iters = <int*> malloc((n + 1) * sizeof(int))
    cdef int root, over = 0
    try:
        memset(member, 1, n + 1)
        memset(on_path, 0, n + 1)
        for root in range(n):
            member[root] = 0
            over = _unfold(root, off, tg, member, on_path, path, iters, cap, ms, collect, cycles, &count, &steps)
            if over:
                break
    finally:
        free(off); free(tg); free(member); free(on_path); free(path); free(iters)
    return count, steps, bool(over), cycles


def scc_variant(int n, offsets, targets, poffsets, ptargets, long long cap, max_steps=None, bint collect=True):
    cdef long long count = 0, steps = 0
    cdef long long ms = -1 if max_steps is None else max_steps
    cdef list cycles = [] if collect else None
    cdef int* off = _copy(offsets)
    cdef int* tg = _copy(targets)
    cdef int* poff = _copy(poffsets)
    cdef int* ptg = _copy(ptargets)
    cdef char* fwd = <char*> malloc(n + 1)
    cdef char* comp = <char*> malloc(n + 1)
    cdef char* on_path = <char*> malloc(n + 1)
    cdef int* stack = <int*> malloc((n + 1) * sizeof(int))
    cdef int* path = <int*> malloc((n + 1) * sizeof(int))
    cdef int* iters = <int*> malloc((n + 1) * sizeof(int))
    cdef int root, v, w, i, sp, size, over = 0
    try:
        memset(on_path, 0, n + 1)
        for root in range(n):
            memset(fwd, 0, n + 1)
            memset(comp, 0, n + 1)
            fwd[root] = 1
            sp = 0
            stack[sp] = root
            sp += 1
            while sp > 0:
                sp -= 1
                v = stack[sp]
                for i in range(off[v], off[v + 1]):
                    w = tg[i]
                    if w > root and not fwd[w]:
                        fwd[w] = 1
                        stack[sp] = w
                        sp += 1
            comp[root] = 1
            size = 1
            stack[0] = root
            sp = 1
            while sp > 0:
                sp -= 1
                v = stack[sp]
                for i in range(poff[v], poff[v + 1]):
                    w = ptg[i]
                    if fwd[w] and not comp[w]:
                        comp[w] = 1
                        size += 1
                        stack[sp] = w
                        sp += 1
            if size == 1:
                for i in range(off[root], off[root + 1]):
                    if tg[i] == root:
                        count += 1
                        if collect:
                            cycles.append((root,))
                        if count > cap:
                            over = 1
                if over:
                    break
                continue
            comp[root] = 0
            over = _unfold(root, off, tg, comp, on_path, path, iters, cap, ms, collect, cycles, &count, &steps)
            if over:
                break
    finally:
        free(off); free(tg); free(poff); free(ptg); free(fwd); free(comp)
        free(on_path); free(stack); free(path); free(iters)
    return count, steps, bool(over), cycles
