"""SAT encodings bounding the simple cycles of the synthesized machine.

``encode_scc`` guesses, for every sub-graph ``G_k`` (vertices ``>= k``), an
SCC labelling certified by a forward and a backward spanning tree per
component, with component labels non-decreasing along edges so that every
labelled class is a maximal SCC.

``encode_cs`` guesses one witness tree per root ``r`` (the unfolding of
``G_r`` inside the SCC of ``r``) and counts red edges, the edges closing a
path back at the root, with a strictly increasing list of ``m`` slots.

Tree vertices are ``S = T x {0..C}``: copy 0 of ``t`` is the root of tree
``t`` and copies ``1..C`` (``C = m`` unless overridden) are available as
non-root nodes of any tree.  Copies that are not used are inactive: they
have no blue parent and no outgoing edges.  ``allowed(s, t)`` means that a
node labelled ``t`` may still be unfolded below ``s``; roots allow exactly
the vertices above them and every blue edge removes the child's label.

Only successors that can still return to the root through allowed vertices
must be unfolded; ``reach(s, t)`` over-approximates that set as a closure.
Dead-end branches are therefore never forced, every tree node lies on a
cycle through its root, and ``m`` copies per vertex suffice.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from . import cnf as C
from .cycles import WitnessForest, WitnessTree, count_cycles_scc, validate_witness_forest
from .encode_bs import BsEncoding, EncodingError, SynthesisResult, decode_machine, encode_bs
from .graphs import tarjan_scc
from .machine import StateGraph, abstract_graph


# --------------------------------------------------------------------------
# SCC labelling
# --------------------------------------------------------------------------


@dataclass
class SccEncoding:
    cnf: C.CnfInstance
    n: int
    width: int

    def edge(self, t, t2) -> int:
        return self.cnf.var(C.edge(t, t2))

    def scc(self, k, t) -> list[int]:
        return self.cnf.bits(lambda i: C.scc_bit(k, t, i), self.width)

    def frank(self, k, t) -> list[int]:
        return self.cnf.bits(lambda i: C.frank_bit(k, t, i), self.width)

    def brank(self, k, t) -> list[int]:
        return self.cnf.bits(lambda i: C.brank_bit(k, t, i), self.width)

    def fedge(self, k, t, t2) -> int:
        return self.cnf.var(C.fedge(k, t, t2))

    def bedge(self, k, t, t2) -> int:
        return self.cnf.var(C.bedge_scc(k, t, t2))

    def same_scc(self, k, t, t2):
        if t == t2:
            return True
        return self.cnf.compare(self.scc(k, t), self.scc(k, t2), "=")


def _alloc_edges(cnf: C.CnfInstance, n: int) -> None:
    for t in range(n):
        for t2 in range(n):
            cnf.var(C.edge(t, t2))


def encode_scc(n: int, cnf: C.CnfInstance | None = None) -> SccEncoding:
    cnf = cnf if cnf is not None else C.CnfInstance()
    enc = SccEncoding(cnf, n, C.width_for(n - 1))
    _alloc_edges(cnf, n)
    for k in range(n):
        V = range(k, n)
        for t in V:
            enc.scc(k, t)
        for t in V:
            enc.frank(k, t)
            enc.brank(k, t)
        for t in V:
            for t2 in V:
                if t != t2:
                    enc.fedge(k, t, t2)
                    enc.bedge(k, t, t2)
    for k in range(n):
        V = list(range(k, n))
        is_root = {t: cnf.compare(enc.frank(k, t), 0, "=") for t in V}
        # components are totally ordered and edges respect the order
        for t in V:
            for t2 in V:
                if t != t2:
                    cnf.implies([enc.edge(t, t2)], [cnf.compare(enc.scc(k, t), enc.scc(k, t2), "<=")])
        # every component has a root, and only one
        for t in V:
            cnf.add([cnf.and_([enc.same_scc(k, t, t2), is_root[t2]]) for t2 in V])
        for i, t in enumerate(V):
            for t2 in V[i + 1:]:
                cnf.add([C.neg(enc.same_scc(k, t, t2)), -is_root[t], -is_root[t2]])
        for t in V:
            # both rankings agree on the root
            cnf.add([cnf.iff(is_root[t], cnf.compare(enc.brank(k, t), 0, "="))])
            others = [t2 for t2 in V if t2 != t]
            # roots have no incoming forward edge and no outgoing backward edge
            for t2 in others:
                cnf.implies([is_root[t]], [-enc.fedge(k, t2, t)])
                cnf.implies([is_root[t]], [-enc.bedge(k, t, t2)])
            # non-roots have one forward parent and one backward successor
            if others:
                cnf.exactly_one([enc.fedge(k, t2, t) for t2 in others], guard=[-is_root[t]])
                cnf.exactly_one([enc.bedge(k, t, t2) for t2 in others], guard=[-is_root[t]])
            else:
                cnf.add([is_root[t]])
        for t in V:
            for t2 in V:
                if t == t2:
                    continue
                f, b = enc.fedge(k, t, t2), enc.bedge(k, t, t2)
                cnf.implies([f], [cnf.compare(enc.frank(k, t), enc.frank(k, t2), "<")])
                cnf.implies([b], [cnf.compare(enc.brank(k, t), enc.brank(k, t2), ">")])
                same = enc.same_scc(k, t, t2)
                for x in (f, b):
                    cnf.implies([x], [enc.edge(t, t2)])
                    cnf.implies([x], [same])
    return enc


# --------------------------------------------------------------------------
# Witness forest
# --------------------------------------------------------------------------


@dataclass
class CsEncoding:
    cnf: C.CnfInstance
    scc: SccEncoding
    n: int
    m: int
    copies: int
    tree_width: int
    rbound_width: int

    @property
    def S(self) -> list[tuple[int, int]]:
        return [(t, c) for t in range(self.n) for c in range(self.copies + 1)]

    @property
    def N(self) -> list[tuple[int, int]]:
        return [(t, c) for t in range(self.n) for c in range(1, self.copies + 1)]

    def f(self, s) -> int:
        """Fixed numbering of tree vertices, ``1..n * (copies + 1)``."""
        t, c = s
        return t * (self.copies + 1) + c + 1

    def edge(self, t, t2) -> int:
        return self.cnf.var(C.edge(t, t2))

    def bedge(self, s, s2) -> int:
        return self.cnf.var(C.bedge(s, s2))

    def redge(self, s, r) -> int:
        return self.cnf.var(C.redge(s, (r, 0)))

    def wtree(self, s) -> list[int]:
        return self.cnf.bits(lambda i: C.wtree_bit(s, i), self.tree_width)

    def allowed(self, s, t) -> int:
        return self.cnf.var(C.allowed(s, t))

    def active(self, s):
        return True if s[1] == 0 else self.cnf.var(C.active(s))

    def rbound(self, c) -> list[int]:
        return self.cnf.bits(lambda i: C.rbound_bit(c, i), self.rbound_width)

    def reach(self, s, t) -> int:
        return self.cnf.var(C.reach(s, t))

    def blue_targets(self, s) -> list[tuple[int, int]]:
        return [s2 for s2 in self.N if s2[0] != s[0]]

    def red_roots(self, s) -> list[int]:
        t, c = s
        return [t] if c == 0 else list(range(t))


def expected_variable_counts(n: int, m: int, copies: int | None = None) -> dict[str, int]:
    """Closed form for every named family allocated by ``encode_cs`` plus ``encode_scc``.

    With ``C`` copies, ``w = width(n - 1)`` and ``|S| = n (C + 1)``:
    edges ``n^2``; blue edges ``|S| (n - 1) C``; red edges ``n + C n (n - 1) / 2``;
    tree labels ``|S| w``; allowed and reach flags ``|S| n`` each; active flags ``n C``;
    red-edge slots ``m * width(|S|)``; and per sub-graph ``k`` with ``j = n - k``
    vertices: ``j w`` SCC bits, ``2 j w`` rank bits and ``2 j (j - 1)`` spanning edges.
    """
    c = m if copies is None else copies
    w = C.width_for(n - 1)
    size_s = n * (c + 1)
    tri = sum(j for j in range(1, n + 1))
    return {
        "edge": n * n,
        "bedge": size_s * (n - 1) * c,
        "redge": n + c * n * (n - 1) // 2,
        "wtree": size_s * w,
        "allowed": size_s * n,
        "reach": size_s * n,
        "active": n * c,
        "rbound": m * C.width_for(size_s),
        "scc": tri * w,
        "frank": tri * w,
        "brank": tri * w,
        "fedge": sum(j * (j - 1) for j in range(1, n + 1)),
        "bedge_k": sum(j * (j - 1) for j in range(1, n + 1)),
    }


def encode_cs(enc_bs: BsEncoding, m: int, scc: SccEncoding, copies: int | None = None) -> CsEncoding:
    return _encode_cs(enc_bs.cnf, enc_bs.n, m, scc, enc_bs, copies)


def encode_graph_bound(g: StateGraph, m: int, copies: int | None = None) -> CsEncoding:
    """The cycle bound alone, over a fixed graph instead of a guessed machine."""
    cnf = C.CnfInstance()
    scc = encode_scc(g.num_vertices, cnf)
    for t in range(g.num_vertices):
        for t2 in range(g.num_vertices):
            cnf.add([scc.edge(t, t2) if g.has_edge(t, t2) else -scc.edge(t, t2)])
    return _encode_cs(cnf, g.num_vertices, m, scc, None, copies)


def _encode_cs(cnf: C.CnfInstance, n: int, m: int, scc: SccEncoding, enc_bs: BsEncoding | None,
               copies: int | None) -> CsEncoding:
    if m < 0:
        raise ValueError("the cycle bound must be non-negative")
    copies = m if copies is None else copies
    cs = CsEncoding(cnf, scc, n, m, copies, C.width_for(n - 1), C.width_for(n * (copies + 1)))
    cnf.meta.update(m=m, copies=copies)
    S, N = cs.S, cs.N
    for s in S:
        for s2 in cs.blue_targets(s):
            cs.bedge(s, s2)
    for s in S:
        for r in cs.red_roots(s):
            cs.redge(s, r)
    for s in S:
        cs.wtree(s)
    for s in S:
        for t in range(n):
            cs.allowed(s, t)
    for s in S:
        for t in range(n):
            cs.reach(s, t)
    for s in N:
        cs.active(s)
    for c in range(m):
        cs.rbound(c)

    # the abstract graph of the machine
    for t in range(n if enc_bs is not None else 0):
        for t2 in range(n):
            e = cs.edge(t, t2)
            ts = [enc_bs.trans(t, nu, t2) for nu in range(enc_bs.num_letters)]
            for x in ts:
                cnf.implies([x], [e])
            cnf.implies([e], ts)

    # roots name their tree
    for r in range(n):
        cnf.assert_compare(cs.wtree((r, 0)), r, "=")

    parents: dict = {s2: [] for s2 in N}
    for s in S:
        for s2 in cs.blue_targets(s):
            parents[s2].append(s)

    for s in S:
        t = s[0]
        act = cs.active(s)
        # red edges: only into the own root, along graph edges, from active nodes
        for r in cs.red_roots(s):
            x = cs.redge(s, r)
            cnf.assert_compare(cs.wtree(s), r, "=", guard=[x])
            cnf.implies([x], [cs.edge(t, r)])
            cnf.implies([x], [act])
        # blue edges: inside one tree, along graph edges, to allowed labels, from active nodes
        for s2 in cs.blue_targets(s):
            t2 = s2[0]
            x = cs.bedge(s, s2)
            cnf.implies([x], [cnf.compare(cs.wtree(s), cs.wtree(s2), "=")])
            cnf.implies([x], [cs.edge(t, t2)])
            cnf.implies([x], [cs.allowed(s, t2)])
            cnf.implies([x], [act])
            # the child may no longer use its own label, everything else is inherited
            cnf.implies([x], [-cs.allowed(s2, t2)])
            for t3 in range(n):
                if t3 != t2:
                    cnf.implies([x], [cnf.iff(cs.allowed(s2, t3), cs.allowed(s, t3))])

    # every used non-root has exactly one blue parent
    for s2 in N:
        ins = [cs.bedge(s, s2) for s in parents[s2]]
        cnf.at_most_one(ins)
        act = cs.active(s2)
        cnf.implies([act], ins)
        for x in ins:
            cnf.implies([x], [act])

    # reach(s, t): t returns to the root of s through allowed vertices
    for s in S:
        t, c = s
        roots = [t] if c == 0 else range(t)
        for t2 in range(n):
            for r in roots:
                if t2 > r:
                    in_tree = cnf.compare(cs.wtree(s), r, "=") if c else True
                    cnf.implies([in_tree, cs.allowed(s, t2), cs.edge(t2, r)], [cs.reach(s, t2)])
            for t3 in range(n):
                if t3 != t2:
                    cnf.implies([cs.allowed(s, t2), cs.edge(t2, t3), cs.reach(s, t3)], [cs.reach(s, t2)])

    # completeness: every edge back to the root is red, every returning successor is unfolded
    for s in S:
        t, c = s
        act = cs.active(s)
        roots = [t] if c == 0 else range(t)
        for r in roots:
            in_tree = cnf.compare(cs.wtree(s), r, "=") if c else True
            same_r = scc.same_scc(r, t, r)
            cnf.implies([act, cs.edge(t, r), same_r, in_tree], [cs.redge(s, r)])
            for t2 in range(r + 1, n):
                if t2 == t:
                    continue
                same = scc.same_scc(r, t, t2)
                cnf.implies([act, cs.edge(t, t2), same, in_tree, cs.allowed(s, t2), cs.reach(s, t2)],
                            [cs.bedge(s, (t2, c2)) for c2 in range(1, copies + 1)])

    # roots may unfold exactly the vertices above them
    for r in range(n):
        for t in range(n):
            cnf.add([cs.allowed((r, 0), t) if t > r else -cs.allowed((r, 0), t)])

    # every red edge is registered in a strictly increasing list of m slots
    for s in S:
        for r in cs.red_roots(s):
            cnf.implies([cs.redge(s, r)], [cnf.compare(cs.rbound(c), cs.f(s), "=") for c in range(m)])
    for c in range(m - 1):
        cnf.assert_compare(cs.rbound(c), cs.rbound(c + 1), "<")
    return cs


@dataclass
class BocyEncoding:
    bs: BsEncoding
    scc: SccEncoding
    cs: CsEncoding

    @property
    def cnf(self) -> C.CnfInstance:
        return self.bs.cnf


def encode_bocy(a, n: int, m: int, copies: int | None = None) -> BocyEncoding:
    """Machines with ``n`` states and at most ``m`` simple cycles accepted by ``a``."""
    bs = encode_bs(a, n)
    scc = encode_scc(n, bs.cnf)
    cs = encode_cs(bs, m, scc, copies)
    return BocyEncoding(bs, scc, cs)


# --------------------------------------------------------------------------
# Decoding
# --------------------------------------------------------------------------


def decode_scc_labels(enc: SccEncoding, model: C.Model) -> list[dict[int, int]]:
    return [{t: model.number(enc.scc(k, t)) for t in range(k, enc.n)} for k in range(enc.n)]


def tarjan_partition(g: StateGraph, k: int) -> set[frozenset]:
    V = list(range(k, g.num_vertices))
    return {frozenset(c) for c in tarjan_scc(V, lambda v: [w for w in g.succ[v] if w >= k])}


def decode_witness(cs: CsEncoding, model: C.Model) -> WitnessForest:
    trees = []
    for r in range(cs.n):
        labels = [r]
        index = {(r, 0): 0}
        blue, red = set(), set()
        queue = [(r, 0)]
        while queue:
            s = queue.pop(0)
            for s2 in cs.blue_targets(s):
                if model.lit(cs.bedge(s, s2)):
                    if s2 in index:
                        raise EncodingError(f"{s2} has two blue parents")
                    index[s2] = len(labels)
                    labels.append(s2[0])
                    blue.add((index[s], index[s2]))
                    queue.append(s2)
            if r in cs.red_roots(s) and model.lit(cs.redge(s, r)):
                red.add((index[s], 0))
        trees.append(WitnessTree(r, tuple(labels), frozenset(blue), frozenset(red)))
    return WitnessForest(tuple(trees))


@dataclass
class BocyResult(SynthesisResult):
    forest: WitnessForest | None = None
    cycles: int = 0
    rbound: tuple = ()


def decode_bocy(enc: BocyEncoding, model: C.Model) -> BocyResult:
    base = decode_machine(enc.bs, model)
    g = abstract_graph(base.machine)
    cs = enc.cs
    for t in range(cs.n):
        for t2 in range(cs.n):
            if model.lit(cs.edge(t, t2)) != g.has_edge(t, t2):
                raise EncodingError(f"edge({t}, {t2}) disagrees with the decoded machine")
    labels = decode_scc_labels(enc.scc, model)
    for k in range(cs.n):
        parts = {}
        for t, lab in labels[k].items():
            parts.setdefault(lab, set()).add(t)
        if {frozenset(p) for p in parts.values()} != tarjan_partition(g, k):
            raise EncodingError(f"SCC labelling of sub-graph {k} disagrees with Tarjan")
    forest = decode_witness(cs, model)
    rep = validate_witness_forest(forest, g)
    if not rep.ok:
        raise EncodingError(f"decoded witness forest is invalid:\n{rep}")
    slots = tuple(model.number(cs.rbound(c)) for c in range(cs.m))
    if any(x >= y for x, y in zip(slots, slots[1:])):
        raise EncodingError(f"red-edge slots {slots} are not strictly increasing")
    if forest.total_red > cs.m:
        raise EncodingError(f"{forest.total_red} red edges exceed the bound {cs.m}")
    for s in cs.S:
        for r in cs.red_roots(s):
            if model.lit(cs.redge(s, r)) and cs.f(s) not in slots:
                raise EncodingError(f"red edge from {s} is not registered")
    count = count_cycles_scc(g, collect=False).count
    return BocyResult(base.machine, base.annotations, base.stats, forest, count, slots)


def synthesize_bocy(a, n: int, m: int, backends=None, timeout=None, copies=None):
    from .solvers import solve

    enc = encode_bocy(a, n, m, copies)
    start = time.perf_counter()
    res = solve(enc.cnf, backends, timeout)
    secs = time.perf_counter() - start
    if not res.sat:
        return res.status, None, secs
    out = decode_bocy(enc, res.model)
    out.stats.update(seconds=secs, backend=res.backend, vars=enc.cnf.num_vars, clauses=enc.cnf.num_clauses)
    return res.status, out, secs
