"""SAT encoding of bounded synthesis: Mealy machines of size n accepted by a UCA.

Variables: ``trans(t, nu, t')`` picks the successor, ``label(t, nu, x)`` the
outputs, ``rgstate(t, q)`` marks reachable run-graph vertices and
``ann(t, q, i)`` holds a binary annotation.  The initial vertex gets
annotation 1; every run-graph edge keeps the annotation from dropping and
raises it strictly when it enters a rejecting vertex.  A rejecting vertex on
a cycle would need to exceed itself, so models are exactly accepted
machines.  Along a simple path annotations start at 1 and rise at most once
per rejecting vertex, hence the bound ``n * k + 1`` with ``k`` rejecting
states.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import cnf as C
from .automata import UniversalCoBuchiAutomaton, build_run_graph, run_graph_accepting
from .machine import MealyMachine


class EncodingError(RuntimeError):
    """A decoded model does not pass independent verification: an encoder bug."""


@dataclass
class BsEncoding:
    cnf: C.CnfInstance
    uca: UniversalCoBuchiAutomaton
    n: int
    width: int
    bound: int
    num_letters: int = field(init=False)

    def __post_init__(self):
        self.num_letters = 1 << len(self.uca.inputs)

    def trans(self, t, nu, t2) -> int:
        return self.cnf.var(C.trans(t, nu, t2))

    def label(self, t, nu, x) -> int:
        return self.cnf.var(C.label(t, nu, x))

    def rgstate(self, t, q) -> int:
        return self.cnf.var(C.rgstate(t, q))

    def ann(self, t, q) -> list[int]:
        return self.cnf.bits(lambda i: C.annotation_bit(t, q, i), self.width)


def guard_inputs(guard, inputs) -> list[int]:
    """Input indices consistent with the input literals of ``guard``."""
    out = []
    for nu in range(1 << len(inputs)):
        present = {x for i, x in enumerate(inputs) if nu >> i & 1}
        if guard.pos & set(inputs) <= present and not (guard.neg & present):
            out.append(nu)
    return out


def encode_bs(a: UniversalCoBuchiAutomaton, n: int, cnf: C.CnfInstance | None = None) -> BsEncoding:
    if n < 1:
        raise ValueError("the state bound must be at least 1")
    cnf = cnf if cnf is not None else C.CnfInstance()
    k = len(a.rejecting)
    bound = n * k + 1
    width = C.width_for(bound)
    enc = BsEncoding(cnf, a, n, width, bound)
    cnf.meta.update(n=n, k=k, uca_states=a.num_states, inputs=len(a.inputs), outputs=len(a.outputs))
    T, L, Q = range(n), range(enc.num_letters), range(a.num_states)

    # fixed allocation order keeps the DIMACS stable
    for t in T:
        for nu in L:
            for t2 in T:
                enc.trans(t, nu, t2)
    for t in T:
        for nu in L:
            for x in a.outputs:
                enc.label(t, nu, x)
    for t in T:
        for q in Q:
            enc.rgstate(t, q)
    for t in T:
        for q in Q:
            enc.ann(t, q)

    # the target of every transition is unambiguous
    for t in T:
        for nu in L:
            cnf.exactly_one([enc.trans(t, nu, t2) for t2 in T])

    # the initial vertex is reachable with annotation 1; all annotations are bounded
    cnf.add([enc.rgstate(0, a.initial)])
    cnf.assert_compare(enc.ann(0, a.initial), 1, "=")
    if bound < (1 << width) - 1:
        for t in T:
            for q in Q:
                cnf.assert_compare(enc.ann(t, q), bound, "<=", guard=[enc.rgstate(t, q)])

    # successors of reachable vertices are reachable with a larger annotation
    inputs = a.inputs
    outs = set(a.outputs)
    for t in T:
        for q in Q:
            rg = enc.rgstate(t, q)
            for guard, q2 in a.successors(q):
                rel = "<" if q2 in a.rejecting else "<="
                for nu in guard_inputs(guard, inputs):
                    out_lits = [enc.label(t, nu, x) for x in sorted(guard.pos & outs)]
                    out_lits += [-enc.label(t, nu, x) for x in sorted(guard.neg & outs)]
                    for t2 in T:
                        premise = [rg, enc.trans(t, nu, t2)] + out_lits
                        cnf.implies(premise, [enc.rgstate(t2, q2)])
                        cnf.implies(premise, [cnf.compare(enc.ann(t, q), enc.ann(t2, q2), rel)])
    return enc


@dataclass
class SynthesisResult:
    machine: MealyMachine
    annotations: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)


def decode_machine(enc: BsEncoding, model: C.Model, verify: bool = True) -> SynthesisResult:
    a = enc.uca
    n, L = enc.n, enc.num_letters
    delta, lam = [], []
    for t in range(n):
        drow, lrow = [], []
        for nu in range(L):
            succ = [t2 for t2 in range(n) if model.lit(enc.trans(t, nu, t2))]
            if len(succ) != 1:
                raise EncodingError(f"({t}, {nu}) has successors {succ}")
            drow.append(succ[0])
            lrow.append(frozenset(x for x in a.outputs if model.lit(enc.label(t, nu, x))))
        delta.append(tuple(drow))
        lam.append(tuple(lrow))
    m = MealyMachine(tuple(a.inputs), tuple(a.outputs), n, tuple(delta), tuple(lam), 0)
    anns = {(t, q): model.number(enc.ann(t, q))
            for t in range(n) for q in range(a.num_states) if model.lit(enc.rgstate(t, q))}
    if verify:
        g = build_run_graph(m, a)
        verdict = run_graph_accepting(g)
        if not verdict.accepting:
            raise EncodingError(f"decoded machine violates the automaton on {verdict.word}")
        for v in g.vertices:
            if v not in anns:
                raise EncodingError(f"run-graph vertex {v} is not marked reachable")
    return SynthesisResult(m, anns, {"vars": enc.cnf.num_vars, "clauses": enc.cnf.num_clauses})


def synthesize_bs(a: UniversalCoBuchiAutomaton, n: int, backends=None, timeout=None):
    """Encode, solve and decode; returns ``(status, SynthesisResult | None, seconds)``."""
    from .solvers import solve

    enc = encode_bs(a, n)
    start = time.perf_counter()
    res = solve(enc.cnf, backends, timeout)
    secs = time.perf_counter() - start
    if not res.sat:
        return res.status, None, secs
    out = decode_machine(enc, res.model)
    out.stats.update(seconds=secs, backend=res.backend)
    return res.status, out, secs
