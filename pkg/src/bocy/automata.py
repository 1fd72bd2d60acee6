"""Universal co-Buchi automata, LTL translation and run-graph model checking.

The translation builds a Buchi automaton for the negated specification with
an on-the-fly tableau (transition-based generalised acceptance, one set per
until sub-formula), degeneralises it with the usual counter, and then reads
the result universally: accepting states become rejecting states.  A word
satisfies the specification iff no run of the negation automaton visits an
accepting state infinitely often, which is exactly universal co-Buchi
acceptance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import graphs
from .ltl import (
    And,
    Atom,
    Const,
    Formula,
    LassoWord,
    Next,
    Not,
    Or,
    Release,
    SpecificationFile,
    Until,
    format_formula,
    subformulas,
    to_nnf,
)
from .machine import MealyMachine, input_letters


@dataclass(frozen=True, order=True)
class Guard:
    """Conjunction of literals: signals in ``pos`` true, signals in ``neg`` false."""

    pos: frozenset = frozenset()
    neg: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pos", frozenset(self.pos))
        object.__setattr__(self, "neg", frozenset(self.neg))
        if self.pos & self.neg:
            raise ValueError(f"contradictory guard on {sorted(self.pos & self.neg)}")

    def satisfied_by(self, letter: Iterable[str]) -> bool:
        letter = letter if isinstance(letter, (set, frozenset)) else set(letter)
        return self.pos <= letter and not (self.neg & letter)

    def implies(self, other: "Guard") -> bool:
        """Every letter satisfying ``self`` satisfies ``other``."""
        return other.pos <= self.pos and other.neg <= self.neg

    @property
    def signals(self) -> frozenset:
        return self.pos | self.neg

    def __str__(self) -> str:
        lits = sorted([(x, True) for x in self.pos] + [(x, False) for x in self.neg])
        if not lits:
            return "true"
        return " & ".join(x if p else "!" + x for x, p in lits)


TRUE_GUARD = Guard()


@dataclass(frozen=True)
class Transition:
    source: int
    guard: Guard
    target: int


@dataclass(frozen=True)
class UniversalCoBuchiAutomaton:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    num_states: int
    initial: int
    transitions: tuple[Transition, ...]
    rejecting: frozenset
    names: tuple[str, ...] = ()
    _out: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rejecting", frozenset(self.rejecting))
        if not 0 <= self.initial < self.num_states:
            raise ValueError("initial state out of range")
        if not all(0 <= q < self.num_states for q in self.rejecting):
            raise ValueError("rejecting states out of range")
        declared = set(self.inputs) | set(self.outputs)
        out: list[list[tuple[Guard, int]]] = [[] for _ in range(self.num_states)]
        for tr in self.transitions:
            if not (0 <= tr.source < self.num_states and 0 <= tr.target < self.num_states):
                raise ValueError(f"transition {tr} out of range")
            if not tr.guard.signals <= declared:
                raise ValueError(f"guard {tr.guard} mentions undeclared signals")
            out[tr.source].append((tr.guard, tr.target))
        object.__setattr__(self, "_out", tuple(tuple(x) for x in out))

    def successors(self, q: int) -> tuple[tuple[Guard, int], ...]:
        return self._out[q]

    def step(self, q: int, letter: frozenset) -> list[int]:
        return sorted({q2 for g, q2 in self._out[q] if g.satisfied_by(letter)})

    @property
    def size(self) -> int:
        return self.num_states

    def describe(self) -> str:
        lines = [f"states={self.num_states} initial={self.initial} rejecting={sorted(self.rejecting)}"]
        for tr in self.transitions:
            lines.append(f"  {tr.source} --[{tr.guard}]--> {tr.target}")
        return "\n".join(lines)


def universal_automaton(inputs: Sequence[str], outputs: Sequence[str]) -> UniversalCoBuchiAutomaton:
    """One non-rejecting state with a total self-loop; accepts every word."""
    return UniversalCoBuchiAutomaton(tuple(inputs), tuple(outputs), 1, 0,
                                     (Transition(0, TRUE_GUARD, 0),), frozenset(), ("true",))


# --------------------------------------------------------------------------
# LTL -> UCA
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Cover:
    pos: frozenset
    neg: frozenset
    nxt: frozenset
    postponed: frozenset

    def subsumes(self, other: "_Cover") -> bool:
        return (self.pos <= other.pos and self.neg <= other.neg
                and self.nxt <= other.nxt and self.postponed <= other.postponed)


def _fkey(f: Formula) -> str:
    return format_formula(f)


def _skey(fs: frozenset) -> tuple:
    return tuple(sorted(_fkey(f) for f in fs))


def _expand(obligations: frozenset) -> list[_Cover]:
    """All minimal one-step covers of a set of NNF obligations."""
    found: set[_Cover] = set()

    def rec(todo: tuple, pos: frozenset, neg: frozenset, nxt: frozenset, post: frozenset) -> None:
        if not todo:
            found.add(_Cover(pos, neg, nxt, post))
            return
        f, rest = todo[0], todo[1:]
        if isinstance(f, Const):
            if f.value:
                rec(rest, pos, neg, nxt, post)
        elif isinstance(f, Atom):
            if f.name not in neg:
                rec(rest, pos | {f.name}, neg, nxt, post)
        elif isinstance(f, Not):
            name = f.arg.name
            if name not in pos:
                rec(rest, pos, neg | {name}, nxt, post)
        elif isinstance(f, And):
            rec((f.left, f.right) + rest, pos, neg, nxt, post)
        elif isinstance(f, Or):
            rec((f.left,) + rest, pos, neg, nxt, post)
            rec((f.right,) + rest, pos, neg, nxt, post)
        elif isinstance(f, Next):
            if f.arg != Const(True):
                nxt = nxt | {f.arg}
            rec(rest, pos, neg, nxt, post)
        elif isinstance(f, Until):
            rec((f.right,) + rest, pos, neg, nxt, post)
            rec((f.left,) + rest, pos, neg, nxt | {f}, post | {f})
        elif isinstance(f, Release):
            rec((f.left, f.right) + rest, pos, neg, nxt, post)
            rec((f.right,) + rest, pos, neg, nxt | {f}, post)
        else:
            raise TypeError(f"formula not in NNF: {f!r}")

    rec(tuple(sorted(obligations, key=_fkey)), frozenset(), frozenset(), frozenset(), frozenset())
    covers = sorted(found, key=lambda c: (len(c.pos) + len(c.neg), sorted(c.pos), sorted(c.neg),
                                          _skey(c.nxt), _skey(c.postponed)))
    kept: list[_Cover] = []
    for c in covers:
        if not any(k.subsumes(c) for k in kept):
            kept.append(c)
    return kept


def ltl_to_uca(spec: SpecificationFile | Formula, inputs: Sequence[str] = (),
               outputs: Sequence[str] = ()) -> UniversalCoBuchiAutomaton:
    """Universal co-Buchi automaton accepting exactly the models of the formula."""
    if isinstance(spec, SpecificationFile):
        formula, inputs, outputs = spec.formula, spec.inputs, spec.outputs
    else:
        formula = spec
    negated = to_nnf(Not(formula))
    untils = [g for g in subformulas(negated) if isinstance(g, Until)]
    uidx = {u: i for i, u in enumerate(untils)}
    k = len(untils)

    # generalised Buchi automaton, transition-based acceptance
    init = frozenset([negated]) if negated != Const(True) else frozenset()
    gba_states = [init]
    index = {init: 0}
    gba_edges: list[list[tuple[Guard, int, frozenset]]] = []
    i = 0
    while i < len(gba_states):
        edges = []
        for c in _expand(gba_states[i]):
            if c.nxt not in index:
                index[c.nxt] = len(gba_states)
                gba_states.append(c.nxt)
            acc = frozenset(uidx[u] for u in untils if u not in c.postponed)
            edges.append((Guard(c.pos, c.neg), index[c.nxt], acc))
        gba_edges.append(edges)
        i += 1

    # degeneralise: (gba state, level); level k is accepting
    def advance(level: int, acc: frozenset) -> int:
        j = 0 if level == k else level
        while j < k and j in acc:
            j += 1
        return j

    start = (0, 0)
    nba_states = [start]
    nba_index = {start: 0}
    nba_edges: list[list[tuple[Guard, int]]] = []
    i = 0
    while i < len(nba_states):
        s, level = nba_states[i]
        out = []
        for guard, s2, acc in gba_edges[s]:
            key = (s2, advance(level, acc))
            if key not in nba_index:
                nba_index[key] = len(nba_states)
                nba_states.append(key)
            out.append((guard, nba_index[key]))
        nba_edges.append(out)
        i += 1
    accepting = {q for q, (_, level) in enumerate(nba_states) if level == k}

    # drop states that cannot reach an accepting cycle; runs through them are harmless
    def succ(q):
        return sorted({q2 for _, q2 in nba_edges[q]})

    comps = graphs.tarjan_scc(range(len(nba_states)), succ)
    live: set[int] = set()
    comp_of = {}
    for ci, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = ci
    # comps come in reverse topological order, so successors are settled first
    for comp in comps:
        cyclic = len(comp) > 1 or comp[0] in succ(comp[0])
        if cyclic and any(q in accepting for q in comp):
            live.update(comp)
            continue
        if any(q2 in live for q in comp for q2 in succ(q)):
            live.update(comp)
    if 0 not in live:
        return universal_automaton(inputs, outputs)

    order = graphs.reachable(0, lambda q: [q2 for q2 in succ(q) if q2 in live])
    renum = {q: i for i, q in enumerate(order)}
    transitions = []
    for q in order:
        seen: list[tuple[Guard, int]] = []
        for guard, q2 in nba_edges[q]:
            if q2 not in renum:
                continue
            if any(q2 == t2 and guard.implies(g) for g, t2 in seen):
                continue
            seen = [(g, t2) for g, t2 in seen if not (t2 == q2 and g.implies(guard))]
            seen.append((guard, q2))
        transitions.extend(Transition(renum[q], g, renum[q2]) for g, q2 in seen)
    names = tuple(
        "{" + ", ".join(_skey(gba_states[nba_states[q][0]])) + f"}}/{nba_states[q][1]}" for q in order
    )
    return UniversalCoBuchiAutomaton(
        tuple(inputs), tuple(outputs), len(order), 0, tuple(transitions),
        frozenset(renum[q] for q in order if q in accepting), names,
    )


def dualize_buchi(inputs, outputs, num_states: int, initial: int,
                  transitions: Iterable[Transition], accepting: Iterable[int]) -> UniversalCoBuchiAutomaton:
    """Read a nondeterministic Buchi automaton for the negation universally."""
    return UniversalCoBuchiAutomaton(tuple(inputs), tuple(outputs), num_states, initial,
                                     tuple(transitions), frozenset(accepting))


# --------------------------------------------------------------------------
# Acceptance
# --------------------------------------------------------------------------


def uca_accepts_word(a: UniversalCoBuchiAutomaton, w: LassoWord) -> bool:
    """True iff every run of ``a`` over ``w`` visits rejecting states finitely often."""
    def succ(v):
        q, i = v
        letter = w.letter(i)
        j = w.successor(i)
        return [(q2, j) for q2 in a.step(q, letter)]

    return graphs.find_bad_cycle((a.initial, 0), succ, lambda v: v[0] in a.rejecting) is None


@dataclass
class RunGraph:
    """Reachable part of the product of a Mealy machine and a UCA."""

    initial: tuple[int, int]
    vertices: list[tuple[int, int]]
    succ: dict[tuple[int, int], dict[tuple[int, int], frozenset]]
    rejecting_vertices: frozenset

    @property
    def edges(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return [(v, w) for v in self.vertices for w in self.succ[v]]


def build_run_graph(m: MealyMachine, a: UniversalCoBuchiAutomaton) -> RunGraph:
    if set(m.inputs) != set(a.inputs) or set(m.outputs) != set(a.outputs):
        raise ValueError("machine and automaton disagree on the signals")
    ins = input_letters(m.inputs)
    init = (m.initial, a.initial)
    succ: dict = {}
    order = [init]
    seen = {init}
    for v in order:
        t, q = v
        out: dict = {}
        for nu in range(m.num_letters):
            t2 = m.delta[t][nu]
            sigma = ins[nu] | m.lam[t][nu]
            for q2 in a.step(q, sigma):
                w = (t2, q2)
                out.setdefault(w, sigma)
                if w not in seen:
                    seen.add(w)
                    order.append(w)
        succ[v] = out
    rejecting = frozenset(v for v in order if v[1] in a.rejecting)
    return RunGraph(init, order, succ, rejecting)


@dataclass(frozen=True)
class RunGraphVerdict:
    accepting: bool
    stem: tuple = ()
    loop: tuple = ()
    word: LassoWord | None = None

    def __bool__(self) -> bool:
        return self.accepting


def run_graph_accepting(g: RunGraph) -> RunGraphVerdict:
    """Accepting iff no cycle contains a rejecting vertex; otherwise a lasso is returned."""
    found = graphs.find_bad_cycle(g.initial, lambda v: list(g.succ[v]), lambda v: v in g.rejecting_vertices)
    if found is None:
        return RunGraphVerdict(True)
    stem, loop = found
    prefix = tuple(g.succ[u][v] for u, v in zip(stem, stem[1:]))
    cyc = tuple(g.succ[u][v] for u, v in zip(loop, loop[1:]))
    return RunGraphVerdict(False, tuple(stem), tuple(loop), LassoWord(prefix, cyc))


def machine_accepted(m: MealyMachine, a: UniversalCoBuchiAutomaton) -> bool:
    return run_graph_accepting(build_run_graph(m, a)).accepting
