"""Mealy machines, their label-erased state graphs, and text/DOT serialisation.

Input letters are indexed by integers: bit ``i`` of the index says whether
``inputs[i]`` is present.  State 0 is the initial state unless stated
otherwise.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ltl import LassoWord


def input_letters(inputs: Sequence[str]) -> list[frozenset]:
    return [frozenset(x for i, x in enumerate(inputs) if nu >> i & 1) for nu in range(1 << len(inputs))]


def input_index(inputs: Sequence[str], letter: Iterable[str]) -> int:
    letter = set(letter)
    return sum(1 << i for i, x in enumerate(inputs) if x in letter)


def format_set(items: Iterable[str], order: Sequence[str]) -> str:
    items = set(items)
    return "{" + ", ".join(x for x in order if x in items) + "}"


@dataclass(frozen=True)
class StateGraph:
    """Label-erased transition graph; vertices are ``0..num_vertices-1``."""

    num_vertices: int
    succ: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "StateGraph":
        out: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {(u, v)} out of range for {n} vertices")
            out[u].add(v)
        return cls(n, tuple(tuple(sorted(s)) for s in out))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.num_vertices) for v in self.succ[u]]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.succ[u]

    def max_outdegree(self) -> int:
        return max((len(s) for s in self.succ), default=0)

    def induced(self, keep: Iterable[int]) -> "StateGraph":
        """Same vertex numbering, edges only among ``keep``."""
        keep = set(keep)
        return StateGraph(
            self.num_vertices,
            tuple(tuple(v for v in s if v in keep) if u in keep else () for u, s in enumerate(self.succ)),
        )


@dataclass(frozen=True)
class MealyMachine:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    num_states: int
    delta: tuple[tuple[int, ...], ...]
    lam: tuple[tuple[frozenset, ...], ...]
    initial: int = 0

    def __post_init__(self):
        width = 1 << len(self.inputs)
        if not 0 <= self.initial < self.num_states:
            raise ValueError("initial state out of range")
        if len(self.delta) != self.num_states or len(self.lam) != self.num_states:
            raise ValueError("delta/lambda must have one row per state")
        for t in range(self.num_states):
            if len(self.delta[t]) != width or len(self.lam[t]) != width:
                raise ValueError(f"state {t}: delta/lambda not total over 2^I")
            for nu in range(width):
                if not 0 <= self.delta[t][nu] < self.num_states:
                    raise ValueError(f"delta({t}, {nu}) out of range")
                if not set(self.lam[t][nu]) <= set(self.outputs):
                    raise ValueError(f"lambda({t}, {nu}) mentions undeclared outputs")

    @property
    def num_letters(self) -> int:
        return 1 << len(self.inputs)

    def letter(self, t: int, nu: int) -> frozenset:
        """Full letter read along the transition ``(t, nu)``."""
        return input_letters(self.inputs)[nu] | self.lam[t][nu]

    def step(self, t: int, letter: Iterable[str]) -> tuple[int, frozenset]:
        nu = input_index(self.inputs, letter)
        return self.delta[t][nu], self.lam[t][nu]

    def with_output(self, t: int, nu: int, outputs: Iterable[str]) -> "MealyMachine":
        lam = [list(row) for row in self.lam]
        lam[t][nu] = frozenset(outputs)
        return MealyMachine(self.inputs, self.outputs, self.num_states, self.delta,
                            tuple(tuple(r) for r in lam), self.initial)

    def flip_output(self, t: int, nu: int, signal: str) -> "MealyMachine":
        return self.with_output(t, nu, self.lam[t][nu] ^ {signal})


def abstract_graph(m: MealyMachine) -> StateGraph:
    """Project away the input labels: ``t -> t'`` iff some input moves t to t'."""
    return StateGraph.from_edges(
        m.num_states, ((t, m.delta[t][nu]) for t in range(m.num_states) for nu in range(m.num_letters))
    )


def reachable_states(m: MealyMachine) -> list[int]:
    seen = [m.initial]
    for t in seen:
        for nu in range(m.num_letters):
            if m.delta[t][nu] not in seen:
                seen.append(m.delta[t][nu])
    return seen


def enumerate_paths(m: MealyMachine, input_lasso: LassoWord) -> LassoWord:
    """The word produced when ``m`` reads the input lasso from its initial state."""
    t = m.initial
    prefix = []
    for letter in input_lasso.prefix:
        nu = input_index(m.inputs, letter)
        prefix.append(m.letter(t, nu))
        t = m.delta[t][nu]
    # unroll loop copies until the state at a loop boundary repeats
    starts: dict[int, int] = {}
    copies: list[list[frozenset]] = []
    while t not in starts:
        starts[t] = len(copies)
        chunk = []
        for letter in input_lasso.loop:
            nu = input_index(m.inputs, letter)
            chunk.append(m.letter(t, nu))
            t = m.delta[t][nu]
        copies.append(chunk)
    first = starts[t]
    for chunk in copies[:first]:
        prefix.extend(chunk)
    loop = [x for chunk in copies[first:] for x in chunk]
    return LassoWord(tuple(prefix), tuple(loop))


# --------------------------------------------------------------------------
# Text format
# --------------------------------------------------------------------------


class MachineFormatError(ValueError):
    pass


def format_machine(m: MealyMachine) -> str:
    letters = input_letters(m.inputs)
    lines = [
        "INPUTS: " + " ".join(m.inputs),
        "OUTPUTS: " + " ".join(m.outputs),
        f"STATES: {m.num_states}",
        f"INITIAL: {m.initial}",
    ]
    for t in range(m.num_states):
        for nu in range(m.num_letters):
            lines.append(
                f"{t} {format_set(letters[nu], m.inputs)} -> {m.delta[t][nu]} / "
                f"{format_set(m.lam[t][nu], m.outputs)}"
            )
    return "\n".join(line.rstrip() for line in lines) + "\n"


_TRANS_RE = re.compile(r"^(\d+)\s*\{([^}]*)\}\s*->\s*(\d+)\s*/\s*\{([^}]*)\}$")


def parse_machine(text: str) -> MealyMachine:
    header: dict[str, str] = {}
    rows: list[tuple[int, str, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if sep and key in ("INPUTS", "OUTPUTS", "STATES", "INITIAL"):
            header[key] = rest.strip()
            continue
        m = _TRANS_RE.match(line)
        if m is None:
            raise MachineFormatError(f"line {lineno}: cannot parse {line!r}")
        rows.append((int(m.group(1)), m.group(2), int(m.group(3)), m.group(4)))
    try:
        n = int(header["STATES"])
    except (KeyError, ValueError):
        raise MachineFormatError("missing or invalid STATES header") from None
    inputs = tuple(header.get("INPUTS", "").split())
    outputs = tuple(header.get("OUTPUTS", "").split())
    initial = int(header.get("INITIAL", "0"))
    width = 1 << len(inputs)
    delta: list[list[int | None]] = [[None] * width for _ in range(n)]
    lam: list[list[frozenset | None]] = [[None] * width for _ in range(n)]

    def names(body: str) -> list[str]:
        return [x.strip() for x in body.split(",") if x.strip()]

    for t, ins, t2, outs in rows:
        if not (0 <= t < n):
            raise MachineFormatError(f"state {t} out of range")
        in_names = names(ins)
        if not set(in_names) <= set(inputs):
            raise MachineFormatError(f"unknown input in {{{ins}}}")
        nu = input_index(inputs, in_names)
        if delta[t][nu] is not None:
            raise MachineFormatError(f"duplicate transition for state {t} input {{{ins}}}")
        delta[t][nu] = t2
        lam[t][nu] = frozenset(names(outs))
    for t in range(n):
        for nu in range(width):
            if delta[t][nu] is None:
                raise MachineFormatError(f"missing transition for state {t} input index {nu}")
    return MealyMachine(inputs, outputs, n, tuple(map(tuple, delta)), tuple(map(tuple, lam)), initial)


def to_dot(m: MealyMachine, collapsed: bool = False, name: str = "mealy") -> str:
    """Graphviz rendering; ``collapsed`` merges parallel edges into one."""
    letters = input_letters(m.inputs)
    out = [f"digraph {name} {{", "  rankdir=LR;", "  __start [shape=point];"]
    for t in range(m.num_states):
        shape = "doublecircle" if t == m.initial else "circle"
        out.append(f'  t{t} [label="t{t}", shape={shape}];')
    out.append(f"  __start -> t{m.initial};")
    if collapsed:
        grouped: dict[tuple[int, int], list[str]] = {}
        for t in range(m.num_states):
            for nu in range(m.num_letters):
                label = f"{format_set(letters[nu], m.inputs)}/{format_set(m.lam[t][nu], m.outputs)}"
                grouped.setdefault((t, m.delta[t][nu]), []).append(label)
        for (t, t2), labels in grouped.items():
            out.append(f'  t{t} -> t{t2} [label="{", ".join(labels)}"];')
    else:
        for t in range(m.num_states):
            for nu in range(m.num_letters):
                label = f"{format_set(letters[nu], m.inputs)}/{format_set(m.lam[t][nu], m.outputs)}"
                out.append(f'  t{t} -> t{m.delta[t][nu]} [label="{label}"];')
    out.append("}")
    return "\n".join(out) + "\n"
