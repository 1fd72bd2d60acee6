"""Import of a small HOA subset: state-based Buchi automata with explicit labels.

Supported: ``HOA: v1``, ``States``, a single ``Start`` state, ``AP``,
``Acceptance: 1 Inf(0)`` (``acc-name: Buchi`` optional), ``name``, ``tool``,
``properties``, state-based acceptance marks ``{0}`` and explicit edge
labels built from ``t``, ``f``, AP indices, ``!``, ``&``, ``|`` and
parentheses.  The automaton is read as a Buchi automaton for the negated
specification and dualised into a universal co-Buchi automaton.
"""
from __future__ import annotations

import re
import shlex

from .automata import Guard, Transition, UniversalCoBuchiAutomaton, dualize_buchi


class HoaError(ValueError):
    pass


_IGNORED = {"name", "tool", "properties"}
_LABEL_TOKEN = re.compile(r"\s*(\d+|[tf!&|()])")


def _parse_label(text: str, aps: list[str]) -> list[Guard]:
    """Label expression to a list of cubes (a DNF); contradictory cubes are dropped."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _LABEL_TOKEN.match(text, pos)
        if not m:
            raise HoaError(f"unsupported label syntax near {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def disj():
        out = conj()
        while peek() == "|":
            take()
            out = out + conj()
        return out

    def conj():
        out = atom()
        while peek() == "&":
            take()
            rhs = atom()
            out = [(p | p2, n | n2) for p, n in out for p2, n2 in rhs if not ((p | p2) & (n | n2))]
        return out

    def atom():
        tok = peek()
        if tok is None:
            raise HoaError("label ends early")
        take()
        if tok == "t":
            return [(frozenset(), frozenset())]
        if tok == "f":
            return []
        if tok == "(":
            out = disj()
            if take() != ")":
                raise HoaError("unbalanced parenthesis in label")
            return out
        if tok == "!":
            nxt = peek()
            if nxt is None or not nxt.isdigit():
                raise HoaError("negation is only supported on atomic propositions")
            return [(frozenset(), frozenset([_ap(take(), aps)]))]
        if tok.isdigit():
            return [(frozenset([_ap(tok, aps)]), frozenset())]
        raise HoaError(f"unexpected {tok!r} in label")

    cubes = disj()
    if i != len(toks):
        raise HoaError(f"trailing tokens in label {text!r}")
    return [Guard(p, n) for p, n in sorted(set(cubes), key=lambda c: (sorted(c[0]), sorted(c[1])))]


def _ap(tok: str, aps: list[str]) -> str:
    k = int(tok)
    if k >= len(aps):
        raise HoaError(f"AP index {k} out of range")
    return aps[k]


def parse_hoa(text: str, inputs, outputs) -> UniversalCoBuchiAutomaton:
    header, _, body = text.partition("--BODY--")
    if not _:
        raise HoaError("missing --BODY--")
    body, end, _ = body.partition("--END--")
    if not end:
        raise HoaError("missing --END--")
    states = None
    start = []
    aps: list[str] = []
    acceptance = None
    version = None
    for line in header.splitlines():
        line = line.strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise HoaError(f"malformed header line {line!r}")
        key, rest = key.strip(), rest.strip()
        if key == "HOA":
            version = rest
        elif key == "States":
            states = int(rest)
        elif key == "Start":
            if "&" in rest:
                raise HoaError("unsupported feature: alternating start (conjunction of states)")
            start.append(int(rest))
        elif key == "AP":
            parts = shlex.split(rest)
            count = int(parts[0])
            aps = parts[1:]
            if len(aps) != count:
                raise HoaError(f"AP header announces {count} propositions, lists {len(aps)}")
        elif key == "Acceptance":
            acceptance = " ".join(rest.split())
        elif key == "acc-name":
            if rest.split()[0] != "Buchi":
                raise HoaError(f"unsupported feature: acceptance {rest!r}")
        elif key in _IGNORED:
            continue
        else:
            raise HoaError(f"unsupported feature: header item {key!r}")
    if version != "v1":
        raise HoaError("unsupported feature: HOA version must be v1")
    if states is None:
        raise HoaError("missing States header")
    if len(start) != 1:
        raise HoaError("unsupported feature: exactly one Start state is required")
    if acceptance != "1 Inf(0)":
        raise HoaError(f"unsupported feature: acceptance condition {acceptance!r}")
    declared = set(inputs) | set(outputs)
    for ap in aps:
        if ap not in declared:
            raise HoaError(f"AP {ap!r} is not a declared signal")

    transitions = []
    accepting = set()
    current = None
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("State:"):
            m = re.match(r"State:\s*(\[[^\]]*\])?\s*(\d+)\s*(\"[^\"]*\")?\s*(\{[^}]*\})?\s*$", line)
            if not m:
                raise HoaError(f"malformed state line {line!r}")
            if m.group(1):
                raise HoaError("unsupported feature: state labels")
            current = int(m.group(2))
            if m.group(4):
                marks = m.group(4)[1:-1].split()
                if marks not in ([], ["0"]):
                    raise HoaError(f"unsupported feature: acceptance sets {m.group(4)}")
                if marks:
                    accepting.add(current)
            continue
        if current is None:
            raise HoaError("edge before any State line")
        m = re.match(r"\[([^\]]*)\]\s*(\d+)\s*(\{[^}]*\})?\s*$", line)
        if not m:
            if not line.startswith("["):
                raise HoaError("unsupported feature: implicit edge labels")
            raise HoaError(f"malformed edge {line!r}")
        if m.group(3):
            raise HoaError("unsupported feature: transition-based acceptance marks")
        target = int(m.group(2))
        if not (0 <= target < states):
            raise HoaError(f"edge target {target} out of range")
        for g in _parse_label(m.group(1), aps):
            transitions.append(Transition(current, g, target))
    return dualize_buchi(inputs, outputs, states, start[0], transitions, accepting)


def import_hoa(path, inputs, outputs) -> UniversalCoBuchiAutomaton:
    with open(path, encoding="utf-8") as fh:
        return parse_hoa(fh.read(), inputs, outputs)
