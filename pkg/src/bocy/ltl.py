"""LTL syntax, specification files, negation normal form and lasso-word semantics.

Formulas are immutable dataclasses.  The derived operators (``&&``, ``->``,
``<->``, ``F``, ``G``) are kept as their own nodes so that the size of a
formula can be reported as written; :func:`desugar` rewrites them into the
core grammar ``true | a | !f | f || f | X f | f U f``.  ``R`` (release) is an
internal extension needed for negation normal form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Next:
    arg: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Finally:
    arg: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Globally:
    arg: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Release:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Const, Atom, Not, Next, Finally, Globally, And, Or, Implies, Iff, Until, Release]

TRUE = Const(True)
FALSE = Const(False)

UNARY = (Not, Next, Finally, Globally)
BINARY = (And, Or, Implies, Iff, Until, Release)

_UNARY_SYMBOL = {Not: "!", Next: "X", Finally: "F", Globally: "G"}
_BINARY_SYMBOL = {And: "&&", Or: "||", Implies: "->", Iff: "<->", Until: "U", Release: "R"}


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; ``true`` for no parts."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def next_n(f: Formula, times: int) -> Formula:
    for _ in range(times):
        f = Next(f)
    return f


def children(f: Formula) -> tuple:
    if isinstance(f, UNARY):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> list[Formula]:
    """Distinct sub-formulas in post-order (children before parents)."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if g in seen:
            return
        for c in children(g):
            walk(c)
        seen[g] = None

    walk(f)
    return list(seen)


def size(f: Formula) -> int:
    """Number of distinct sub-formulas of ``f`` as written."""
    return len(subformulas(f))


def node_count(f: Formula) -> int:
    """Number of AST nodes (shared sub-terms counted every time)."""
    return 1 + sum(node_count(c) for c in children(f))


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


# --------------------------------------------------------------------------
# Rewriting
# --------------------------------------------------------------------------


def desugar(f: Formula) -> Formula:
    """Rewrite into ``true | a | ! | || | X | U``."""
    if isinstance(f, Const):
        return TRUE if f.value else Not(TRUE)
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, Next):
        return Next(desugar(f.arg))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, Until):
        return Until(desugar(f.left), desugar(f.right))
    if isinstance(f, And):
        return Not(Or(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Iff):
        a, b = desugar(f.left), desugar(f.right)
        both = Not(Or(Not(a), Not(b)))
        neither = Not(Or(a, b))
        return Or(both, neither)
    if isinstance(f, Finally):
        return Until(TRUE, desugar(f.arg))
    if isinstance(f, Globally):
        return Not(Until(TRUE, Not(desugar(f.arg))))
    if isinstance(f, Release):
        return Not(Until(Not(desugar(f.left)), Not(desugar(f.right))))
    raise TypeError(f"not a formula: {f!r}")


def core_size(f: Formula) -> int:
    return size(desugar(f))


def to_nnf(f: Formula) -> Formula:
    """Negation normal form over true/false, literals, &&, ||, X, U, R."""
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Const):
        return Const(f.value != neg)
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, Next):
        return Next(_nnf(f.arg, neg))
    if isinstance(f, And):
        cls = Or if neg else And
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        cls = And if neg else Or
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), neg)
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if neg:
            return Or(And(_nnf(a, False), _nnf(b, True)), And(_nnf(a, True), _nnf(b, False)))
        return Or(And(_nnf(a, False), _nnf(b, False)), And(_nnf(a, True), _nnf(b, True)))
    if isinstance(f, Finally):
        if neg:
            return Release(FALSE, _nnf(f.arg, True))
        return Until(TRUE, _nnf(f.arg, False))
    if isinstance(f, Globally):
        if neg:
            return Until(TRUE, _nnf(f.arg, True))
        return Release(FALSE, _nnf(f.arg, False))
    if isinstance(f, Until):
        cls = Release if neg else Until
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Release):
        cls = Until if neg else Release
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, Not) and not isinstance(g.arg, Atom):
            return False
        if isinstance(g, (Implies, Iff, Finally, Globally)):
            return False
    return True


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------


def format_formula(f: Formula) -> str:
    """Print with every binary operator parenthesised, so parsing round-trips."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, UNARY):
        sym = _UNARY_SYMBOL[type(f)]
        inner = format_formula(f.arg)
        return f"!{inner}" if sym == "!" else f"{sym} {inner}"
    sym = _BINARY_SYMBOL[type(f)]
    return f"({format_formula(f.left)} {sym} {format_formula(f.right)})"


# --------------------------------------------------------------------------
# Specification files and parsing
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Signal:
    name: str
    kind: str  # "input" | "output"


@dataclass(frozen=True)
class SpecificationFile:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    formula: Formula

    @property
    def signals(self) -> tuple[Signal, ...]:
        return tuple(Signal(n, "input") for n in self.inputs) + tuple(
            Signal(n, "output") for n in self.outputs
        )

    def format(self) -> str:
        lines = []
        if self.inputs:
            lines.append("INPUTS: " + " ".join(self.inputs))
        if self.outputs:
            lines.append("OUTPUTS: " + " ".join(self.outputs))
        lines.append("SPEC: " + format_formula(self.formula))
        return "\n".join(lines) + "\n"


class SpecError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<op><->|->|&&|\|\||!|\(|\))|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)
_KEYWORDS = {"true", "false", "X", "F", "G", "U", "R"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "op", "kw", "ident", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int = 1, col: int = 1) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup == "op":
            tokens.append(_Token("op", chunk, line, col))
        elif m.lastgroup == "ident":
            kind = "kw" if chunk in _KEYWORDS else "ident"
            tokens.append(_Token(kind, chunk, line, col))
        for ch in chunk:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], declared: set[str] | None):
        self.tokens = tokens
        self.i = 0
        self.declared = declared

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind in ("op", "kw") and tok.text in texts

    def operand(self, op: _Token, parse):
        if self.peek().kind == "eof" or self.at(")", "&&", "||", "->", "<->", "U", "R"):
            tok = self.peek()
            raise SpecError(f"operator {op.text!r} is missing an operand", tok.line, tok.col)
        return parse()

    def parse(self) -> Formula:
        if self.peek().kind == "eof":
            tok = self.peek()
            raise SpecError("empty formula", tok.line, tok.col)
        f = self.iff()
        tok = self.peek()
        if tok.kind != "eof":
            raise SpecError(f"unexpected token {tok.text!r}", tok.line, tok.col)
        return f

    def iff(self) -> Formula:
        left = self.imp()
        if self.at("<->"):
            op = self.take()
            return Iff(left, self.operand(op, self.iff))
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            op = self.take()
            return Implies(left, self.operand(op, self.imp))
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.at("||"):
            op = self.take()
            left = Or(left, self.operand(op, self.conj))
        return left

    def conj(self) -> Formula:
        left = self.until()
        while self.at("&&"):
            op = self.take()
            left = And(left, self.operand(op, self.until))
        return left

    def until(self) -> Formula:
        left = self.unary()
        if self.at("U", "R"):
            op = self.take()
            cls = Until if op.text == "U" else Release
            return cls(left, self.operand(op, self.until))
        return left

    def unary(self) -> Formula:
        if self.at("!", "X", "F", "G"):
            op = self.take()
            cls = {"!": Not, "X": Next, "F": Finally, "G": Globally}[op.text]
            return cls(self.operand(op, self.unary))
        return self.primary()

    def primary(self) -> Formula:
        tok = self.take()
        if tok.kind == "kw" and tok.text in ("true", "false"):
            return Const(tok.text == "true")
        if tok.kind == "ident":
            if self.declared is not None and tok.text not in self.declared:
                raise SpecError(f"undeclared signal {tok.text!r}", tok.line, tok.col)
            return Atom(tok.text)
        if tok.kind == "op" and tok.text == "(":
            if self.at(")"):
                raise SpecError("empty parentheses", tok.line, tok.col)
            f = self.iff()
            close = self.take()
            if close.text != ")":
                raise SpecError("expected ')'", close.line, close.col)
            return f
        if tok.kind == "eof":
            raise SpecError("unexpected end of formula", tok.line, tok.col)
        raise SpecError(f"unexpected token {tok.text!r}", tok.line, tok.col)


def parse_formula(text: str, signals: Iterable[str] | None = None) -> Formula:
    """Parse a bare LTL expression; with ``signals`` given, atoms must be declared."""
    declared = None if signals is None else set(signals)
    return _Parser(_tokenize(text), declared).parse()


_HEADER_RE = re.compile(r"^\s*(INPUTS|OUTPUTS|SPEC)\s*:")


def parse_spec(text: str) -> SpecificationFile:
    inputs: list[str] = []
    outputs: list[str] = []
    spec_parts: list[tuple[int, int, str]] = []
    section = None
    seen: dict[str, tuple[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        m = _HEADER_RE.match(line)
        if m:
            section = m.group(1)
            if section in seen:
                raise SpecError(f"duplicate {section} section", lineno, m.start(1) + 1)
            seen[section] = (lineno, m.start(1) + 1)
            body, body_col = line[m.end():], m.end() + 1
        else:
            body, body_col = line, 1
        if section is None:
            if body.strip():
                raise SpecError("text outside of INPUTS/OUTPUTS/SPEC sections", lineno, 1)
            continue
        if section == "SPEC":
            spec_parts.append((lineno, body_col, body))
            continue
        for tm in re.finditer(r"\S+", body):
            name = tm.group(0)
            col = body_col + tm.start()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in _KEYWORDS:
                raise SpecError(f"invalid signal name {name!r}", lineno, col)
            if name in inputs or name in outputs:
                raise SpecError(f"signal {name!r} declared twice", lineno, col)
            (inputs if section == "INPUTS" else outputs).append(name)
    if "SPEC" not in seen:
        raise SpecError("missing SPEC section", max(1, len(text.splitlines())), 1)
    tokens: list[_Token] = []
    for lineno, col, body in spec_parts:
        tokens.extend(t for t in _tokenize(body, lineno, col) if t.kind != "eof")
    last_line, last_col = (spec_parts[-1][0], spec_parts[-1][1] + len(spec_parts[-1][2]))
    tokens.append(_Token("eof", "", last_line, last_col))
    formula = _Parser(tokens, set(inputs) | set(outputs)).parse()
    return SpecificationFile(tuple(inputs), tuple(outputs), formula)


def read_spec(path) -> SpecificationFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


# --------------------------------------------------------------------------
# Lasso words and semantics
# --------------------------------------------------------------------------


Letter = frozenset


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``prefix . loop^omega``."""

    prefix: tuple[frozenset, ...]
    loop: tuple[frozenset, ...]

    def __post_init__(self):
        if len(self.loop) < 1:
            raise ValueError("lasso loop must contain at least one letter")
        object.__setattr__(self, "prefix", tuple(frozenset(x) for x in self.prefix))
        object.__setattr__(self, "loop", tuple(frozenset(x) for x in self.loop))

    @classmethod
    def of(cls, prefix: Sequence[Iterable[str]], loop: Sequence[Iterable[str]]) -> "LassoWord":
        return cls(tuple(frozenset(x) for x in prefix), tuple(frozenset(x) for x in loop))

    def __len__(self) -> int:
        return len(self.prefix) + len(self.loop)

    def canonical(self, pos: int) -> int:
        if pos < len(self.prefix):
            return pos
        return len(self.prefix) + (pos - len(self.prefix)) % len(self.loop)

    def successor(self, i: int) -> int:
        return i + 1 if i + 1 < len(self) else len(self.prefix)

    def letter(self, pos: int) -> frozenset:
        i = self.canonical(pos)
        return self.prefix[i] if i < len(self.prefix) else self.loop[i - len(self.prefix)]

    def letters(self) -> Iterator[frozenset]:
        yield from self.prefix
        yield from self.loop


def evaluate(f: Formula, w: LassoWord, pos: int = 0) -> bool:
    """Decide ``w, pos |= f``."""
    if pos < 0:
        raise ValueError("position must be non-negative")
    return _table(f, w, {})[w.canonical(pos)]


def _table(f: Formula, w: LassoWord, memo: dict) -> tuple[bool, ...]:
    hit = memo.get(f)
    if hit is not None:
        return hit
    n = len(w)
    succ = [w.successor(i) for i in range(n)]
    if isinstance(f, Const):
        res = (f.value,) * n
    elif isinstance(f, Atom):
        res = tuple(f.name in w.letter(i) for i in range(n))
    elif isinstance(f, Not):
        res = tuple(not x for x in _table(f.arg, w, memo))
    elif isinstance(f, Next):
        sub = _table(f.arg, w, memo)
        res = tuple(sub[succ[i]] for i in range(n))
    elif isinstance(f, (And, Or, Implies, Iff)):
        a, b = _table(f.left, w, memo), _table(f.right, w, memo)
        if isinstance(f, And):
            res = tuple(x and y for x, y in zip(a, b))
        elif isinstance(f, Or):
            res = tuple(x or y for x, y in zip(a, b))
        elif isinstance(f, Implies):
            res = tuple((not x) or y for x, y in zip(a, b))
        else:
            res = tuple(x == y for x, y in zip(a, b))
    elif isinstance(f, (Until, Finally)):
        if isinstance(f, Until):
            a, b = _table(f.left, w, memo), _table(f.right, w, memo)
        else:
            a, b = (True,) * n, _table(f.arg, w, memo)
        res = _fixpoint(a, b, succ, least=True)
    elif isinstance(f, (Release, Globally)):
        if isinstance(f, Release):
            a, b = _table(f.left, w, memo), _table(f.right, w, memo)
        else:
            a, b = (False,) * n, _table(f.arg, w, memo)
        res = _fixpoint(a, b, succ, least=False)
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = res
    return res


def _fixpoint(a, b, succ, least: bool) -> tuple[bool, ...]:
    # least:  U = b | (a & X U);  greatest:  R = b & (a | X R)
    n = len(a)
    cur = [not least] * n
    changed = True
    while changed:
        changed = False
        for i in reversed(range(n)):
            nxt = cur[succ[i]]
            val = (b[i] or (a[i] and nxt)) if least else (b[i] and (a[i] or nxt))
            if val != cur[i]:
                cur[i] = val
                changed = True
    return tuple(cur)
