"""CNF construction kit: tagged variables, gates, cardinality and comparison gadgets.

Literals are signed integers.  Gate helpers also accept the Python
constants ``True``/``False`` and fold them away, so encoders can mix fixed
values (for example a constant bound) with variables.  Numbers are unsigned
and big-endian: ``bits[0]`` is the most significant bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

Lit = Union[int, bool]

# --------------------------------------------------------------------------
# Tag constructors, one per variable family
# --------------------------------------------------------------------------


def trans(t, nu, t2):
    return ("trans", t, nu, t2)


def label(t, nu, x):
    return ("label", t, nu, x)


def rgstate(t, q):
    return ("rgstate", t, q)


def annotation_bit(t, q, i):
    return ("ann", t, q, i)


def edge(t, t2):
    return ("edge", t, t2)


def bedge(s, s2):
    return ("bedge", s, s2)


def redge(s, s2):
    return ("redge", s, s2)


def wtree_bit(s, i):
    return ("wtree", s, i)


def allowed(s, t):
    return ("allowed", s, t)


def active(s):
    return ("active", s)


def reach(s, t):
    return ("reach", s, t)


def rbound_bit(c, i):
    return ("rbound", c, i)


def scc_bit(k, t, i):
    return ("scc", k, t, i)


def fedge(k, t, t2):
    return ("fedge", k, t, t2)


def bedge_scc(k, t, t2):
    return ("bedge_k", k, t, t2)


def frank_bit(k, t, i):
    return ("frank", k, t, i)


def brank_bit(k, t, i):
    return ("brank", k, t, i)


def width_for(max_value: int) -> int:
    """Bits needed for the unsigned range ``0..max_value`` (at least one)."""
    return max(1, math.ceil(math.log2(max_value + 1)))


def to_bits(value: int, width: int) -> list[bool]:
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return [bool(value >> (width - 1 - i) & 1) for i in range(width)]


class CnfError(ValueError):
    pass


@dataclass
class CnfInstance:
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._ids: dict = {}
        self._tags: list = [None]
        self.clauses: list[tuple[int, ...]] = []
        self._gates: dict = {}
        self._aux = 0
        self._false: int | None = None

    # ---- allocation --------------------------------------------------------

    def var(self, tag) -> int:
        """Id of ``tag``, allocating it on first use."""
        v = self._ids.get(tag)
        if v is None:
            v = len(self._tags)
            self._ids[tag] = v
            self._tags.append(tag)
        return v

    def fresh(self, kind: str = "aux") -> int:
        self._aux += 1
        return self.var((kind, self._aux))

    def lookup(self, tag) -> int | None:
        return self._ids.get(tag)

    def tag_of(self, v: int):
        return self._tags[abs(v)]

    def bits(self, make, width: int) -> list[int]:
        """Allocate ``make(0..width-1)`` as a big-endian number."""
        return [self.var(make(i)) for i in range(width)]

    @property
    def num_vars(self) -> int:
        return len(self._tags) - 1

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for tag in self._tags[1:]:
            out[tag[0]] = out.get(tag[0], 0) + 1
        return out

    # ---- clauses -----------------------------------------------------------

    def add(self, lits: Iterable[Lit]) -> None:
        clause = []
        for x in lits:
            if x is True:
                return
            if x is False:
                continue
            if not isinstance(x, int) or x == 0 or abs(x) > self.num_vars:
                raise CnfError(f"literal {x!r} does not name an allocated variable")
            clause.append(x)
        if not clause:
            # keep the instance honest: an empty clause makes it UNSAT
            f = self._false_var()
            self.clauses.append((f,))
            return
        self.clauses.append(tuple(clause))

    def _false_var(self) -> int:
        if self._false is None:
            self._false = self.var(("const_false",))
            self.clauses.append((-self._false,))
        return self._false

    def implies(self, premise: Sequence[Lit], conclusion: Sequence[Lit]) -> None:
        """``AND(premise) -> OR(conclusion)``."""
        self.add([neg(p) for p in premise] + list(conclusion))

    # ---- gates -------------------------------------------------------------

    def and_(self, lits: Iterable[Lit]) -> Lit:
        xs = []
        for x in lits:
            if x is False:
                return False
            if x is True:
                continue
            xs.append(x)
        xs = sorted(set(xs), key=lambda v: (abs(v), v))
        if any(-x in xs for x in xs):
            return False
        if not xs:
            return True
        if len(xs) == 1:
            return xs[0]
        key = ("and", tuple(xs))
        g = self._gates.get(key)
        if g is None:
            g = self.fresh("and")
            for x in xs:
                self.clauses.append((-g, x))
            self.clauses.append(tuple([g] + [-x for x in xs]))
            self._gates[key] = g
        return g

    def or_(self, lits: Iterable[Lit]) -> Lit:
        return neg(self.and_(neg(x) for x in lits))

    def iff(self, a: Lit, b: Lit) -> Lit:
        if isinstance(a, bool):
            return b if a else neg(b)
        if isinstance(b, bool):
            return a if b else neg(a)
        if a == b:
            return True
        if a == -b:
            return False
        if abs(a) > abs(b):
            a, b = b, a
        sign = 1
        if a < 0:
            a, sign = -a, -sign
        if b < 0:
            b, sign = -b, -sign
        key = ("iff", a, b)
        g = self._gates.get(key)
        if g is None:
            g = self.fresh("iff")
            self.clauses.extend([(-g, -a, b), (-g, a, -b), (g, a, b), (g, -a, -b)])
            self._gates[key] = g
        return g if sign > 0 else -g

    # ---- cardinality -------------------------------------------------------

    def exactly_one(self, lits: Sequence[Lit], guard: Sequence[Lit] = ()) -> None:
        """Exactly one literal true (under ``guard``): pairwise up to six, sequential counter above."""
        lits = list(lits)
        if not lits:
            raise CnfError("exactly_one needs at least one literal")
        self.implies(guard, lits)
        self.at_most_one(lits, guard)

    def at_most_one(self, lits: Sequence[Lit], guard: Sequence[Lit] = ()) -> None:
        trues = [x for x in lits if x is True]
        xs = [x for x in lits if not isinstance(x, bool)]
        if len(trues) > 1:
            self.implies(guard, [])
            return
        if trues:
            for x in xs:
                self.implies(guard, [neg(x)])
            return
        if len(xs) <= 6:
            for i in range(len(xs)):
                for j in range(i + 1, len(xs)):
                    self.implies(guard, [-xs[i], -xs[j]])
            return
        # sequential counter: s_i <-> some of x_0..x_i is true
        prev = xs[0]
        for i in range(1, len(xs)):
            self.implies(guard, [-prev, -xs[i]])
            if i < len(xs) - 1:
                s = self.fresh("amo")
                self.add([-prev, s])
                self.add([-xs[i], s])
                prev = s

    # ---- binary numbers ----------------------------------------------------

    def _pad(self, a: Sequence[Lit], b) -> tuple[list, list]:
        if isinstance(b, int) and not isinstance(b, bool):
            if b < 0:
                raise CnfError("constants must be non-negative")
            width = max(len(a), b.bit_length(), 1)
            b = to_bits(b, width)
        a, b = list(a), list(b)
        if not a or not b:
            raise CnfError("binary comparison needs width >= 1")
        w = max(len(a), len(b))
        return [False] * (w - len(a)) + a, [False] * (w - len(b)) + b

    def compare(self, a: Sequence[Lit], b, rel: str) -> Lit:
        """Literal equivalent to ``value(a) rel value(b)``."""
        a, b = self._pad(a, b)
        if rel == "=":
            return self.and_(self.iff(x, y) for x, y in zip(a, b))
        if rel == "!=":
            return neg(self.compare(a, b, "="))
        if rel == "<":
            return self._less(a, b, strict=True)
        if rel == "<=":
            return self._less(a, b, strict=False)
        if rel == ">":
            return self._less(b, a, strict=True)
        if rel == ">=":
            return self._less(b, a, strict=False)
        raise CnfError(f"unknown relation {rel!r}")

    def _less(self, a: list, b: list, strict: bool) -> Lit:
        # scan from the least significant bit upwards
        acc: Lit = not strict
        for x, y in zip(reversed(a), reversed(b)):
            lt = self.and_([neg(x), y])
            acc = self.or_([lt, self.and_([self.iff(x, y), acc])])
        return acc

    def assert_compare(self, a: Sequence[Lit], b, rel: str, guard: Sequence[Lit] = ()) -> None:
        self.implies(guard, [self.compare(a, b, rel)])

    # ---- output ------------------------------------------------------------

    def to_dimacs(self, comments: bool = False) -> bytes:
        out = []
        if comments:
            for v in range(1, self.num_vars + 1):
                out.append(f"c {v} {self._tags[v]!r}\n")
        out.append(f"p cnf {self.num_vars} {self.num_clauses}\n")
        out.extend(" ".join(map(str, c)) + " 0\n" for c in self.clauses)
        return "".join(out).encode()

    def check(self, model: "Model") -> bool:
        return all(any(model.lit(x) for x in c) for c in self.clauses)


def neg(x: Lit) -> Lit:
    if isinstance(x, bool):
        return not x
    return -x


@dataclass(frozen=True)
class Model:
    """Truth values indexed by variable id (index 0 unused)."""

    values: tuple[bool, ...]

    @classmethod
    def from_lits(cls, lits: Iterable[int], num_vars: int) -> "Model":
        vals = [False] * (num_vars + 1)
        for x in lits:
            if 0 < abs(x) <= num_vars:
                vals[abs(x)] = x > 0
        return cls(tuple(vals))

    def lit(self, x: Lit) -> bool:
        if isinstance(x, bool):
            return x
        v = self.values[abs(x)]
        return v if x > 0 else not v

    def value(self, cnf: CnfInstance, tag) -> bool:
        v = cnf.lookup(tag)
        if v is None:
            raise KeyError(f"no variable tagged {tag!r}")
        return self.values[v]

    def number(self, bits: Sequence[Lit]) -> int:
        out = 0
        for b in bits:
            out = out << 1 | int(self.lit(b))
        return out
