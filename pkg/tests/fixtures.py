"""Specifications and hand-built machines shared by several test modules."""
from __future__ import annotations

from bocy.ltl import parse_spec
from bocy.machine import MealyMachine, StateGraph

G_B = "OUTPUTS: b\nSPEC: G b\n"
CONTRA = "OUTPUTS: b\nSPEC: b && !b\n"
REQUEST = "INPUTS: a\nOUTPUTS: b\nSPEC: G (a -> X b)\n"
ECHO = "INPUTS: a\nOUTPUTS: b\nSPEC: G (a <-> X b)\n"

FIXTURES = {"G b": G_B, "b && !b": CONTRA, "G(a -> X b)": REQUEST, "G(a <-> X b)": ECHO}

# minimal state bound, minimal cycle bound at that state bound (None: unrealizable)
EXPECTED = {"G b": (1, 1), "b && !b": (None, None), "G(a -> X b)": (1, 1), "G(a <-> X b)": (2, 3)}


def spec(name: str):
    return parse_spec(FIXTURES[name])


# left-hand graph of the witness example, vertices renumbered from 0
THREE_CYCLE_EDGES = [(0, 1), (1, 0), (1, 2), (2, 1), (2, 0)]


def three_cycle_graph() -> StateGraph:
    return StateGraph.from_edges(3, THREE_CYCLE_EDGES)


def chain_machine(k: int, escape: bool = False) -> MealyMachine:
    """The trade-off machine for ``gen_theorem4_family(k)``.

    States: ``t0``, ``t1``, then a pair ``(t_i, t_i')`` for positions
    ``2..k+1``; ``t_i'`` remembers that ``a`` was read one step earlier and
    emits ``b``.  The last pair returns to ``t0`` (2^k cycles), or with
    ``escape`` moves to a sink ``t*`` emitting ``c`` (one cycle).
    """
    plain = {i: 2 * i - 2 for i in range(2, k + 2)}   # t_i
    primed = {i: 2 * i - 1 for i in range(2, k + 2)}  # t_i'
    n = 2 * k + 2 + (1 if escape else 0)
    sink = n - 1 if escape else None
    delta = [[0, 0] for _ in range(n)]
    lam = [[frozenset(), frozenset()] for _ in range(n)]
    # letter index 0 = {}, 1 = {a}
    delta[0] = [1, 1]
    lam[0] = [frozenset("c"), frozenset("c")]
    delta[1] = [plain[2], primed[2]]
    for i in range(2, k + 2):
        for src, out in ((plain[i], frozenset()), (primed[i], frozenset("b"))):
            lam[src] = [out, out]
            if i < k + 1:
                delta[src] = [plain[i + 1], primed[i + 1]]
            else:
                delta[src] = [sink, sink] if escape else [0, 0]
    if escape:
        delta[sink] = [sink, sink]
        lam[sink] = [frozenset("c"), frozenset("c")]
    return MealyMachine(("a",), ("b", "c"), n, tuple(map(tuple, delta)), tuple(map(tuple, lam)))
