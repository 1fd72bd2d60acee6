"""Formula families exercising the state/cycle constructions, and ``synth-bench``.

* ``gadget``: conjoin ``G (a <-> X b)`` with a fresh input ``a`` and a fresh
  output ``b``; every implementation then has at least ``2^l`` cycles when
  the base forces a cycle of length ``l``.
* ``theorem3``: the monitor family whose implementations need very long
  cycles; generator only, synthesis on it is out of desk scale.
* ``theorem4``: the family where the state-minimal machine has ``2^k``
  cycles and one extra state brings the count down to one.
"""
from __future__ import annotations

import argparse
import sys

from .ltl import (
    And,
    Atom,
    Finally,
    Globally,
    Iff,
    Implies,
    Next,
    Not,
    SpecificationFile,
    conj,
    next_n,
    parse_spec,
    read_spec,
)


def _fresh(name: str, taken: set[str]) -> str:
    if name not in taken:
        return name
    i = 1
    while f"{name}{i}" in taken:
        i += 1
    return f"{name}{i}"


def gen_blowup_gadget(base: SpecificationFile) -> SpecificationFile:
    taken = set(base.inputs) | set(base.outputs)
    a = _fresh("a", taken)
    b = _fresh("b", taken | {a})
    gadget = Globally(Iff(Atom(a), Next(Atom(b))))
    return SpecificationFile(base.inputs + (a,), base.outputs + (b,), And(base.formula, gadget))


def gen_theorem3_family(n: int) -> SpecificationFile:
    if n < 1:
        raise ValueError("n must be at least 1")
    group = {x: [f"{x}{i}" for i in range(1, n + 1)] for x in "abcd"}
    prem = Finally(conj(Implies(Atom(a), Finally(Atom(b))) for a, b in zip(group["a"], group["b"])))
    con = Finally(conj(Implies(Atom(c), Finally(Atom(d))) for c, d in zip(group["c"], group["d"])))
    formula = Iff(Globally(Implies(prem, con)), Globally(Finally(Atom("s"))))
    inputs = tuple(group["a"] + group["b"] + group["c"] + group["d"])
    return SpecificationFile(inputs, ("s",), formula)


def gen_theorem4_family(k: int) -> SpecificationFile:
    if k < 1:
        raise ValueError("k must be at least 1")
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    frame = And(Not(b), c)
    middle = [next_n(conj([Not(c), Next(Not(c)), Iff(a, Next(b))]), i) for i in range(1, k + 1)]
    return SpecificationFile(("a",), ("b", "c"), conj([frame, next_n(frame, k + 2)] + middle))


BASE_GADGET = "OUTPUTS: c\nSPEC: G c\n"


def family(name: str, param: int, base: SpecificationFile | None = None) -> SpecificationFile:
    if name == "theorem3":
        return gen_theorem3_family(param)
    if name == "theorem4":
        return gen_theorem4_family(param)
    if name == "gadget":
        spec = base or parse_spec(BASE_GADGET)
        for _ in range(param):
            spec = gen_blowup_gadget(spec)
        return spec
    raise ValueError(f"unknown family {name!r}")


def main(argv=None) -> int:
    from .driver import JobConfig, search_minimal

    ap = argparse.ArgumentParser(prog="synth-bench", description="Generate benchmark specifications or run them.")
    ap.add_argument("family", choices=["gadget", "theorem3", "theorem4"])
    ap.add_argument("param", type=int, help="family parameter (gadget: number of applications)")
    ap.add_argument("--emit", choices=["spec", "run"], default="spec")
    ap.add_argument("--base", help="base specification for the gadget family (default: G c)")
    ap.add_argument("--mode", choices=["bs", "bocy"], default="bocy")
    ap.add_argument("--max-states", type=int, default=8)
    ap.add_argument("--solver", action="append")
    ap.add_argument("--timeout", type=float)
    args = ap.parse_args(argv)
    try:
        base = read_spec(args.base) if args.base else None
        spec = family(args.family, args.param, base)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if args.emit == "spec":
        sys.stdout.write(spec.format())
        return 0
    cfg = JobConfig(mode=args.mode, max_states=args.max_states, solvers=args.solver, timeout=args.timeout)
    outcome = search_minimal(spec, config=cfg, name=f"{args.family}-{args.param}")
    sys.stdout.write(outcome.report.to_csv())
    return {"synthesized": 0, "unsat": 1, "ceiling": 2}.get(outcome.status, 2)


if __name__ == "__main__":
    sys.exit(main())
