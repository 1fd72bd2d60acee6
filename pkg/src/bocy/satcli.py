"""Minimal DIMACS solver front-end used for portfolio subprocesses.

Reads a DIMACS file (or stdin), prints ``s SATISFIABLE`` plus ``v`` lines or
``s UNSATISFIABLE``, and exits with 10 or 20 like most SAT solvers.
"""
from __future__ import annotations

import argparse
import sys

from .solvers import DPLL_LIMIT, SolverError, dpll, solve_clauses_pysat


def read_dimacs(text: str) -> tuple[int, list[list[int]]]:
    num_vars = 0
    clauses: list[list[int]] = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    if cur:
        clauses.append(cur)
    return num_vars, clauses


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="bocy-sat", description=__doc__)
    ap.add_argument("--solver", default="pysat:cadical153")
    ap.add_argument("file", nargs="?")
    args = ap.parse_args(argv)
    text = open(args.file).read() if args.file else sys.stdin.read()
    num_vars, clauses = read_dimacs(text)
    try:
        if args.solver == "dpll":
            if num_vars > DPLL_LIMIT:
                raise SolverError(f"dpll limited to {DPLL_LIMIT} variables")
            model = dpll(num_vars, clauses)
        elif args.solver.startswith("pysat:"):
            _, model = solve_clauses_pysat(args.solver.split(":", 1)[1], num_vars, clauses)
        else:
            raise SolverError(f"unknown solver {args.solver!r}")
    except SolverError as exc:
        print(f"c {exc}")
        print("s UNKNOWN")
        return 0
    if model is None:
        print("s UNSATISFIABLE")
        return 20
    print("s SATISFIABLE")
    chunk = []
    for x in list(model) + [0]:
        chunk.append(str(x))
        if len(chunk) == 20:
            print("v " + " ".join(chunk))
            chunk = []
    if chunk:
        print("v " + " ".join(chunk))
    return 10


if __name__ == "__main__":
    sys.exit(main())
