"""SAT backends and the portfolio runner.

A backend is named by a string:

``pysat:<name>``
    a solver from python-sat (``minisat22``, ``cadical153``, ``glucose4`` ...)
``dpll``
    the tiny built-in DPLL, for instances of at most 60 variables
anything else
    an external command; the DIMACS file path is appended as last argument
    and the usual ``s``/``v`` output lines are parsed

python-sat holds the GIL while solving, so a portfolio of several backends,
or any run with a timeout, puts every backend in its own process and kills
the losers.  A single pysat backend without a timeout runs in-process.
"""
from __future__ import annotations

import os
import shlex
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass, field

from .cnf import CnfInstance, Model

ENV_SOLVERS = "BOCY_SOLVERS"
DEFAULT_SOLVERS = ("pysat:cadical153",)
DPLL_LIMIT = 60

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"


class SolverError(RuntimeError):
    pass


class SolverDisagreement(SolverError):
    pass


@dataclass(frozen=True)
class SolveResult:
    status: str
    model: Model | None = None
    backend: str = ""
    seconds: float = 0.0
    detail: str = ""

    @property
    def sat(self) -> bool:
        return self.status == SAT

    @property
    def definitive(self) -> bool:
        return self.status in (SAT, UNSAT)


def default_backends() -> list[str]:
    env = os.environ.get(ENV_SOLVERS, "").strip()
    if env:
        return [s.strip() for s in env.split(",") if s.strip()]
    return list(DEFAULT_SOLVERS)


# --------------------------------------------------------------------------
# In-process solving
# --------------------------------------------------------------------------


def solve_clauses_pysat(name: str, num_vars: int, clauses) -> tuple[str, list[int] | None]:
    from pysat.solvers import Solver

    with Solver(name=name, bootstrap_with=clauses) as s:
        if s.solve():
            return SAT, s.get_model() or []
        return UNSAT, None


def dpll(num_vars: int, clauses) -> list[int] | None:
    """Plain DPLL with unit propagation; returns a model or ``None``."""
    if num_vars > DPLL_LIMIT:
        raise SolverError(f"the built-in DPLL is limited to {DPLL_LIMIT} variables, got {num_vars}")
    clauses = [list(c) for c in clauses]

    def propagate(assign: dict) -> bool:
        changed = True
        while changed:
            changed = False
            for c in clauses:
                free, sat = [], False
                for x in c:
                    v = assign.get(abs(x))
                    if v is None:
                        free.append(x)
                    elif v == (x > 0):
                        sat = True
                        break
                if sat:
                    continue
                if not free:
                    return False
                if len(free) == 1:
                    assign[abs(free[0])] = free[0] > 0
                    changed = True
        return True

    def rec(assign: dict) -> dict | None:
        if not propagate(assign):
            return None
        for v in range(1, num_vars + 1):
            if v not in assign:
                for val in (False, True):
                    trial = dict(assign)
                    trial[v] = val
                    got = rec(trial)
                    if got is not None:
                        return got
                return None
        return assign

    got = rec({})
    if got is None:
        return None
    return [v if got.get(v, False) else -v for v in range(1, num_vars + 1)]


def _solve_inprocess(spec: str, cnf: CnfInstance) -> SolveResult:
    start = time.perf_counter()
    if spec == "dpll":
        model = dpll(cnf.num_vars, cnf.clauses)
        status = SAT if model is not None else UNSAT
    elif spec.startswith("pysat:"):
        status, model = solve_clauses_pysat(spec.split(":", 1)[1], cnf.num_vars, cnf.clauses)
    else:
        raise SolverError(f"{spec} cannot run in-process")
    m = Model.from_lits(model, cnf.num_vars) if model is not None else None
    return SolveResult(status, m, spec, time.perf_counter() - start)


# --------------------------------------------------------------------------
# Processes
# --------------------------------------------------------------------------


def command_for(spec: str) -> list[str]:
    if spec == "dpll" or spec.startswith("pysat:"):
        return [sys.executable, "-m", "bocy.satcli", "--solver", spec]
    return shlex.split(spec)


def parse_solver_output(text: str, returncode: int, num_vars: int) -> tuple[str, Model | None]:
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            else:
                status = UNKNOWN
        elif line.startswith("v "):
            lits.extend(int(x) for x in line[2:].split())
    if status is None:
        status = {10: SAT, 20: UNSAT}.get(returncode, UNKNOWN)
    if status == SAT:
        if not lits:
            raise SolverError("solver reported SAT without a model")
        return SAT, Model.from_lits(lits, num_vars)
    return status, None


@dataclass
class _Race:
    done: threading.Event = field(default_factory=threading.Event)
    lock: threading.Lock = field(default_factory=threading.Lock)
    results: dict = field(default_factory=dict)
    winner: str | None = None


def _run_process(spec: str, path: str, num_vars: int, procs: dict, race: _Race, timeout):
    start = time.perf_counter()
    try:
        proc = subprocess.Popen(command_for(spec) + [path], stdout=subprocess.PIPE,
                                stderr=subprocess.PIPE, text=True)
    except OSError as exc:
        res = SolveResult(UNKNOWN, None, spec, 0.0, f"cannot start: {exc}")
    else:
        procs[spec] = proc
        try:
            out, err = proc.communicate(timeout=timeout)
            status, model = parse_solver_output(out, proc.returncode, num_vars)
            detail = "" if status != UNKNOWN else (err.strip()[-200:] or f"exit code {proc.returncode}")
            res = SolveResult(status, model, spec, time.perf_counter() - start, detail)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            res = SolveResult(UNKNOWN, None, spec, time.perf_counter() - start, "timeout")
        except SolverError as exc:
            res = SolveResult(UNKNOWN, None, spec, time.perf_counter() - start, str(exc))
    with race.lock:
        race.results[spec] = res
        if res.definitive and race.winner is None:
            race.winner = spec
            race.done.set()


def _race(cnf: CnfInstance, backends: list[str], timeout, wait_all: bool) -> dict[str, SolveResult]:
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="bocy-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(cnf.to_dimacs())
        race = _Race()
        procs: dict = {}
        threads = [threading.Thread(target=_run_process, args=(b, path, cnf.num_vars, procs, race, timeout),
                                    daemon=True) for b in backends]
        for t in threads:
            t.start()
        if not wait_all:
            while not race.done.is_set() and any(t.is_alive() for t in threads):
                race.done.wait(0.05)
            for p in list(procs.values()):
                if p.poll() is None:
                    p.kill()
        for t in threads:
            t.join()
        return race.results
    finally:
        os.unlink(path)


def _check_model(cnf: CnfInstance, res: SolveResult) -> SolveResult:
    if res.sat and not cnf.check(res.model):
        raise SolverError(f"{res.backend} returned a model that violates the instance")
    return res


def solve(cnf: CnfInstance, backends: list[str] | None = None, timeout: float | None = None) -> SolveResult:
    """First definitive answer of the portfolio; ties go to the first registered backend."""
    backends = list(backends or default_backends())
    if not backends:
        raise SolverError("no solver backend configured")
    if len(backends) == 1 and timeout is None and (backends[0] == "dpll" or backends[0].startswith("pysat:")):
        return _check_model(cnf, _solve_inprocess(backends[0], cnf))
    results = _race(cnf, backends, timeout, wait_all=False)
    finished = [results[b] for b in backends if b in results and results[b].definitive]
    if not finished:
        details = "; ".join(f"{b}: {results[b].detail}" for b in backends if b in results)
        return SolveResult(UNKNOWN, None, ",".join(backends), 0.0, details)
    first = min(finished, key=lambda r: (r.seconds, backends.index(r.backend)))
    for other in finished:
        if other.status != first.status:
            raise SolverDisagreement(f"{first.backend} says {first.status}, {other.backend} says {other.status}")
    return _check_model(cnf, first)


def solve_all(cnf: CnfInstance, backends: list[str], timeout: float | None = None,
              in_process: bool = True) -> list[SolveResult]:
    """Run every backend to completion and insist that they agree."""
    if in_process and all(b == "dpll" or b.startswith("pysat:") for b in backends):
        results = [_solve_inprocess(b, cnf) for b in backends]
    else:
        got = _race(cnf, backends, timeout, wait_all=True)
        results = [got[b] for b in backends]
    statuses = {r.status for r in results if r.definitive}
    if len(statuses) > 1:
        raise SolverDisagreement("; ".join(f"{r.backend}={r.status}" for r in results))
    for r in results:
        _check_model(cnf, r)
    return results
