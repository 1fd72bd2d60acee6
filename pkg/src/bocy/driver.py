"""Bound search, verification and reporting.

The search increases the state bound until bounded synthesis succeeds.  In
cycle mode the cycle count of that machine seeds the cycle bound, which is
then lowered (to one below the cycle count of each new machine, or by
bisection) until the instance becomes UNSAT.  Every returned machine has
passed the run-graph model check and an independent cycle recount, and every
minimal bound comes with the UNSAT row one below it.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field

from .automata import UniversalCoBuchiAutomaton, build_run_graph, ltl_to_uca, run_graph_accepting
from .cycles import DEFAULT_CAP, count_cycles_scc
from .encode_bs import EncodingError, SynthesisResult, synthesize_bs
from .encode_cycles import synthesize_bocy
from .ltl import LassoWord, SpecificationFile
from .machine import MealyMachine
from .solvers import SAT, UNSAT


class VerificationError(RuntimeError):
    pass


@dataclass
class JobConfig:
    spec_path: str | None = None
    mode: str = "bs"
    states: int | None = None
    cycles: int | None = None
    auto: bool = True
    max_states: int = 8
    max_cycles: int | None = None
    solvers: list[str] | None = None
    timeout: float | None = None
    out: str = "text"
    report: str | None = None
    hoa: str | None = None
    cap: int = DEFAULT_CAP
    bisect: bool = False

    def __post_init__(self):
        if self.mode not in ("bs", "bocy"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.states is not None and self.states < 1:
            raise ValueError("--states must be at least 1")
        if self.cycles is not None and self.cycles < 0:
            raise ValueError("--cycles must be non-negative")
        if self.cycles is not None and self.mode != "bocy":
            raise ValueError("a cycle bound needs --mode bocy")


@dataclass
class ReportRow:
    phase: str
    uca_states: int
    n: int
    m: int | None
    status: str
    cycles: str = ""
    seconds: float = 0.0


@dataclass
class RunReport:
    spec: str = ""
    rows: list[ReportRow] = field(default_factory=list)

    COLUMNS = ("spec", "phase", "uca_states", "n", "m", "status", "cycles", "seconds")

    def add(self, row: ReportRow) -> None:
        self.rows.append(row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            d = asdict(r)
            d["spec"] = self.spec
            d["m"] = "" if r.m is None else r.m
            d["seconds"] = f"{r.seconds:.3f}"
            w.writerow(d)
        return buf.getvalue()

    def sat_row(self) -> ReportRow | None:
        sats = [r for r in self.rows if r.status == SAT]
        return sats[-1] if sats else None


@dataclass
class Verdict:
    ok: bool
    cycles: int
    overflow: bool = False
    counterexample: LassoWord | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify(m: MealyMachine, a: UniversalCoBuchiAutomaton, max_cycles: int | None = None,
           cap: int = DEFAULT_CAP) -> Verdict:
    """Run-graph model check plus cycle recount; a failing check carries a lasso."""
    verdict = run_graph_accepting(build_run_graph(m, a))
    res = count_cycles_scc(m, cap=cap, collect=False)
    if not verdict.accepting:
        return Verdict(False, res.count, res.overflow, verdict.word, "machine violates the specification")
    if max_cycles is not None and (res.overflow or res.count > max_cycles):
        return Verdict(False, res.count, res.overflow, None, f"{res} cycles exceed the bound {max_cycles}")
    return Verdict(True, res.count, res.overflow)


@dataclass
class SearchOutcome:
    status: str  # "synthesized" | "unsat" | "ceiling" | "unknown"
    result: SynthesisResult | None
    report: RunReport
    n: int | None = None
    m: int | None = None
    verdict: Verdict | None = None


def _checked(result, uca, bound, cap) -> Verdict:
    v = verify(result.machine, uca, bound, cap)
    if not v.ok:
        raise VerificationError(v.reason + (f" on {v.counterexample}" if v.counterexample else ""))
    return v


def uca_for(spec: SpecificationFile | UniversalCoBuchiAutomaton) -> UniversalCoBuchiAutomaton:
    return spec if isinstance(spec, UniversalCoBuchiAutomaton) else ltl_to_uca(spec)


def search_minimal(spec, mode: str = "bs", config: JobConfig | None = None, name: str = "") -> SearchOutcome:
    cfg = config or JobConfig(mode=mode)
    mode = cfg.mode if config is not None else mode
    uca = uca_for(spec)
    report = RunReport(name)
    size = uca.num_states

    def row(phase, n, m, status, cycles="", secs=0.0):
        report.add(ReportRow(phase, size, n, m, status, cycles, secs))

    # states
    candidates = [cfg.states] if cfg.states is not None else range(1, cfg.max_states + 1)
    found = None
    n = None
    for n in candidates:
        status, res, secs = synthesize_bs(uca, n, cfg.solvers, cfg.timeout)
        if status == SAT:
            v = _checked(res, uca, None, cfg.cap)
            row("bs", n, None, SAT, str(v.cycles), secs)
            found = (res, v)
            break
        row("bs", n, None, status, "", secs)
        if status != UNSAT:
            return SearchOutcome("unknown", None, report, n)
    if found is None:
        return SearchOutcome("unsat" if cfg.states is not None else "ceiling", None, report, n)
    res, v = found
    if mode == "bs":
        return SearchOutcome("synthesized", res, report, n, None, v)

    # cycles, at the state bound just found
    if cfg.cycles is not None:
        status, out, secs = synthesize_bocy(uca, n, cfg.cycles, cfg.solvers, cfg.timeout)
        if status != SAT:
            row("bocy", n, cfg.cycles, status, "", secs)
            return SearchOutcome("unsat" if status == UNSAT else "unknown", None, report, n, cfg.cycles)
        vv = _checked(out, uca, cfg.cycles, cfg.cap)
        row("bocy", n, cfg.cycles, SAT, str(vv.cycles), secs)
        return SearchOutcome("synthesized", out, report, n, cfg.cycles, vv)

    if v.overflow:
        raise VerificationError(f"the bounded-synthesis machine has {count_cycles_scc(res.machine, cap=cfg.cap)} cycles")
    ceiling = cfg.max_cycles if cfg.max_cycles is not None else max(v.cycles, 1) * 4 + 4
    best = None
    m = v.cycles
    # the encoding is complete, so m0 should be SAT; climb if it is not
    while best is None:
        if m > ceiling:
            return SearchOutcome("ceiling", res, report, n, None, v)
        status, out, secs = synthesize_bocy(uca, n, m, cfg.solvers, cfg.timeout)
        if status == SAT:
            vv = _checked(out, uca, m, cfg.cap)
            row("bocy", n, m, SAT, str(vv.cycles), secs)
            best = (out, vv)
        else:
            row("bocy", n, m, status, "", secs)
            if status != UNSAT:
                return SearchOutcome("unknown", res, report, n, m)
            m += 1
    if cfg.bisect:
        lo, hi = -1, best[1].cycles  # lo: UNSAT (or none), hi: SAT
        unsat_at = {}
        while hi - lo > 1:
            mid = (lo + hi) // 2
            status, out, secs = synthesize_bocy(uca, n, mid, cfg.solvers, cfg.timeout)
            if status == SAT:
                vv = _checked(out, uca, mid, cfg.cap)
                row("bocy", n, mid, SAT, str(vv.cycles), secs)
                best = (out, vv)
                hi = min(mid, vv.cycles)
            elif status == UNSAT:
                row("bocy", n, mid, UNSAT, "", secs)
                unsat_at[mid] = True
                lo = mid
            else:
                return SearchOutcome("unknown", best[0], report, n, mid)
        m_min = hi
        if m_min >= 1 and (m_min - 1) not in unsat_at:
            status, _, secs = synthesize_bocy(uca, n, m_min - 1, cfg.solvers, cfg.timeout)
            row("bocy", n, m_min - 1, status, "", secs)
            if status == SAT:
                raise EncodingError("bisection found a SAT instance below the minimum")
    else:
        while True:
            m = best[1].cycles - 1
            if m < 0:
                break
            status, out, secs = synthesize_bocy(uca, n, m, cfg.solvers, cfg.timeout)
            if status == SAT:
                vv = _checked(out, uca, m, cfg.cap)
                row("bocy", n, m, SAT, str(vv.cycles), secs)
                best = (out, vv)
            else:
                row("bocy", n, m, status, "", secs)
                if status != UNSAT:
                    return SearchOutcome("unknown", best[0], report, n, m)
                break
        m_min = best[1].cycles
    out, vv = best
    if vv.cycles != m_min:
        raise VerificationError(f"final machine has {vv.cycles} cycles, minimum claimed {m_min}")
    return SearchOutcome("synthesized", out, report, n, m_min, vv)

