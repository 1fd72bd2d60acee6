"""``synth``: bounded (cycle) synthesis from the command line.

Exit codes: 0 synthesized, 1 bounds UNSAT, 2 ceiling reached or no
definitive solver answer, 3 input error, 4 internal verification failure.
"""
from __future__ import annotations

import argparse
import sys

from .driver import JobConfig, VerificationError, search_minimal
from .encode_bs import EncodingError
from .hoa import HoaError, import_hoa
from .ltl import SpecError, read_spec
from .machine import format_machine, to_dot
from .solvers import SolverError

EXIT = {"synthesized": 0, "unsat": 1, "ceiling": 2, "unknown": 2}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="synth", description="Synthesize a Mealy machine with bounded states and cycles.")
    ap.add_argument("spec", help="specification file (INPUTS/OUTPUTS/SPEC); with --hoa only its signals are used")
    ap.add_argument("--mode", choices=["bs", "bocy"], default="bs")
    ap.add_argument("--states", type=int, help="fix the state bound instead of searching")
    ap.add_argument("--cycles", type=int, help="fix the cycle bound (bocy mode)")
    ap.add_argument("--auto", action="store_true", help="search minimal bounds (default when no bound is fixed)")
    ap.add_argument("--max-states", type=int, default=8, help="state ceiling of the search")
    ap.add_argument("--max-cycles", type=int, help="cycle ceiling while climbing from the bounded-synthesis machine")
    ap.add_argument("--bisect", action="store_true", help="lower the cycle bound by bisection")
    ap.add_argument("--solver", action="append", help="backend (pysat:NAME, dpll, or a command); repeat for a portfolio")
    ap.add_argument("--timeout", type=float, help="per-instance solver timeout in seconds")
    ap.add_argument("--out", choices=["dot", "text"], default="text")
    ap.add_argument("--report", choices=["csv"], help="print the run report after the machine")
    ap.add_argument("--report-file", help="write the run report to this file instead")
    ap.add_argument("--hoa", help="read the automaton from a Buchi HOA file for the negated specification")
    ap.add_argument("--cap", type=int, default=10_000_000, help="cycle-count cap of the verifier")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.auto and (args.states is not None or args.cycles is not None):
            raise ValueError("--auto searches the bounds; drop --states/--cycles")
        if args.max_states < 1 or args.cap < 1:
            raise ValueError("--max-states and --cap must be positive")
        cfg = JobConfig(spec_path=args.spec, mode=args.mode, states=args.states, cycles=args.cycles,
                        auto=args.states is None, max_states=args.max_states, max_cycles=args.max_cycles,
                        solvers=args.solver, timeout=args.timeout, out=args.out, report=args.report,
                        hoa=args.hoa, cap=args.cap, bisect=args.bisect)
        spec = read_spec(args.spec)
        source = import_hoa(args.hoa, spec.inputs, spec.outputs) if args.hoa else spec
    except SpecError as exc:
        print(f"{args.spec}: {exc}", file=sys.stderr)
        return 3
    except (HoaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    try:
        outcome = search_minimal(source, config=cfg, name=args.spec)
    except (VerificationError, EncodingError, SolverError) as exc:
        print(f"internal failure: {exc}", file=sys.stderr)
        return 4
    csv_text = outcome.report.to_csv()
    if args.report_file:
        with open(args.report_file, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    if outcome.status == "synthesized":
        m = outcome.result.machine
        sys.stdout.write(to_dot(m) if args.out == "dot" else format_machine(m))
        print(f"# states {outcome.n}, cycles {outcome.verdict.cycles}, verified", file=sys.stderr)
    elif outcome.status == "unsat":
        print(f"UNSAT for n={outcome.n}" + (f", m={outcome.m}" if outcome.m is not None else ""), file=sys.stderr)
    elif outcome.status == "ceiling":
        print(f"unrealizable up to the bound (n <= {outcome.n})", file=sys.stderr)
    else:
        print("no definitive solver answer (timeout or solver failure)", file=sys.stderr)
    if args.report and not args.report_file:
        sys.stdout.write(("\n" if outcome.status == "synthesized" else "") + csv_text)
    return EXIT[outcome.status]


if __name__ == "__main__":
    sys.exit(main())
