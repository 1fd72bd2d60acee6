"""CNF kit gadgets (checked by enumeration) and the solver backends."""
import itertools
import subprocess
import sys

import pytest

from bocy import cnf as C
from bocy.cnf import CnfError, CnfInstance, Model, to_bits, width_for
from bocy.satcli import read_dimacs
from bocy.solvers import (
    DPLL_LIMIT,
    SAT,
    UNSAT,
    SolverDisagreement,
    SolverError,
    default_backends,
    dpll,
    parse_solver_output,
    solve,
    solve_all,
)


def models_over(cnf: CnfInstance, free: list[int]):
    """Assignments of ``free`` that extend to a model (auxiliaries by brute force)."""
    others = [v for v in range(1, cnf.num_vars + 1) if v not in free]
    assert len(free) + len(others) <= 20
    found = set()
    for bits in itertools.product((False, True), repeat=len(free)):
        for rest in itertools.product((False, True), repeat=len(others)):
            vals = [False] * (cnf.num_vars + 1)
            for v, b in zip(free, bits):
                vals[v] = b
            for v, b in zip(others, rest):
                vals[v] = b
            if cnf.check(Model(tuple(vals))):
                found.add(bits)
                break
    return found


class TestExactlyOne:
    @pytest.mark.parametrize("k", [1, 2, 3, 6, 7, 9])
    def test_one_hot(self, k):
        c = CnfInstance()
        xs = [c.var(("x", i)) for i in range(k)]
        c.exactly_one(xs)
        got = models_over(c, xs)
        assert got == {tuple(i == j for j in range(k)) for i in range(k)}

    def test_single_is_unit(self):
        c = CnfInstance()
        x = c.var("x")
        c.exactly_one([x])
        assert c.clauses == [(x,)]

    def test_empty(self):
        with pytest.raises(CnfError):
            CnfInstance().exactly_one([])

    def test_guarded(self):
        c = CnfInstance()
        g, x, y = c.var("g"), c.var("x"), c.var("y")
        c.exactly_one([x, y], guard=[g])
        got = models_over(c, [g, x, y])
        assert (False, False, False) in got and (True, False, False) not in got
        assert (True, True, False) in got and (True, True, True) not in got


class TestCompare:
    RELS = {"<": int.__lt__, "<=": int.__le__, "=": int.__eq__, "!=": int.__ne__, ">=": int.__ge__, ">": int.__gt__}

    @pytest.mark.parametrize("rel", list(RELS))
    @pytest.mark.parametrize("wa, wb", [(1, 1), (2, 2), (2, 3), (3, 1)])
    def test_vectors(self, rel, wa, wb):
        c = CnfInstance()
        a = c.bits(lambda i: ("a", i), wa)
        b = c.bits(lambda i: ("b", i), wb)
        c.assert_compare(a, b, rel)
        got = models_over(c, a + b)
        want = set()
        for x in range(1 << wa):
            for y in range(1 << wb):
                if self.RELS[rel](x, y):
                    want.add(tuple(to_bits(x, wa) + to_bits(y, wb)))
        assert got == want

    @pytest.mark.parametrize("rel", list(RELS))
    @pytest.mark.parametrize("const", [0, 1, 2, 3, 5])
    def test_constants(self, rel, const):
        c = CnfInstance()
        a = c.bits(lambda i: ("a", i), 2)
        c.assert_compare(a, const, rel)
        got = {Model((False,) + bits).number(a) for bits in models_over(c, a)} if c.num_vars else set()
        assert got == {x for x in range(4) if self.RELS[rel](x, const)}

    def test_le_two(self):
        c = CnfInstance()
        a = c.bits(lambda i: ("a", i), 2)
        c.assert_compare(a, 2, "<=")
        assert len(models_over(c, a)) == 3

    def test_reflexive_equality(self):
        c = CnfInstance()
        a = c.bits(lambda i: ("a", i), 3)
        assert c.compare(a, a, "=") is True

    def test_bad_relation(self):
        c = CnfInstance()
        with pytest.raises(CnfError):
            c.compare([c.var("a")], 1, "~")


class TestAllocation:
    def test_dense_ids_and_tags(self):
        c = CnfInstance()
        ids = [c.var(C.trans(0, 0, t)) for t in range(3)]
        assert ids == [1, 2, 3] and c.var(C.trans(0, 0, 1)) == 2
        assert c.tag_of(-2) == ("trans", 0, 0, 1)

    def test_every_family_has_a_tag(self):
        tags = [C.trans(0, 0, 0), C.label(0, 0, "b"), C.rgstate(0, 0), C.annotation_bit(0, 0, 0), C.edge(0, 0),
                C.bedge(0, 0), C.redge(0, 0), C.wtree_bit(0, 0), C.allowed(0, 0), C.rbound_bit(0, 0),
                C.scc_bit(0, 0, 0), C.fedge(0, 0, 0), C.bedge_scc(0, 0, 0), C.frank_bit(0, 0, 0), C.brank_bit(0, 0, 0)]
        assert len({t[0] for t in tags}) == len(tags)

    def test_unallocated_literal(self):
        with pytest.raises(CnfError):
            CnfInstance().add([1])

    def test_empty_clause_is_contradiction(self):
        c = CnfInstance()
        c.add([False])
        assert solve(c, ["dpll"]).status == UNSAT

    def test_width(self):
        assert [width_for(v) for v in (0, 1, 2, 3, 4, 7, 8)] == [1, 1, 2, 2, 3, 3, 4]


class TestDimacs:
    def test_format(self):
        c = CnfInstance()
        x, y = c.var("x"), c.var("y")
        c.add([x, -y])
        assert c.to_dimacs() == b"p cnf 2 1\n1 -2 0\n"

    def test_read_back(self, tmp_path):
        c = CnfInstance()
        xs = [c.var(i) for i in range(4)]
        c.exactly_one(xs)
        path = tmp_path / "x.cnf"
        path.write_bytes(c.to_dimacs(comments=True))
        n, clauses = read_dimacs(path.read_text())
        assert n == c.num_vars and [tuple(cl) for cl in clauses] == c.clauses


def contradiction():
    c = CnfInstance()
    x = c.var("x")
    c.add([x])
    c.add([-x])
    return c


def one_hot3():
    c = CnfInstance()
    xs = [c.var(("x", i)) for i in range(3)]
    c.exactly_one(xs)
    return c, xs


class TestSolvers:
    @pytest.mark.parametrize("backend", ["dpll", "pysat:cadical153", "pysat:minisat22", "pysat:glucose4"])
    def test_unsat(self, backend):
        assert solve(contradiction(), [backend]).status == UNSAT

    @pytest.mark.parametrize("backend", ["dpll", "pysat:cadical153", "pysat:minisat22"])
    def test_one_hot_model(self, backend):
        c, xs = one_hot3()
        res = solve(c, [backend])
        assert res.status == SAT and sum(res.model.lit(x) for x in xs) == 1

    def test_dpll_limit(self):
        c = CnfInstance()
        for i in range(DPLL_LIMIT + 1):
            c.var(i)
        with pytest.raises(SolverError):
            solve(c, ["dpll"])

    def test_dpll_direct(self):
        assert dpll(2, [(1, 2), (-1,), (-2,)]) is None
        assert dpll(2, [(1, 2), (-1,)]) is not None

    def test_portfolio_subprocesses(self):
        c, xs = one_hot3()
        res = solve(c, ["pysat:minisat22", "pysat:cadical153"], timeout=60)
        assert res.status == SAT and sum(res.model.lit(x) for x in xs) == 1
        assert res.backend in ("pysat:minisat22", "pysat:cadical153")

    def test_solve_all_agree(self):
        for inst in (contradiction(), one_hot3()[0]):
            res = solve_all(inst, ["pysat:minisat22", "pysat:cadical153"], in_process=False, timeout=60)
            assert len({r.status for r in res}) == 1

    def test_external_command(self, tmp_path):
        cmd = f"{sys.executable} -m bocy.satcli --solver pysat:minisat22"
        assert solve(contradiction(), [cmd], timeout=60).status == UNSAT

    def test_disagreement_detected(self, tmp_path):
        liar = tmp_path / "liar.py"
        liar.write_text("import sys\nprint('s UNSATISFIABLE')\nsys.exit(20)\n")
        c, _ = one_hot3()
        with pytest.raises(SolverDisagreement):
            solve_all(c, ["pysat:minisat22", f"{sys.executable} {liar}"], timeout=60, in_process=False)

    def test_bogus_model_rejected(self, tmp_path):
        fake = tmp_path / "fake.py"
        fake.write_text("import sys\nprint('s SATISFIABLE')\nprint('v 1 0')\nsys.exit(10)\n")
        with pytest.raises(SolverError):
            solve(contradiction(), [f"{sys.executable} {fake}"], timeout=60)

    def test_timeout_gives_unknown(self, tmp_path):
        slow = tmp_path / "slow.py"
        slow.write_text("import time\ntime.sleep(30)\n")
        res = solve(contradiction(), [f"{sys.executable} {slow}"], timeout=0.5)
        assert res.status == "UNKNOWN"

    def test_env_default(self, monkeypatch):
        monkeypatch.setenv("BOCY_SOLVERS", "dpll, pysat:minisat22")
        assert default_backends() == ["dpll", "pysat:minisat22"]
        monkeypatch.delenv("BOCY_SOLVERS")
        assert default_backends() == ["pysat:cadical153"]

    def test_output_parsing(self):
        status, model = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 10, 3)
        assert status == SAT and model.values == (False, True, False, True)
        assert parse_solver_output("", 20, 3) == (UNSAT, None)

    def test_satcli_exit_codes(self, tmp_path):
        path = tmp_path / "u.cnf"
        path.write_bytes(contradiction().to_dimacs())
        proc = subprocess.run([sys.executable, "-m", "bocy.satcli", "--solver", "dpll", str(path)],
                              capture_output=True, text=True)
        assert proc.returncode == 20 and "s UNSATISFIABLE" in proc.stdout
