"""Cycle-bound encodings: SCC labelling, witness forests, and exact tightness on small graphs."""
import random

import pytest

from bocy.automata import ltl_to_uca
from bocy.bench import gen_theorem4_family
from bocy.cnf import CnfInstance
from bocy.cycles import count_cycles_scc, extract_witness_from_graph, validate_witness_forest
from bocy.encode_cycles import (
    decode_scc_labels,
    decode_witness,
    encode_bocy,
    encode_graph_bound,
    encode_scc,
    expected_variable_counts,
    synthesize_bocy,
    tarjan_partition,
)
from bocy.machine import StateGraph
from bocy.solvers import SAT, UNSAT, solve

from fixtures import THREE_CYCLE_EDGES, three_cycle_graph, spec
from oracles import all_graphs, brute_cycles, random_graph


def scc_instance(g: StateGraph):
    cnf = CnfInstance()
    enc = encode_scc(g.num_vertices, cnf)
    for t in range(g.num_vertices):
        for t2 in range(g.num_vertices):
            cnf.add([enc.edge(t, t2) if g.has_edge(t, t2) else -enc.edge(t, t2)])
    return enc


def partitions(enc, model):
    out = []
    for labels in decode_scc_labels(enc, model):
        parts = {}
        for t, lab in labels.items():
            parts.setdefault(lab, set()).add(t)
        out.append({frozenset(p) for p in parts.values()})
    return out


def bound_status(g, m, copies=None):
    return solve(encode_graph_bound(g, m, copies).cnf).status


class TestSccEncoding:
    def test_self_loop(self):
        enc = scc_instance(StateGraph.from_edges(1, [(0, 0)]))
        res = solve(enc.cnf)
        assert res.sat
        assert res.model.number(enc.frank(0, 0)) == 0 == res.model.number(enc.brank(0, 0))

    def test_two_cycle(self):
        g = StateGraph.from_edges(2, [(0, 1), (1, 0)])
        enc = scc_instance(g)
        res = solve(enc.cnf)
        assert partitions(enc, res.model) == [{frozenset({0, 1})}, {frozenset({1})}]

    def test_agrees_with_tarjan(self):
        rng = random.Random(21)
        for _ in range(150):
            g = random_graph(rng, rng.randint(1, 6))
            enc = scc_instance(g)
            res = solve(enc.cnf)
            assert res.sat
            got = partitions(enc, res.model)
            assert got == [tarjan_partition(g, k) for k in range(g.num_vertices)]

    def test_merging_components_is_impossible(self):
        # 0 -> 1 without a way back: claiming one component must fail
        g = StateGraph.from_edges(2, [(0, 1)])
        enc = scc_instance(g)
        enc.cnf.assert_compare(enc.scc(0, 0), enc.scc(0, 1), "=")
        assert solve(enc.cnf).status == UNSAT

    def test_splitting_components_is_impossible(self):
        g = StateGraph.from_edges(2, [(0, 1), (1, 0)])
        enc = scc_instance(g)
        enc.cnf.assert_compare(enc.scc(0, 0), enc.scc(0, 1), "!=")
        assert solve(enc.cnf).status == UNSAT


class TestGraphBound:
    """SAT exactly when the bound reaches the true cycle count."""

    def test_exhaustive_small(self):
        for n in (1, 2, 3):
            for g in all_graphs(n):
                c = len(brute_cycles(g))
                assert bound_status(g, c) == SAT
                if c:
                    assert bound_status(g, c - 1) == UNSAT

    def test_random_four_and_five(self):
        rng = random.Random(5)
        for _ in range(60):
            g = random_graph(rng, rng.randint(4, 5), 0.35)
            c = len(brute_cycles(g))
            if c > 8:
                continue
            assert bound_status(g, c) == SAT
            if c:
                assert bound_status(g, c - 1) == UNSAT

    def test_m_copies_suffice(self):
        # with literal completeness this graph needed a fourth copy of vertex 3
        g = StateGraph.from_edges(4, [(0, 2), (1, 3), (2, 0), (2, 1), (2, 3), (3, 2)])
        assert len(brute_cycles(g)) == 3
        assert bound_status(g, 3) == SAT
        assert bound_status(g, 2) == UNSAT

    def test_zero_bound(self):
        assert bound_status(StateGraph.from_edges(3, [(0, 1), (1, 2)]), 0) == SAT
        assert bound_status(StateGraph.from_edges(1, [(0, 0)]), 0) == UNSAT

    def test_three_cycle_forest(self):
        g = three_cycle_graph()
        cs = encode_graph_bound(g, 3)
        res = solve(cs.cnf)
        forest = decode_witness(cs, res.model)
        ref = extract_witness_from_graph(g)
        assert forest.red_per_root() == ref.red_per_root() == (2, 1, 0)
        assert sorted(t.size for t in forest.trees) == sorted(t.size for t in ref.trees)
        assert validate_witness_forest(forest, g).ok
        assert sorted(g.edges) == sorted(THREE_CYCLE_EDGES)

    def test_extra_copies_do_not_change_answers(self):
        g = three_cycle_graph()
        assert bound_status(g, 2, copies=5) == UNSAT
        assert bound_status(g, 3, copies=5) == SAT


class TestVariableCounts:
    @pytest.mark.parametrize("n, m, copies", [(1, 1, None), (2, 3, None), (3, 2, None), (4, 4, None), (3, 0, None),
                                              (3, 2, 4)])
    def test_closed_form(self, n, m, copies):
        a = ltl_to_uca(spec("G(a <-> X b)"))
        enc = encode_bocy(a, n, m, copies)
        counts = enc.cnf.family_counts()
        for family, want in expected_variable_counts(n, m, copies).items():
            assert counts.get(family, 0) == want, family


class TestBocy:
    def test_globally_b(self):
        status, res, _ = synthesize_bocy(ltl_to_uca(spec("G b")), 1, 1)
        assert status == SAT
        tree = res.forest.trees[0]
        assert tree.size == 1 and tree.red == frozenset({(0, 0)})
        assert res.rbound == (1,)
        assert synthesize_bocy(ltl_to_uca(spec("G b")), 1, 0)[0] == UNSAT

    def test_echo_needs_three_cycles(self):
        a = ltl_to_uca(spec("G(a <-> X b)"))
        status, res, _ = synthesize_bocy(a, 2, 3)
        assert status == SAT and res.cycles == 3 == res.forest.total_red
        assert synthesize_bocy(a, 2, 2)[0] == UNSAT
        # extra states do not help here: the two memory states and their edges are forced
        assert synthesize_bocy(a, 3, 2)[0] == UNSAT
        assert synthesize_bocy(a, 4, 2)[0] == UNSAT

    def test_decoded_results(self):
        a = ltl_to_uca(spec("G(a <-> X b)"))
        for m in (3, 4, 6):
            status, res, _ = synthesize_bocy(a, 2, m)
            assert status == SAT
            g_count = count_cycles_scc(res.machine).count
            assert g_count == res.cycles <= res.forest.total_red <= m
            assert list(res.rbound) == sorted(set(res.rbound))

    def test_tradeoff_k1(self):
        a = ltl_to_uca(gen_theorem4_family(1))
        assert synthesize_bocy(a, 3, 8)[0] == UNSAT
        status, res, _ = synthesize_bocy(a, 4, 2)
        assert status == SAT and res.cycles == 2
        assert synthesize_bocy(a, 4, 1)[0] == UNSAT
        status, res, _ = synthesize_bocy(a, 5, 1)
        assert status == SAT and res.cycles == 1
