"""Mealy machines, graph abstraction and serialisation."""
import pytest

from bocy.cycles import count_cycles_scc
from bocy.ltl import LassoWord
from bocy.machine import (
    MachineFormatError,
    MealyMachine,
    StateGraph,
    abstract_graph,
    enumerate_paths,
    format_machine,
    parse_machine,
    reachable_states,
    to_dot,
)

from fixtures import chain_machine

E = frozenset()


def two_state():
    # t0 stays on {}, moves to t1 on {a}; t1 always returns
    return MealyMachine(("a",), ("b",), 2, ((0, 1), (0, 0)), ((E, E), (frozenset("b"), frozenset("b"))))


class TestAbstraction:
    def test_single_self_loop(self):
        m = MealyMachine(("a",), (), 1, ((0, 0),), ((E, E),))
        g = abstract_graph(m)
        assert g.num_vertices == 1 and g.edges == [(0, 0)]

    def test_projection(self):
        g = abstract_graph(two_state())
        assert set(g.edges) == {(0, 0), (0, 1), (1, 0)}

    def test_escape_chain_has_one_cycle(self):
        for k in (1, 2, 3):
            assert count_cycles_scc(chain_machine(k, escape=True)).count == 1

    def test_chain_has_exponentially_many_cycles(self):
        for k in (1, 2, 3):
            assert count_cycles_scc(chain_machine(k)).count == 2 ** k

    def test_edge_bound(self):
        m = chain_machine(2)
        assert len(abstract_graph(m).edges) <= m.num_states * m.num_letters

    def test_induced(self):
        g = StateGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)]).induced({1, 2})
        assert g.edges == [(1, 2)]

    def test_out_of_range_edge(self):
        with pytest.raises(ValueError):
            StateGraph.from_edges(2, [(0, 2)])


class TestPaths:
    def test_constant_input(self):
        m = MealyMachine((), ("b",), 1, ((0,),), ((frozenset("b"),),))
        assert enumerate_paths(m, LassoWord.of([], [set()])) == LassoWord.of([], [{"b"}])

    def test_chain_emits_b_one_step_after_a(self):
        m = chain_machine(2)
        w = enumerate_paths(m, LassoWord.of([set(), {"a"}], [set()]))
        assert [w.letter(i) for i in range(5)] == [
            frozenset("c"), frozenset("a"), frozenset("b"), frozenset(), frozenset("c")]

    def test_deterministic(self):
        m = two_state()
        w = LassoWord.of([{"a"}], [set(), {"a"}])
        assert enumerate_paths(m, w) == enumerate_paths(m, w)

    def test_loop_unrolled_until_state_repeats(self):
        w = enumerate_paths(two_state(), LassoWord.of([], [{"a"}]))
        assert len(w.loop) <= 2 * 1
        assert w.letter(0) == frozenset("a") and w.letter(1) == frozenset({"a", "b"})

    def test_reachable_states(self):
        m = MealyMachine((), (), 3, ((1,), (1,), (0,)), ((E,), (E,), (E,)))
        assert reachable_states(m) == [0, 1]


class TestValidation:
    def test_partial_delta(self):
        with pytest.raises(ValueError):
            MealyMachine(("a",), (), 1, ((0,),), ((E,),))

    def test_undeclared_output(self):
        with pytest.raises(ValueError):
            MealyMachine((), ("b",), 1, ((0,),), ((frozenset("c"),),))


class TestText:
    def test_round_trip(self):
        for m in (two_state(), chain_machine(2), chain_machine(1, escape=True)):
            assert parse_machine(format_machine(m)) == m

    def test_golden(self):
        assert format_machine(two_state()) == (
            "INPUTS: a\nOUTPUTS: b\nSTATES: 2\nINITIAL: 0\n"
            "0 {} -> 0 / {}\n0 {a} -> 1 / {}\n1 {} -> 0 / {b}\n1 {a} -> 0 / {b}\n"
        )

    def test_missing_transition(self):
        with pytest.raises(MachineFormatError, match="missing"):
            parse_machine("INPUTS: a\nOUTPUTS:\nSTATES: 1\n0 {} -> 0 / {}\n")

    def test_garbage(self):
        with pytest.raises(MachineFormatError):
            parse_machine("STATES: 1\nnonsense\n")

    def test_flip_output(self):
        m = two_state().flip_output(0, 1, "b")
        assert m.lam[0][1] == frozenset("b")


class TestDot:
    def test_one_edge_per_transition(self):
        dot = to_dot(two_state())
        assert dot.count("->") == 1 + 4
        assert "t0 -> t1" in dot and 'label="{a}/{}"' in dot

    def test_collapsed(self):
        dot = to_dot(two_state(), collapsed=True)
        assert dot.count("->") == 1 + 3
        assert 'label="{}/{b}, {a}/{b}"' in dot
