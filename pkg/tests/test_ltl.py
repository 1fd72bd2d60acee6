"""Parser, normal form and lasso semantics."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from bocy.ltl import (
    FALSE,
    TRUE,
    And,
    Atom,
    Finally,
    Globally,
    Iff,
    Implies,
    LassoWord,
    Next,
    Not,
    Or,
    Release,
    SpecError,
    SpecificationFile,
    Until,
    atoms,
    core_size,
    evaluate,
    format_formula,
    is_nnf,
    parse_formula,
    parse_spec,
    size,
    to_nnf,
)

from oracles import random_lasso

a, b, c = Atom("a"), Atom("b"), Atom("c")
SIGNALS = ("a", "b", "c")


def formulas(max_leaves=6):
    leaves = st.sampled_from([TRUE, FALSE, a, b, c])
    unary = [Not, Next, Finally, Globally]
    binary = [And, Or, Implies, Iff, Until, Release]

    def extend(inner):
        return st.one_of(
            st.tuples(st.sampled_from(unary), inner).map(lambda p: p[0](p[1])),
            st.tuples(st.sampled_from(binary), inner, inner).map(lambda p: p[0](p[1], p[2])),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


letters = st.frozensets(st.sampled_from(SIGNALS))
lassos = st.builds(lambda p, l: LassoWord(tuple(p), tuple(l)),
                   st.lists(letters, max_size=4), st.lists(letters, min_size=1, max_size=4))


class TestParser:
    def test_spec_example(self):
        s = parse_spec("INPUTS: a\nOUTPUTS: b\nSPEC: G (a <-> X b)")
        assert s.inputs == ("a",) and s.outputs == ("b",)
        assert s.formula == Globally(Iff(a, Next(b)))

    def test_true(self):
        assert parse_spec("SPEC: true").formula == TRUE

    def test_until_right_associative(self):
        assert parse_formula("a U b U c") == Until(a, Until(b, c))

    def test_implies_right_associative(self):
        assert parse_formula("a -> b -> c") == Implies(a, Implies(b, c))

    @pytest.mark.parametrize("text, expected", [
        ("!a && b", And(Not(a), b)),
        ("X a U b", Until(Next(a), b)),
        ("a U b && c", And(Until(a, b), c)),
        ("a && b || c", Or(And(a, b), c)),
        ("a || b -> c", Implies(Or(a, b), c)),
        ("a -> b <-> c", Iff(Implies(a, b), c)),
        ("G F a", Globally(Finally(a))),
        ("a R b", Release(a, b)),
        ("!(a U b)", Not(Until(a, b))),
    ])
    def test_precedence(self, text, expected):
        assert parse_formula(text) == expected

    def test_multiline_and_comments(self):
        s = parse_spec("# header\nINPUTS: a\nOUTPUTS: b c # two\nSPEC: a ->\n  b\n")
        assert s.outputs == ("b", "c")
        assert s.formula == Implies(a, b)

    @pytest.mark.parametrize("text, line, col", [
        ("OUTPUTS: b\nSPEC: b && $", 2, 12),
        ("OUTPUTS: b\nSPEC: G d", 2, 9),
        ("OUTPUTS: b\nSPEC: b &&", 2, 11),
        ("OUTPUTS: b\nSPEC: (b", 2, 9),
    ])
    def test_errors_carry_position(self, text, line, col):
        with pytest.raises(SpecError) as err:
            parse_spec(text)
        assert (err.value.line, err.value.col) == (line, col)

    def test_undeclared_signal_message(self):
        with pytest.raises(SpecError, match="undeclared"):
            parse_spec("OUTPUTS: b\nSPEC: G d")

    def test_missing_spec(self):
        with pytest.raises(SpecError):
            parse_spec("INPUTS: a\n")

    def test_duplicate_signal(self):
        with pytest.raises(SpecError, match="twice"):
            parse_spec("INPUTS: a\nOUTPUTS: a\nSPEC: a")

    @given(formulas())
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, f):
        assert parse_formula(format_formula(f)) == f

    def test_spec_file_round_trip(self):
        s = parse_spec("INPUTS: a\nOUTPUTS: b\nSPEC: G (a -> X b) && F b")
        assert parse_spec(s.format()) == s


class TestSize:
    def test_sizes_count_distinct_subformulas(self):
        f = parse_formula("G (a <-> X b)")
        assert size(f) == 5
        assert core_size(f) >= size(f)

    def test_atoms(self):
        assert atoms(parse_formula("a U (b R !c)")) == {"a", "b", "c"}


class TestNnf:
    def test_not_globally(self):
        assert to_nnf(Not(Globally(a))) == Until(TRUE, Not(a))

    def test_not_until(self):
        assert to_nnf(Not(Until(a, b))) == Release(Not(a), Not(b))

    def test_double_negation(self):
        assert to_nnf(Not(Not(a))) == a

    @given(formulas(), lassos)
    @settings(max_examples=300, deadline=None)
    def test_semantics_preserved(self, f, w):
        g = to_nnf(f)
        assert is_nnf(g)
        assert evaluate(f, w) == evaluate(g, w)


class TestEvaluate:
    def test_globally_constant(self):
        assert evaluate(Globally(a), LassoWord.of([], [{"a"}]))

    def test_finally_and_globally(self):
        w = LassoWord.of([set()], [{"a"}])
        assert evaluate(Finally(a), w)
        assert not evaluate(Globally(a), w)

    def test_until(self):
        assert evaluate(Until(a, b), LassoWord.of([{"a"}, {"a"}, {"b"}], [set()]))

    def test_until_never_fulfilled(self):
        assert not evaluate(Until(a, b), LassoWord.of([], [{"a"}]))

    def test_positions_beyond_prefix(self):
        w = LassoWord.of([{"a"}], [{"b"}, set()])
        assert evaluate(b, w, 3) and not evaluate(b, w, 4)

    def test_negative_position(self):
        with pytest.raises(ValueError):
            evaluate(a, LassoWord.of([], [set()]), -1)

    @given(formulas(), lassos, st.integers(0, 10))
    @settings(max_examples=300, deadline=None)
    def test_negation_and_next(self, f, w, n):
        assert evaluate(Not(f), w, n) == (not evaluate(f, w, n))
        assert evaluate(Next(f), w, n) == evaluate(f, w, n + 1)

    def test_until_expansion_law(self):
        rng = random.Random(7)
        f = Until(a, Or(b, Next(c)))
        for _ in range(300):
            w = random_lasso(rng, SIGNALS)
            expanded = Or(f.right, And(f.left, Next(f)))
            assert evaluate(f, w) == evaluate(expanded, w)

    def test_release_is_dual(self):
        rng = random.Random(8)
        for _ in range(300):
            w = random_lasso(rng, SIGNALS)
            assert evaluate(Release(a, b), w) == (not evaluate(Until(Not(a), Not(b)), w))


class TestSpecificationFile:
    def test_signals(self):
        s = SpecificationFile(("a",), ("b",), TRUE)
        assert [(x.name, x.kind) for x in s.signals] == [("a", "input"), ("b", "output")]

    def test_empty_loop_rejected(self):
        with pytest.raises(ValueError):
            LassoWord((), ())
