"""Engine semantics: clause selection, backtracking, negation, cut,
built-ins, consulting, and laziness."""

import io

import pytest

from rholog.engine import (
    ConsultError,
    DepthLimitExceeded,
    ModeError,
    Session,
    consult,
    consult_text,
)
from rholog.program import RhoClause
from rholog.strategies import corpus_source
from rholog.syntax import parse_hedge, parse_program, parse_term
from rholog.terms import Hedge

from conftest import a


def hedges(session, query):
    """The sequence of values of the single answer variable."""
    out = []
    for answer in session.solve_text(query):
        (_, value), = answer.pairs
        out.append(value)
    return out


@pytest.fixture()
def elementary():
    return Session(consult_text(corpus_source("examples/strat.rholog")))


class TestClauseSelection:
    def test_two_matchers_of_one_clause(self, elementary):
        got = hedges(elementary, "str1 :: (a, b, a, f(a)) ==> s_X")
        assert got == [parse_hedge("(f(a), b, a, f(a))"),
                       parse_hedge("(a, b, f(a), f(a))")]

    def test_output_side_constrains_answers(self, elementary):
        answers = list(elementary.solve_text(
            "str1 :: (a, b, a, f(a)) ==> (s_X, f(a), s_Y)"))
        got = [(ans["s_X"], ans["s_Y"]) for ans in answers]
        assert got == [
            (Hedge(), parse_hedge("(b, a, f(a))")),
            (parse_hedge("(f(a), b, a)"), Hedge()),
            (parse_hedge("(a, b)"), parse_hedge("(f(a))")),
            (parse_hedge("(a, b, f(a))"), Hedge()),
        ]

    def test_clause_order_is_source_order(self):
        session = Session(consult_text(
            "pick :: i_X ==> first(i_X).\npick :: i_X ==> second(i_X).\n"))
        got = hedges(session, "pick :: a ==> i_R")
        assert got == [a("first", a("a")), a("second", a("a"))]

    def test_no_clauses_means_failure(self):
        session = Session(consult_text(""))
        assert hedges(session, "nothing :: a ==> i_X") == []

    def test_empty_binding_answer(self):
        session = Session(consult_text("idle :: a ==> a."))
        answers = list(session.solve_text("idle :: a ==> a"))
        assert len(answers) == 1 and answers[0].pairs == ()


class TestNegation:
    def test_fails_when_positive_succeeds(self, elementary):
        assert list(elementary.solve_text(
            "str1 :: (a, b, a, f(a)) =\\=> s_")) == []

    def test_succeeds_when_positive_fails(self, elementary):
        answers = list(elementary.solve_text(
            "str1 :: (a, b, a, f(a)) =\\=> (b, s_)"))
        assert len(answers) == 1
        assert answers[0].pairs == ()     # negation binds nothing

    def test_succeeds_with_no_matching_clause(self):
        session = Session(consult_text(""))
        answers = list(session.solve_text("anything :: eps =\\=> nonexistent"))
        assert len(answers) == 1


class TestCut:
    def test_query_cut_keeps_first_answer(self, elementary):
        got = hedges(elementary, "rewrite(strat) :: h(f(f(a)), f(a)) ==> i_X, !")
        assert got == [parse_term("h(g(f(a)), f(a))")]

    def test_true_then_cut(self):
        session = Session(consult_text(""))
        assert len(list(session.solve_text("true, !"))) == 1

    def test_cut_freezes_redex_not_contractum(self):
        session = Session(consult_text(
            corpus_source("examples/strat.rholog")
            + corpus_source("prelude/rewrite.rholog")))
        got = hedges(session, "rewrite_left_out(strat) :: h(f(f(a)), f(a)) ==> i_X")
        assert got == [parse_term("h(g(f(a)), f(a))"), parse_term("h(a, f(a))")]

    def test_cut_is_clause_local(self):
        # The cut in inner's clause must not prune outer's second clause.
        session = Session(consult_text(
            "inner :: i_X ==> hit(i_X) :- !.\n"
            "outer :: i_X ==> i_Y :- inner :: i_X ==> i_Y.\n"
            "outer :: i_X ==> fallback.\n"))
        got = hedges(session, "outer :: a ==> i_R")
        assert got == [a("hit", a("a")), a("fallback")]


class TestBuiltins:
    def test_arithmetic_binds(self):
        session = Session(consult_text(""))
        answers = list(session.solve_text("i_X is 2 + 3"))
        assert [ans["i_X"] for ans in answers] == [a("5")]

    def test_arithmetic_operators(self):
        session = Session(consult_text(""))
        for text, value in [("2 + 3", "5"), ("2 - 5", "-3"), ("3 * 4", "12"),
                            ("7 // 2", "3"), ("7 mod 2", "1")]:
            answers = list(session.solve_text(f"i_X is {text}"))
            assert [ans["i_X"] for ans in answers] == [a(value)], text

    def test_comparisons(self):
        session = Session(consult_text(""))
        assert len(list(session.solve_text("2 < 3"))) == 1
        assert list(session.solve_text("3 < 2")) == []
        assert len(list(session.solve_text("2 =< 2, 3 >= 2, 2 =:= 2, 2 =\\= 3"))) == 1

    def test_write_and_nl(self):
        out = io.StringIO()
        session = Session(consult_text("show(i_X) :- write(i_X), nl."),
                          out=out)
        answers = list(session.solve_text("i_X is 2 + 2, write(f(i_X)), nl"))
        assert len(answers) == 1
        assert out.getvalue() == "f(4)\n"

    def test_true_fail(self):
        session = Session(consult_text(""))
        assert len(list(session.solve_text("true"))) == 1
        assert list(session.solve_text("fail")) == []

    def test_arithmetic_error_aborts_branch(self):
        err = io.StringIO()
        session = Session(consult_text(""), err=err)
        assert list(session.solve_text("i_X is a + 1", check=False)) == []
        assert session.runtime_errors
        assert "arithmetic" in err.getvalue()

    def test_division_by_zero_reported(self):
        session = Session(consult_text(""), err=io.StringIO())
        assert list(session.solve_text("i_X is 1 // 0")) == []
        assert any("zero" in e for e in session.runtime_errors)


class TestUserPredicates:
    SRC = """
    :- mode(double(+, -)).
    double(i_X, i_Y) :- i_Y is i_X * 2.
    :- mode(classify(+, -)).
    classify(0, zero).
    classify(i_N, small) :- i_N < 10.
    twice :: i_X ==> i_Y :- double(i_X, i_Y).
    """

    def test_predicate_with_output(self):
        session = Session(consult_text(self.SRC))
        got = hedges(session, "twice :: 21 ==> i_R")
        assert got == [a("42")]

    def test_fact_and_rule_alternatives_in_order(self):
        session = Session(consult_text(self.SRC))
        answers = list(session.solve_text("classify(0, i_K)"))
        assert [ans["i_K"] for ans in answers] == [a("zero"), a("small")]

    def test_unknown_predicate_fails_with_report(self):
        session = Session(consult_text(""), err=io.StringIO())
        assert list(session.solve_text("mystery(a)", check=False)) == []
        assert any("mystery" in e for e in session.runtime_errors)


class TestConsult:
    def test_abbreviation_expands_to_clause(self):
        source, table = parse_program("flatten := nf(flatten_one).")
        program = consult(source, table)
        (clause,) = program.rho_clauses("flatten")
        assert isinstance(clause, RhoClause)
        (body_lit,) = clause.body
        assert body_lit.strategy == parse_term("nf(flatten_one)")
        # head and body share the same in/out variables
        assert clause.head.lhs == body_lit.lhs
        assert clause.head.rhs == body_lit.rhs

    def test_empty_source(self):
        program = consult_text("")
        assert program.rho == {} and program.preds == {}

    def test_clause_groups_keep_order(self):
        program = consult_text(corpus_source("examples/strat.rholog"))
        assert [c.head.rhs for c in program.rho_clauses("strat")] == [
            parse_hedge("g(i_X)"), parse_hedge("i_X")]

    def test_combinator_shadowing_rejected(self):
        with pytest.raises(ConsultError):
            consult_text("nf :: a ==> a.")
        with pytest.raises(ConsultError):
            consult_text("rewrite := nf(step).")

    def test_builtin_redefinition_rejected(self):
        with pytest.raises(ConsultError):
            consult_text(":- mode(write(+)).\nwrite(i_X).")

    def test_strict_mode_rejects_violations(self):
        with pytest.raises(ConsultError) as info:
            consult_text("bad :: i_X ==> i_Y.")
        assert info.value.violations

    def test_lenient_mode_records_violations(self):
        program = consult_text("bad :: i_X ==> i_Y.", strict=False)
        assert program.violations


class TestAnswerStream:
    def test_order_is_deterministic(self, elementary):
        q = "choice(str1, str2) :: (a, b, a, f(a)) ==> s_X"
        first = [ans.as_dict() for ans in elementary.solve_text(q)]
        second = [ans.as_dict() for ans in elementary.solve_text(q)]
        assert first == second

    def test_first_answer_is_lazy(self):
        # Each clause writes when its body runs: taking one answer from the
        # stream must run only the first clause's body.
        out = io.StringIO()
        session = Session(consult_text(
            "noisy :: i_X ==> one :- write(one).\n"
            "noisy :: i_X ==> two :- write(two).\n"), out=out)
        stream = session.solve_text("noisy :: a ==> i_R")
        first = next(stream)
        assert first["i_R"] == a("one")
        assert out.getvalue() == "one"
        next(stream)
        assert out.getvalue() == "onetwo"

    def test_matcher_streams_consumed_lazily(self, monkeypatch):
        # Instrument matcher-stream consumption: the first answer of a
        # twelve-way choice point must pull one solution, not all twelve.
        import rholog.engine as engine_module
        from rholog.matching import match_hedge as real_match
        pulled = [0]

        def counting_match(pattern, subject, *args, **kwargs):
            for sigma in real_match(pattern, subject, *args, **kwargs):
                pulled[0] += 1
                yield sigma

        monkeypatch.setattr(engine_module, "match_hedge", counting_match)
        session = Session(consult_text("wide :: (s_1, s_2) ==> (s_1).\n"))
        stream = session.solve_text(
            "wide :: (a, a, a, a, a, a, a, a, a, a, a) ==> s_Out")
        next(stream)
        assert pulled[0] <= 3     # head matcher + output match, no lookahead
        rest = list(stream)
        assert len(rest) == 11    # the remaining splits still arrive

    def test_duplicates_are_preserved(self):
        session = Session(consult_text(
            "again :: a ==> b.\nagain :: a ==> b.\n"))
        got = hedges(session, "again :: a ==> i_R")
        assert got == [a("b"), a("b")]

    def test_depth_limit_aborts(self):
        session = Session(consult_text(
            "grow :: i_X ==> f(i_X).\nspin := nf(grow).\n"),
            depth_limit=200)
        with pytest.raises(DepthLimitExceeded):
            list(session.solve_text("spin :: a ==> i_X"))

    def test_long_derivations_fit_on_the_explicit_stack(self):
        # A 600-step normal form would overflow a recursion-based engine;
        # the choice-point stack is a plain list, so it just runs.
        session = Session(consult_text("shrink :: (a, s_X) ==> (s_X).\n"))
        query = "nf(shrink) :: (" + ", ".join(["a"] * 600) + ") ==> s_Out"
        first = next(session.solve_text(query))
        assert first["s_Out"] == Hedge()

    def test_mode_error_raised_for_bad_query(self, elementary):
        with pytest.raises(ModeError):
            list(elementary.solve_text("str1 :: i_Y ==> i_X"))

    def test_query_variable_order_in_answers(self, elementary):
        answers = list(elementary.solve_text(
            "str1 :: (a, b, a, f(a)) ==> (s_X, f(a), s_Y)"))
        assert [v.text() for v, _ in answers[0].pairs] == ["s_X", "s_Y"]

    def test_answers_replay_against_output_pattern(self, elementary):
        # Soundness check by replay: substituting an answer into the
        # query's output side gives a hedge the same query accepts exactly.
        from rholog.syntax import format_hedge
        from rholog.terms import apply_subst, Subst
        query = "str1 :: (a, b, a, f(a)) ==> (s_X, f(a), s_Y)"
        pattern = parse_hedge("(s_X, f(a), s_Y)")
        for answer in elementary.solve_text(query):
            transformed = apply_subst(Subst.of(answer.as_dict()), pattern)
            replay = (f"str1 :: (a, b, a, f(a)) ==> "
                      f"{format_hedge(transformed)}")
            assert list(elementary.solve_text(replay)), replay


class TestReplaceExample:
    def test_replacement_normal_form(self):
        session = Session(consult_text(corpus_source("examples/replace.rholog")))
        stream = session.solve_text(
            "replace_all :: (f(x, g(x, y)), x -> z, y -> a) ==> i_X")
        assert next(stream)["i_X"] == parse_term("f(z, g(z, a))")

    def test_single_replacement_steps(self):
        session = Session(consult_text(corpus_source("examples/replace.rholog")))
        stream = session.solve_text(
            "replace :: (f(x), x -> z) ==> s_Out")
        assert next(stream)["s_Out"] == parse_hedge("(f(z), x -> z)")

    def test_no_applicable_rule_returns_the_term(self):
        session = Session(consult_text(corpus_source("examples/replace.rholog")))
        stream = session.solve_text("replace_all :: (q, x -> z) ==> i_X")
        assert next(stream)["i_X"] == a("q")


class TestTrace:
    def test_trace_mentions_clause_and_matcher(self, capsys):
        trace = io.StringIO()
        session = Session(consult_text(corpus_source("examples/strat.rholog")),
                          trace=trace)
        list(session.solve_text("str1 :: (a, b, a, f(a)) ==> s_X"))
        text = trace.getvalue()
        assert "clause 1, matcher 1" in text
        assert "str1" in text

    def test_trace_covers_each_selected_literal(self):
        trace = io.StringIO()
        session = Session(consult_text(""), trace=trace)
        list(session.solve_text("true, i_X is 1 + 1, i_X < 3, !"))
        text = trace.getvalue()
        assert "select true" in text
        assert "select i_X is 1 + 1" in text
        assert "cut to level" in text
