"""Command-line behavior: batch runs, exit codes, checking, the REPL."""

import io

from rholog.cli import Repl, main, run_batch


def batch(args=None, **kwargs):
    out, err, in_ = io.StringIO(), io.StringIO(), io.StringIO(kwargs.pop("stdin", ""))
    code = run_batch(out=out, err=err, in_=in_, **kwargs)
    return code, out.getvalue(), err.getvalue()


class TestBatch:
    def test_three_answers_in_order(self):
        code, out, _ = batch(
            files=["examples/strat.rholog", "prelude/rewrite.rholog"],
            query_text="rewrite_out(strat) :: h(f(f(a)), f(a)) ==> i_X",
            all_answers=True)
        assert code == 0
        assert out == ("i_X = h(g(f(a)), f(a))\n\n"
                       "i_X = h(a, f(a))\n\n"
                       "i_X = h(f(f(a)), g(a))\n")

    def test_check_only_ok(self):
        code, out, _ = batch(files=["examples/prover.rholog"],
                             query_text=None, check_only=True)
        assert code == 0 and out == "ok\n"

    def test_check_only_reports_violations(self, tmp_path):
        bad = tmp_path / "bad.rholog"
        bad.write_text("bad :: i_X ==> i_Y.\n")
        code, out, err = batch(files=[str(bad)], query_text=None,
                               check_only=True)
        assert code == 2 and "mode violation" in err

    def test_failed_query_prints_false(self):
        code, out, _ = batch(files=[], query_text="id :: a ==> b")
        assert code == 1 and out == "false.\n"

    def test_default_is_first_answer(self):
        code, out, _ = batch(files=["examples/strat.rholog"],
                             query_text="str1 :: (a, b, a, f(a)) ==> s_X")
        assert code == 0
        assert out == "s_X = (f(a), b, a, f(a))\n"

    def test_max_answers_prefix(self):
        code, out, _ = batch(
            files=["examples/strat.rholog", "prelude/rewrite.rholog"],
            query_text="rewrite(strat) :: h(f(f(a)), f(a)) ==> i_X",
            max_answers=2)
        assert code == 0
        assert out == "i_X = h(g(f(a)), f(a))\n\ni_X = h(a, f(a))\n"

    def test_zero_variable_answer_prints_true(self):
        code, out, _ = batch(files=["examples/strat.rholog"],
                             query_text="str1 :: (a, b, a, f(a)) =\\=> (b, s_)")
        assert code == 0 and out == "true.\n"

    def test_parse_error_exit_2(self):
        code, _, err = batch(files=[], query_text="str1 :: ==> x")
        assert code == 2 and "syntax error" in err

    def test_mode_violation_exit_2(self):
        code, _, err = batch(files=["examples/strat.rholog"],
                             query_text="str1 :: i_Y ==> i_X")
        assert code == 2 and "mode violation" in err

    def test_lenient_query_runs_anyway(self):
        code, out, err = batch(files=["examples/strat.rholog"],
                               query_text="str1 :: (a, a) ==> s_X, 1 < 2",
                               lenient=True)
        assert code == 0

    def test_missing_file_exit_2(self):
        code, _, err = batch(files=["no/such/file.rholog"], query_text="true")
        assert code == 2 and "no such program file" in err

    def test_trace_goes_to_err(self):
        code, out, err = batch(files=["examples/strat.rholog"],
                               query_text="str1 :: (a, b) ==> s_X",
                               all_answers=True, trace=True)
        assert code == 0
        assert "clause 1, matcher 1" in err
        assert "clause" not in out

    def test_depth_limit_exit_2(self, tmp_path):
        spin = tmp_path / "spin.rholog"
        spin.write_text("grow :: i_X ==> f(i_X).\nspin := nf(grow).\n")
        code, _, err = batch(files=[str(spin)],
                             query_text="spin :: a ==> i_X",
                             depth_limit=100)
        assert code == 2 and "frames" in err

    def test_byte_identical_reruns(self):
        runs = [batch(files=["examples/strat.rholog", "prelude/rewrite.rholog"],
                      query_text="rewrite(strat) :: h(f(f(a)), f(a)) ==> i_X",
                      all_answers=True)
                for _ in range(2)]
        assert runs[0] == runs[1]


class TestMainEntry:
    def test_query_flags(self, capsys):
        code = main(["--consult", "examples/strat.rholog",
                     "--query", "str1 :: (a, b) ==> s_X", "--all"])
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out == "s_X = (f(a), b)\n"

    def test_check_flag(self, capsys):
        assert main(["--check", "--consult", "examples/prover.rholog"]) == 0
        assert capsys.readouterr().out == "ok\n"

    def test_no_answers_exit_code(self, capsys):
        assert main(["--query", "id :: a ==> b"]) == 1


def repl_session(script, files=()):
    out, err = io.StringIO(), io.StringIO()
    repl = Repl(files=files, in_=io.StringIO(script), out=out, err=err)
    code = repl.run()
    return code, out.getvalue(), err.getvalue()


class TestRepl:
    def test_query_and_next_answer(self):
        code, out, _ = repl_session(
            "str1 :: (a, b, a, f(a)) ==> s_X.\n;\n;\nhalt.\n",
            files=["examples/strat.rholog"])
        assert code == 0
        assert "s_X = (f(a), b, a, f(a))" in out
        assert "s_X = (a, b, f(a), f(a))" in out
        assert "false." in out          # exhausted after the second ';'

    def test_stop_after_first_answer(self):
        _, out, _ = repl_session(
            "str1 :: (a, b, a, f(a)) ==> s_X.\n\nhalt.\n",
            files=["examples/strat.rholog"])
        assert out.count("s_X =") == 1

    def test_consult_command(self):
        _, out, _ = repl_session(
            "consult('examples/strat.rholog').\n"
            "str2 :: (a, a) ==> s_X.\n\nhalt.\n")
        assert "% consulted" in out
        assert "s_X = a" in out

    def test_consult_mode_violation_rejected_and_session_continues(self, tmp_path):
        bad = tmp_path / "bad.rholog"
        bad.write_text("bad :: i_X ==> i_Y.\n")
        code, out, err = repl_session(
            f"consult('{bad}').\ntrue.\n\nhalt.\n")
        assert "not well-moded" in err
        assert "true." in out           # session kept running

    def test_empty_input_reprompts(self):
        code, out, _ = repl_session("\n\ntrue.\n\nhalt.\n")
        assert code == 0 and "true." in out

    def test_eof_ends_session(self):
        code, _, _ = repl_session("")
        assert code == 0

    def test_multiline_query(self):
        _, out, _ = repl_session(
            "str1 ::\n  (a, b)\n  ==> s_X.\n\nhalt.\n",
            files=["examples/strat.rholog"])
        assert "s_X = (f(a), b)" in out

    def test_query_errors_reported(self):
        _, _, err = repl_session("str1 :: i_Y ==> i_X.\nhalt.\n",
                                 files=["examples/strat.rholog"])
        assert "mode violation" in err

    def test_interactive_strategy_through_repl(self):
        _, out, _ = repl_session(
            "interactive :: (a) ==> s_Y.\nstr1.\nfinish.\n\nhalt.\n",
            files=["examples/strat.rholog"])
        assert "current hedge: f(a)" in out
        assert "s_Y = f(a)" in out

    def test_false_for_failing_query(self):
        _, out, _ = repl_session("id :: a ==> b.\nhalt.\n")
        assert "false." in out
