"""Command-line front end: batch queries, mode checking, and a REPL.

Batch mode prints each answer as ``VarName = value`` lines with a blank
line between answers, or ``false.`` when the query has none.  Exit status
is 0 when at least one answer was found (or a requested check passed), 1
when the query failed, and 2 on parse, mode, or runtime errors.

Without ``--query`` or ``--check`` an interactive shell starts: queries end
with ``.``, a ``;`` asks for the next answer, a plain newline stops,
``consult(FILE).`` loads programs, and ``halt.`` leaves.  The shell also
hosts the ``interactive`` strategy's sub-prompts.

Paths given to ``--consult`` (or ``consult/1``) resolve against the current
directory first and then against the shipped corpus, so
``--consult examples/strat.rholog`` works from anywhere.
"""

from __future__ import annotations

import argparse
import os
import sys
from itertools import islice
from typing import List, Optional

from . import strategies
from .engine import (
    Answer,
    ConsultError,
    DepthLimitExceeded,
    ModeError,
    Program,
    Session,
    consult,
)
from .program import SourceProgram
from .syntax import ParseError, default_operators, format_value, parse_program
from .wellmoded import check_program


def resolve_program_path(name: str) -> str:
    """A consultable path: the file itself, or the shipped corpus entry."""
    if os.path.exists(name):
        return name
    try:
        candidate = strategies.corpus_path(name)
        if candidate.is_file():
            return str(candidate)
    except (FileNotFoundError, ModuleNotFoundError):
        pass
    raise FileNotFoundError(f"no such program file: {name}")


def _load_sources(paths) -> tuple:
    table = default_operators()
    items = SourceProgram()
    for name in paths:
        path = resolve_program_path(name)
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
        source, table = parse_program(text, table)
        items.items.extend(source.items)
    return items, table


def _print_answer(answer: Answer, table, out) -> None:
    if not answer.pairs:
        out.write("true.\n")
        return
    for var, value in answer.pairs:
        out.write(f"{var.text()} = {format_value(value, table)}\n")


def run_batch(files: List[str], query_text: Optional[str], *,
              check_only: bool = False, all_answers: bool = False,
              max_answers: Optional[int] = None, lenient: bool = False,
              trace: bool = False, depth_limit: Optional[int] = None,
              out=None, err=None, in_=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr

    try:
        source, table = _load_sources(files)
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    except ParseError as exc:
        print(f"syntax error: {exc}", file=err)
        return 2

    if check_only:
        violations = check_program(source)
        if violations:
            for v in violations:
                print(f"mode violation: {v}", file=err)
            return 2
        out.write("ok\n")
        return 0

    try:
        program = consult(source, table, strict=not lenient)
    except ConsultError as exc:
        print(f"error: {exc}", file=err)
        return 2
    for v in program.violations:
        print(f"warning: {v}", file=err)

    if query_text is None:
        print("error: nothing to do (give --query, --check, or no "
              "arguments for a shell)", file=err)
        return 2

    interaction = strategies.stream_interaction(in_ or sys.stdin, out)
    session = Session(program, out=out, err=err,
                      trace=err if trace else None,
                      interaction=interaction, depth_limit=depth_limit)
    try:
        answers = session.solve_text(query_text, check=True)
    except ParseError as exc:
        print(f"syntax error: {exc}", file=err)
        return 2
    except ModeError as exc:
        if not lenient:
            for v in exc.violations:
                print(f"mode violation: {v}", file=err)
            return 2
        for v in exc.violations:
            print(f"warning: {v}", file=err)
        answers = session.solve_text(query_text, check=False)

    if not all_answers and max_answers is None:
        max_answers = 1
    count = 0
    try:
        stream = answers if max_answers is None else islice(answers, max_answers)
        for answer in stream:
            if count:
                out.write("\n")
            _print_answer(answer, table, out)
            count += 1
    except DepthLimitExceeded as exc:
        print(f"error: {exc}", file=err)
        return 2
    if count == 0:
        out.write("false.\n")
        return 1
    return 0


class Repl:
    """An interactive query shell over an incrementally consulted program."""

    PROMPT = "?- "

    def __init__(self, *, files=(), lenient=False, trace=False,
                 depth_limit=None, in_=None, out=None, err=None):
        self.infile = in_ if in_ is not None else sys.stdin
        self.out = out if out is not None else sys.stdout
        self.err = err if err is not None else sys.stderr
        self.lenient = lenient
        self.trace = trace
        self.depth_limit = depth_limit
        self.items = SourceProgram()
        self.table = default_operators()
        self.program = Program(operators=self.table)
        for name in files:
            self._consult(name)

    # -- input plumbing

    def _write(self, text: str) -> None:
        self.out.write(text)
        self.out.flush()

    def _read_command(self) -> Optional[str]:
        """Accumulate lines until one ends with a clause period."""
        buffer: List[str] = []
        prompt = self.PROMPT
        while True:
            self._write(prompt)
            line = self.infile.readline()
            if line == "":
                return None
            stripped = line.strip()
            if not buffer and not stripped:
                prompt = self.PROMPT
                continue
            buffer.append(line)
            if stripped.endswith("."):
                return "".join(buffer)
            prompt = "|  "

    # -- consulting

    def _consult(self, name: str) -> bool:
        try:
            path = resolve_program_path(name)
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
            source, table = parse_program(text, self.table.clone())
            merged = SourceProgram(list(self.items.items) + list(source.items))
            program = consult(merged, table, strict=not self.lenient)
        except (FileNotFoundError, OSError) as exc:
            print(f"error: {exc}", file=self.err)
            return False
        except ParseError as exc:
            print(f"syntax error: {exc}", file=self.err)
            return False
        except ConsultError as exc:
            print(f"error: {exc}", file=self.err)
            return False
        for v in program.violations:
            print(f"warning: {v}", file=self.err)
        self.items = merged
        self.table = table
        self.program = program
        self._write(f"% consulted {name}\n")
        return True

    # -- the loop

    def run(self) -> int:
        self._write("rholog shell — queries end with '.', halt. leaves\n")
        while True:
            text = self._read_command()
            if text is None:
                self._write("\n")
                return 0
            stripped = text.strip().rstrip(".").strip()
            if stripped == "halt":
                return 0
            command = self._as_consult_command(text)
            if command is not None:
                self._consult(command)
                continue
            self._run_query(text)

    def _as_consult_command(self, text: str) -> Optional[str]:
        from .program import PredLiteral
        from .syntax import Parser

        try:
            query = Parser(text, self.table.clone()).parse_query()
        except ParseError:
            return None
        if len(query) == 1 and isinstance(query[0], PredLiteral) \
                and query[0].name == "consult" and len(query[0].args) == 1:
            arg = query[0].args[0]
            if hasattr(arg, "head") and isinstance(arg.head, str) and not arg.args:
                return arg.head
        return None

    def _run_query(self, text: str) -> None:
        interaction = strategies.stream_interaction(self.infile, self.out)
        session = Session(self.program, out=self.out, err=self.err,
                          trace=self.err if self.trace else None,
                          interaction=interaction,
                          depth_limit=self.depth_limit)
        try:
            answers = session.solve_text(text, check=not self.lenient)
        except ParseError as exc:
            print(f"syntax error: {exc}", file=self.err)
            return
        except ModeError as exc:
            for v in exc.violations:
                print(f"mode violation: {v}", file=self.err)
            return
        try:
            exhausted = True
            for answer in answers:
                _print_answer(answer, self.table, self.out)
                self._write("; for more> ")
                line = self.infile.readline()
                if line == "" or line.strip() != ";":
                    exhausted = False
                    break
            if exhausted:
                self._write("false.\n")
        except DepthLimitExceeded as exc:
            print(f"error: {exc}", file=self.err)
        except KeyboardInterrupt:
            self._write("\n% interrupted\n")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rholog",
        description="Interpreter for a strategic hedge-transformation language.")
    parser.add_argument("--consult", action="append", default=[],
                        metavar="FILE", help="program file to load (repeatable)")
    parser.add_argument("--query", metavar="TEXT", help="query to run in batch mode")
    parser.add_argument("--all", action="store_true",
                        help="print every answer instead of the first")
    parser.add_argument("--max-answers", type=int, metavar="N",
                        help="print at most N answers")
    parser.add_argument("--check", action="store_true",
                        help="only check the consulted files for well-modedness")
    parser.add_argument("--lenient", action="store_true",
                        help="report mode violations as warnings and run anyway")
    parser.add_argument("--trace", action="store_true",
                        help="log each derivation step to stderr")
    parser.add_argument("--depth-limit", type=int, metavar="N",
                        help="abort derivations deeper than N choice points")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    # Terms print recursively; allow deep results before Python objects.
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    args = build_arg_parser().parse_args(argv)
    if args.check:
        return run_batch(args.consult, None, check_only=True)
    if args.query is not None:
        return run_batch(
            args.consult, args.query,
            all_answers=args.all, max_answers=args.max_answers,
            lenient=args.lenient, trace=args.trace,
            depth_limit=args.depth_limit)
    repl = Repl(files=args.consult, lenient=args.lenient,
                trace=args.trace, depth_limit=args.depth_limit)
    return repl.run()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
