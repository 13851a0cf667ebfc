"""Query evaluation: depth-first, leftmost-selection backtracking.

A consulted :class:`Program` keeps rule clauses grouped by their strategy's
head symbol, in source order; clauses for the same strategy are tried
top-down.  Queries run on an explicit choice-point stack rather than the
host call stack, so long derivations (normal forms of slowly shrinking
hedges, say) cannot overflow Python's recursion limit.

Selecting the leftmost literal of the current goal produces an iterator of
alternatives, each a rewritten goal:

* a positive transformation literal first checks the strategy's head symbol
  against the native combinators, then tries each matching clause head: for
  clause ``st' :: lhs' ==> rhs' :- body`` and each matcher ``σ`` of
  ``(st', lhs')`` against the ground ``(st, lhs)``, the literal becomes
  ``bodyσ`` followed by a forced match of the query's right-hand side
  against ``rhs'σ``;
* a forced match enumerates matchers of its pattern against its
  now-ground subject, applying each one to the remaining goal and to the
  answer under construction;
* a negative transformation literal succeeds exactly when its positive
  counterpart has no answers, and never binds anything;
* ``!`` discards every choice point created since its clause's activation
  (since the start of the query, for a query-level cut);
* built-in predicates (``is``, comparisons, ``true``, ``fail``, ``write``,
  ``nl``) evaluate natively; program-defined predicates run through their
  clauses like rules, guided by their declared input/output positions.

Answers are substitutions for the query's named variables, produced lazily
in a single deterministic order.  Nothing is deduplicated: a result reached
along two derivations appears twice.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

from . import strategies
from .matching import match_hedge
from .program import (
    Abbreviation,
    CutLiteral,
    ForcedMatch,
    PredClause,
    PredLiteral,
    Query,
    RhoClause,
    RhoLiteral,
    SourceProgram,
    apply_to_literal,
    expand_abbreviation,
    literal_vars,
)
from .syntax import (
    OperatorTable,
    default_operators,
    format_literal,
    format_value,
    parse_program,
    parse_query,
)
from .terms import (
    Apply,
    HOLE,
    Hedge,
    Var,
    apply_subst,
    int_value,
    is_ground,
    num,
    singleton,
)
from .wellmoded import BUILTIN_PREDICATES, ModeTable, check_program, mode_table_of


class ConsultError(Exception):
    """A program cannot be loaded (mode violations, illegal redefinitions)."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class ModeError(Exception):
    """A query failed the well-modedness check."""

    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = tuple(violations)


class DepthLimitExceeded(Exception):
    pass


@dataclass
class Program:
    """A consulted program, immutable once built."""

    items: tuple = ()
    rho: Dict[str, List[RhoClause]] = field(default_factory=dict)
    preds: Dict[str, List[PredClause]] = field(default_factory=dict)
    operators: OperatorTable = field(default_factory=default_operators)
    modes: ModeTable = field(default_factory=ModeTable)
    violations: tuple = ()

    def rho_clauses(self, symbol: str) -> List[RhoClause]:
        return self.rho.get(symbol, [])

    def pred_clauses(self, name: str) -> List[PredClause]:
        return self.preds.get(name, [])


def consult(source: SourceProgram, operators: Optional[OperatorTable] = None,
            strict: bool = True) -> Program:
    """Build a runnable program from parsed source items.

    Abbreviations expand to their defining clauses in place.  In strict
    mode any well-modedness violation raises :class:`ConsultError`; in
    lenient mode the violations are recorded on the program instead.
    """
    violations = check_program(source)
    if strict and violations:
        raise ConsultError(
            "program is not well-moded:\n  "
            + "\n  ".join(str(v) for v in violations),
            violations)
    program = Program(
        items=tuple(source),
        operators=operators if operators is not None else default_operators(),
        modes=mode_table_of(source),
        violations=tuple(violations),
    )
    for item in source:
        if isinstance(item, Abbreviation):
            item = expand_abbreviation(item)
        if isinstance(item, RhoClause):
            symbol = item.head.strategy.head
            if symbol in strategies.COMBINATORS:
                raise ConsultError(
                    f"strategy {symbol!r} is a built-in combinator and "
                    f"cannot be redefined (line {item.line})")
            program.rho.setdefault(symbol, []).append(item)
        elif isinstance(item, PredClause):
            name = item.head.head
            if name in BUILTIN_PREDICATES:
                raise ConsultError(
                    f"predicate {name!r} is built-in and cannot be "
                    f"redefined (line {item.line})")
            program.preds.setdefault(name, []).append(item)
    return program


def consult_text(text: str, strict: bool = True,
                 operators: Optional[OperatorTable] = None) -> Program:
    source, table = parse_program(text, operators)
    return consult(source, table, strict)


def consult_files(paths, strict: bool = True) -> Program:
    """Consult several files as one program, in order."""
    table = default_operators()
    items = SourceProgram()
    for path in paths:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
        source, table = parse_program(text, table)
        items.items.extend(source.items)
    return consult(items, table, strict)


class Answer:
    """Ground bindings for a query's named variables, in query order."""

    def __init__(self, pairs):
        self.pairs = tuple(pairs)
        self._map = dict(self.pairs)

    def __getitem__(self, key):
        if isinstance(key, str):
            for var, value in self.pairs:
                if var.text() == key:
                    return value
            raise KeyError(key)
        return self._map[key]

    def __contains__(self, key) -> bool:
        try:
            self[key]
        except KeyError:
            return False
        return True

    def __iter__(self):
        return iter(self._map)

    def __len__(self) -> int:
        return len(self.pairs)

    def as_dict(self) -> dict:
        return dict(self.pairs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Answer):
            return self._map == other._map
        if isinstance(other, dict):
            return self._map == other
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self) -> str:
        if not self.pairs:
            return "true"
        return ", ".join(f"{var.text()} = {value!r}" for var, value in self.pairs)


@dataclass(frozen=True)
class _Cut:
    """Runtime form of ``!``: prune the stack back to a fixed depth."""

    level: int


class Session:
    """Evaluation context: a program plus I/O and safety configuration.

    One session is single-threaded; several sessions may share a Program.
    """

    def __init__(self, program: Optional[Program] = None, *,
                 out=None, err=None, trace=None,
                 interaction: Optional[strategies.Interaction] = None,
                 depth_limit: Optional[int] = None,
                 debug_checks: bool = False):
        self.program = program if program is not None else Program()
        self.out = out if out is not None else sys.stdout
        self.err = err if err is not None else sys.stderr
        self.trace = trace
        self.interaction = interaction
        self.depth_limit = depth_limit
        self.debug_checks = debug_checks
        self.runtime_errors: List[str] = []
        self._fresh = itertools.count(1)

    @property
    def operators(self) -> OperatorTable:
        return self.program.operators

    # -- services used by machines and combinator handlers

    def fresh_var(self, kind: str, stem: str) -> Var:
        return Var(kind, f"{stem}#{next(self._fresh)}")

    def rename_clause(self, clause):
        """A copy of a clause with every variable renamed apart."""
        mapping: dict = {}
        if isinstance(clause, RhoClause):
            occurring = list(literal_vars(clause.head))
        else:
            occurring = list(literal_vars(PredLiteral(clause.head)))
        for lit in clause.body:
            occurring.extend(literal_vars(lit))
        for var in occurring:
            if var not in mapping:
                fresh = Var(var.kind, f"{var.name}#{next(self._fresh)}", var.anon)
                mapping[var] = _identity_image(fresh)
        body = tuple(apply_to_literal(mapping, lit) for lit in clause.body)
        if isinstance(clause, RhoClause):
            return RhoClause(apply_to_literal(mapping, clause.head), body, clause.line)
        return PredClause(apply_subst(mapping, clause.head), body, clause.line)

    def report(self, message: str) -> None:
        self.runtime_errors.append(message)
        print(f"error: {message}", file=self.err)

    def emit_trace(self, level: int, depth: int, text: str) -> None:
        if self.trace is not None:
            self.trace.write(f"{'| ' * level}[{depth}] {text}\n")

    # -- solving

    def solve(self, query: Query) -> Iterator[Answer]:
        """Lazily enumerate the answers of a parsed query."""
        query_vars: List[Var] = []
        for lit in query:
            for var in literal_vars(lit):
                if not var.anon and var not in query_vars:
                    query_vars.append(var)
        goal = tuple(_Cut(0) if isinstance(lit, CutLiteral) else lit
                     for lit in query)
        machine = _Machine(self, goal)
        for bindings in machine.run():
            yield Answer((var, bindings.get(var, var)) for var in query_vars)

    def solve_text(self, text: str, check: bool = True) -> Iterator[Answer]:
        """Parse, optionally mode-check, and solve a query string."""
        query = parse_query(text, self.operators)
        if check:
            violations = self.check_query(query)
            if violations:
                raise ModeError(violations)
        return self.solve(query)

    def check_query(self, query: Query):
        from .wellmoded import check_query
        return check_query(query, self.program.modes)


def _identity_image(var: Var):
    if var.kind == "s":
        return singleton(var)
    if var.kind == "c":
        return Apply(var, singleton(HOLE))
    return var


_COMPARISONS = {
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "=<": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "=:=": lambda a, b: a == b,
    "=\\=": lambda a, b: a != b,
}


class _ArithmeticError(Exception):
    pass


def _arith(t) -> int:
    """Evaluate a ground arithmetic expression over integers."""
    value = int_value(t)
    if value is not None:
        return value
    if isinstance(t, Apply) and isinstance(t.head, str):
        args = [_arith(a) for a in t.args]
        name = t.head
        if name == "+" and len(args) == 2:
            return args[0] + args[1]
        if name == "-" and len(args) == 2:
            return args[0] - args[1]
        if name == "-" and len(args) == 1:
            return -args[0]
        if name == "*" and len(args) == 2:
            return args[0] * args[1]
        if name == "//" and len(args) == 2:
            if args[1] == 0:
                raise _ArithmeticError("integer division by zero")
            return args[0] // args[1]
        if name == "mod" and len(args) == 2:
            if args[1] == 0:
                raise _ArithmeticError("mod by zero")
            return args[0] % args[1]
    raise _ArithmeticError(f"not an arithmetic expression: {t!r}")


class _Machine:
    """One depth-first search over a goal, on an explicit frame stack.

    Each frame is an iterator of ``(goal, bindings)`` alternatives; the top
    frame is advanced, an exhausted frame pops, and an empty goal yields its
    bindings as an answer.  Cut truncates the stack to a recorded depth.
    Sub-machines (negation, strategy probes) recurse only as deep as
    strategy terms nest, never with the derivation.
    """

    def __init__(self, session: Session, goal, level: int = 0):
        self.session = session
        self.level = level
        self.tracing = session.trace is not None
        self.stack: List[Iterator] = [iter(((tuple(goal), {}),))]

    def run(self) -> Iterator[dict]:
        stack = self.stack
        session = self.session
        limit = session.depth_limit
        while stack:
            item = next(stack[-1], None)
            if item is None:
                stack.pop()
                continue
            goal, bindings = item
            if not goal:
                yield bindings
                continue
            if limit is not None and len(stack) >= limit:
                raise DepthLimitExceeded(
                    f"choice-point stack exceeded {limit} frames")
            stack.append(self._expand(goal[0], goal[1:], bindings))

    # -- literal expansion

    def _expand(self, lit, rest, bindings) -> Iterator:
        if isinstance(lit, _Cut):
            if self.tracing:
                self._trace(f"select ! | cut to level {lit.level}")
            del self.stack[lit.level:]
            return iter(((rest, bindings),))
        if self.tracing:
            self._trace(f"select {self._lit_text(lit)}")
        if isinstance(lit, ForcedMatch):
            return self._forced_match(lit, rest, bindings)
        if isinstance(lit, RhoLiteral):
            if lit.negative:
                return self._negation(lit, rest, bindings)
            return self._positive_rho(lit, rest, bindings)
        if isinstance(lit, PredLiteral):
            return self._predicate(lit, rest, bindings)
        raise TypeError(f"cannot execute literal {lit!r}")

    def _forced_match(self, lit: ForcedMatch, rest, bindings) -> Iterator:
        if not is_ground(lit.subject):
            raise RuntimeError(
                f"internal error: forced-match subject not ground: {lit!r}")

        def alts():
            for j, sigma in enumerate(match_hedge(lit.pattern, lit.subject), 1):
                if self.tracing:
                    self._trace(f"match {lit.pattern!r} against "
                                f"{lit.subject!r} | matcher {j}")
                added = sigma.as_dict()
                new_rest = tuple(apply_to_literal(added, lt) for lt in rest) \
                    if added else rest
                new_bindings = bindings
                named = {v: val for v, val in added.items() if not v.anon}
                if named:
                    new_bindings = dict(bindings)
                    new_bindings.update(named)
                yield new_rest, new_bindings
        return alts()

    def _positive_rho(self, lit: RhoLiteral, rest, bindings) -> Iterator:
        if self.session.debug_checks:
            if not is_ground(lit.strategy) or not is_ground(lit.lhs):
                raise RuntimeError(
                    "well-modedness broken at runtime: selected literal "
                    f"{format_literal(lit, self.session.operators)} has a "
                    "non-ground strategy or left-hand side")
        native = strategies.expand_combinator(self, lit, rest, bindings)
        if native is not None:
            if self.tracing:
                self._trace(f"{self._lit_text(lit)} | combinator")
            return native
        strategy = lit.strategy
        if not (isinstance(strategy, Apply) and isinstance(strategy.head, str)):
            self.session.report(f"strategy {strategy!r} has no head symbol")
            return iter(())
        clauses = self.session.program.rho_clauses(strategy.head)
        barrier = len(self.stack)
        subject = Hedge((lit.strategy, lit.lhs))

        def alts():
            for k, clause in enumerate(clauses, 1):
                renamed = self.session.rename_clause(clause)
                pattern = Hedge((renamed.head.strategy, renamed.head.lhs))
                for j, sigma in enumerate(match_hedge(pattern, subject), 1):
                    if self.tracing:
                        self._trace(f"{self._lit_text(lit)} | clause {k}, "
                                    f"matcher {j}")
                    body = tuple(
                        _Cut(barrier) if isinstance(b, CutLiteral)
                        else apply_to_literal(sigma, b)
                        for b in renamed.body)
                    forced = ForcedMatch(lit.rhs,
                                         apply_subst(sigma, renamed.head.rhs))
                    yield body + (forced,) + rest, bindings
        return alts()

    def _negation(self, lit: RhoLiteral, rest, bindings) -> Iterator:
        if self.session.debug_checks:
            loose = [v for v in literal_vars(lit) if not v.anon]
            if loose:
                raise RuntimeError(
                    "well-modedness broken at runtime: negative literal "
                    f"{format_literal(lit, self.session.operators)} still "
                    f"contains {', '.join(v.text() for v in loose)}")
        if self.tracing:
            self._trace(f"{self._lit_text(lit)} | negation: enter")
        positive = RhoLiteral(lit.strategy, lit.lhs, lit.rhs, negative=False)
        sub = _Machine(self.session, (positive,), self.level + 1)
        succeeded = next(sub.run(), None) is None
        if self.tracing:
            self._trace(f"{self._lit_text(lit)} | negation: "
                        f"{'succeeds' if succeeded else 'fails'}")
        if succeeded:
            return iter(((rest, bindings),))
        return iter(())

    def _predicate(self, lit: PredLiteral, rest, bindings) -> Iterator:
        name = lit.name
        arity = len(lit.args)
        if name in BUILTIN_PREDICATES:
            return self._builtin(lit, rest, bindings)
        clauses = self.session.program.pred_clauses(name)
        if not clauses:
            self.session.report(f"unknown predicate {name}/{arity}")
            return iter(())
        mode = self.session.program.modes.lookup(name, arity)
        if mode is None:
            self.session.report(f"no mode declared for {name}/{arity}")
            return iter(())
        in_pos, out_pos = mode
        call_items = lit.args.items
        subject = Hedge(call_items[i - 1] for i in sorted(in_pos))
        out_pattern = Hedge(call_items[i - 1] for i in sorted(out_pos))
        barrier = len(self.stack)

        def alts():
            for k, clause in enumerate(clauses, 1):
                if len(clause.head.args) != arity:
                    continue
                renamed = self.session.rename_clause(clause)
                head_items = renamed.head.args.items
                pattern = Hedge(head_items[i - 1] for i in sorted(in_pos))
                for j, sigma in enumerate(match_hedge(pattern, subject), 1):
                    if self.tracing:
                        self._trace(f"{self._lit_text(lit)} | clause {k}, "
                                    f"matcher {j}")
                    body = tuple(
                        _Cut(barrier) if isinstance(b, CutLiteral)
                        else apply_to_literal(sigma, b)
                        for b in renamed.body)
                    head_out = Hedge(head_items[i - 1] for i in sorted(out_pos))
                    forced = ForcedMatch(out_pattern,
                                         apply_subst(sigma, head_out))
                    yield body + (forced,) + rest, bindings
        return alts()

    def _builtin(self, lit: PredLiteral, rest, bindings) -> Iterator:
        name = lit.name
        args = lit.args.items
        arity = len(args)
        session = self.session
        try:
            if name == "true" and arity == 0:
                return iter(((rest, bindings),))
            if name == "fail" and arity == 0:
                return iter(())
            if name == "nl" and arity == 0:
                session.out.write("\n")
                return iter(((rest, bindings),))
            if name == "write" and arity == 1:
                session.out.write(format_value(args[0], session.operators))
                return iter(((rest, bindings),))
            if name == "is" and arity == 2:
                value = num(_arith(args[1]))
                if self.tracing:
                    self._trace(f"{self._lit_text(lit)} | builtin is = {value!r}")
                return self._forced_match(
                    ForcedMatch(singleton(args[0]), singleton(value)),
                    rest, bindings)
            if name in _COMPARISONS and arity == 2:
                holds = _COMPARISONS[name](_arith(args[0]), _arith(args[1]))
                if self.tracing:
                    self._trace(f"{self._lit_text(lit)} | builtin "
                                f"{'succeeds' if holds else 'fails'}")
                return iter(((rest, bindings),)) if holds else iter(())
        except _ArithmeticError as exc:
            session.report(f"arithmetic error in {self._lit_text(lit)}: {exc}")
            return iter(())
        session.report(f"unknown built-in call {name}/{arity}")
        return iter(())

    # -- services for combinator handlers

    def strategy_stream(self, strategy, input_hedge: Hedge) -> Iterator[Hedge]:
        """The stream of output hedges of a strategy on a ground hedge."""
        out = self.session.fresh_var("s", "Probe")
        goal = (RhoLiteral(strategy, input_hedge, singleton(out)),)
        sub = _Machine(self.session, goal, self.level + 1)
        for bindings in sub.run():
            yield bindings[out]

    # -- tracing

    def _lit_text(self, lit) -> str:
        return format_literal(lit, self.session.operators)

    def _trace(self, text: str) -> None:
        self.session.emit_trace(self.level, len(self.stack), text)
