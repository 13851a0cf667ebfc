"""Built-in strategy combinators and the shipped strategy corpus.

The engine intercepts a transformation literal whose strategy's head symbol
names a combinator before it looks for user clauses; a strategy symbol may
therefore carry either user clauses or a native meaning, never both.

Each handler receives the running machine and rewrites the selected literal
``st :: h ==> rhs`` into alternative goals.  Handlers never add bindings
themselves: they splice fresh sub-literals whose forced matches do the
binding, so answer order falls out of plain depth-first search.

The library:

``id``
    emits the input hedge unchanged, exactly once.
``compose(st_1, ..., st_n)``, n >= 2
    pipes the input through ``st_1`` then ``compose(st_2, ..., st_n)``;
    backtracking explores every stage's alternatives, earlier stages
    varying slowest.
``choice(st_1, ..., st_n)``, n >= 1
    all answers of ``st_1``, then of ``st_2``, and so on.
``first_one(st_1, ..., st_n)``, n >= 1
    the first answer of the first strategy that has any; nothing more.
``first_all(st_1, ..., st_n)``, n >= 1
    every answer of the first strategy that has any; later ones untried.
``nf(st)``
    every hedge reachable by some number of ``st`` steps on which ``st``
    fails; never fails itself, may diverge, duplicates preserved.
``iterate(st, n)``
    every result of exactly ``n`` consecutive ``st`` steps.
``map1(st)`` / ``map(st)``
    transforms each element of the input hedge separately; ``map1``
    requires single-term images, ``map`` splices arbitrary hedges.  The
    empty hedge maps to itself; the rightmost element backtracks fastest.
``interactive``
    reads strategies from the attached interaction channel, applies each to
    the current hedge, and emits the hedge current when the user finishes.
``rewrite(st)``
    rewrites one subterm of a single input term by ``st``, choosing
    subterms in leftmost-outermost order.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .matching import decompositions
from .program import ForcedMatch, RhoLiteral
from .syntax import ParseError, format_hedge, parse_term
from .terms import Apply, Hedge, apply_context, int_value, singleton

#: Strategy symbols with a native meaning.
COMBINATORS = frozenset({
    "id", "compose", "choice", "first_one", "first_all", "nf", "iterate",
    "map1", "map", "interactive", "rewrite",
})


class Interaction:
    """Line-oriented channel for the ``interactive`` strategy."""

    def __init__(self, read_line, write_text):
        self._read = read_line
        self._write = write_text

    def show(self, text: str) -> None:
        self._write(text + "\n")

    def read(self, prompt: str) -> Optional[str]:
        return self._read(prompt)


def stream_interaction(infile, outfile) -> Interaction:
    def read_line(prompt: str) -> Optional[str]:
        outfile.write(prompt)
        outfile.flush()
        line = infile.readline()
        return None if line == "" else line

    return Interaction(read_line, outfile.write)


def expand_combinator(machine, lit: RhoLiteral, rest, ans) -> Iterator:
    """Alternative goals for a combinator literal, or None if not one."""
    strategy = lit.strategy
    name = strategy.head if isinstance(strategy, Apply) else None
    if name not in COMBINATORS:
        return None
    handler = _HANDLERS[name]
    return handler(machine, strategy.args.items, lit, rest, ans)


def _bad(machine, message) -> Iterator:
    machine.session.report(message)
    return iter(())


def _emit(machine, lit, rest, ans, result: Hedge):
    """A single alternative that matches the literal's rhs against result."""
    return (ForcedMatch(lit.rhs, result),) + rest, ans


def _id(machine, args, lit, rest, ans):
    if args:
        return _bad(machine, "id takes no arguments")
    return iter([_emit(machine, lit, rest, ans, lit.lhs)])


def _compose(machine, args, lit, rest, ans):
    if len(args) < 2:
        return _bad(machine, "compose needs at least two strategies")
    mid = machine.session.fresh_var("s", "Mid")
    second = args[1] if len(args) == 2 else Apply("compose", Hedge(args[1:]))
    goal = (RhoLiteral(args[0], lit.lhs, singleton(mid)),
            RhoLiteral(second, singleton(mid), lit.rhs)) + rest
    return iter([(goal, ans)])


def _choice(machine, args, lit, rest, ans):
    if not args:
        return _bad(machine, "choice needs at least one strategy")
    return iter([((RhoLiteral(st, lit.lhs, lit.rhs),) + rest, ans)
                 for st in args])


def _first_one(machine, args, lit, rest, ans):
    if not args:
        return _bad(machine, "first_one needs at least one strategy")
    for st in args:
        first = next(machine.strategy_stream(st, lit.lhs), None)
        if first is not None:
            return iter([_emit(machine, lit, rest, ans, first)])
    return iter(())


def _first_all(machine, args, lit, rest, ans):
    if not args:
        return _bad(machine, "first_all needs at least one strategy")
    for st in args:
        stream = machine.strategy_stream(st, lit.lhs)
        first = next(stream, None)
        if first is not None:
            def alts(first=first, stream=stream):
                yield _emit(machine, lit, rest, ans, first)
                for result in stream:
                    yield _emit(machine, lit, rest, ans, result)
            return alts()
    return iter(())


def _nf(machine, args, lit, rest, ans):
    if len(args) != 1:
        return _bad(machine, "nf takes exactly one strategy")
    stream = machine.strategy_stream(args[0], lit.lhs)
    first = next(stream, None)
    if first is None:
        # Irreducible: the input is its own normal form.
        return iter([_emit(machine, lit, rest, ans, lit.lhs)])

    def alts(first=first, stream=stream):
        yield (RhoLiteral(lit.strategy, first, lit.rhs),) + rest, ans
        for result in stream:
            yield (RhoLiteral(lit.strategy, result, lit.rhs),) + rest, ans
    return alts()


def _iterate(machine, args, lit, rest, ans):
    if len(args) != 2:
        return _bad(machine, "iterate takes a strategy and a step count")
    count = int_value(args[1])
    if count is None or count < 0:
        return _bad(machine, f"iterate needs a natural number, got {args[1]!r}")
    if count == 0:
        return iter([_emit(machine, lit, rest, ans, lit.lhs)])
    mid = machine.session.fresh_var("s", "It")
    again = Apply("iterate", Hedge((args[0], Apply(str(count - 1)))))
    goal = (RhoLiteral(args[0], lit.lhs, singleton(mid)),
            RhoLiteral(again, singleton(mid), lit.rhs)) + rest
    return iter([(goal, ans)])


def _map_common(machine, args, lit, rest, ans, kind: str):
    if len(args) != 1:
        return _bad(machine, f"map{'1' if kind == 'i' else ''} takes exactly one strategy")
    elements = lit.lhs.items
    if not elements:
        return iter([_emit(machine, lit, rest, ans, Hedge())])
    slots = [machine.session.fresh_var(kind, f"El{i}") for i in range(len(elements))]
    goal = tuple(RhoLiteral(args[0], singleton(el), singleton(slot))
                 for el, slot in zip(elements, slots))
    goal += (ForcedMatch(lit.rhs, Hedge(slots)),) + rest
    return iter([(goal, ans)])


def _map1(machine, args, lit, rest, ans):
    return _map_common(machine, args, lit, rest, ans, "i")


def _map(machine, args, lit, rest, ans):
    return _map_common(machine, args, lit, rest, ans, "s")


def _interactive(machine, args, lit, rest, ans):
    if args:
        return _bad(machine, "interactive takes no arguments")
    channel = machine.session.interaction
    if channel is None:
        return _bad(machine, "interactive needs an attached interaction channel")
    table = machine.session.operators
    current = lit.lhs
    channel.show(f"current hedge: {format_hedge(current, table)}")
    while True:
        line = channel.read("strategy (term. or finish.)> ")
        if line is None:
            break
        text = line.strip()
        if text in ("", "finish", "finish."):
            if text == "":
                continue
            break
        try:
            strategy = parse_term(text, table)
        except ParseError as exc:
            channel.show(f"cannot read strategy: {exc}")
            continue
        if isinstance(strategy, Hedge):
            channel.show("a strategy must be a term")
            continue
        result = next(machine.strategy_stream(strategy, current), None)
        if result is None:
            channel.show("strategy failed; hedge unchanged")
            continue
        current = result
        channel.show(f"current hedge: {format_hedge(current, table)}")
    return iter([_emit(machine, lit, rest, ans, current)])


def _rewrite(machine, args, lit, rest, ans):
    if len(args) != 1:
        return _bad(machine, "rewrite takes exactly one strategy")
    if len(lit.lhs) != 1 or not isinstance(lit.lhs[0], Apply):
        return iter(())          # rewriting applies to a single term
    subject = lit.lhs[0]
    inner = args[0]

    def alts():
        for ctx, redex in decompositions(subject):
            slot = machine.session.fresh_var("i", "New")
            goal = (RhoLiteral(inner, singleton(redex), singleton(slot)),
                    ForcedMatch(lit.rhs, singleton(apply_context(ctx, slot))),
                    ) + rest
            yield goal, ans
    return alts()


_HANDLERS = {
    "id": _id,
    "compose": _compose,
    "choice": _choice,
    "first_one": _first_one,
    "first_all": _first_all,
    "nf": _nf,
    "iterate": _iterate,
    "map1": _map1,
    "map": _map,
    "interactive": _interactive,
    "rewrite": _rewrite,
}


# ---------------------------------------------------------------------------
# Shipped corpus

def corpus_path(name: str):
    """Filesystem path of a shipped corpus program such as
    ``prelude/rewrite.rholog`` or ``examples/flatten.rholog``."""
    from importlib.resources import files

    path = files(__package__) / "corpus" / name
    return path


def corpus_source(name: str) -> str:
    return corpus_path(name).read_text(encoding="utf-8")


def list_corpus() -> list:
    from importlib.resources import files

    root = files(__package__) / "corpus"
    found = []
    for sub in sorted(root.iterdir()):
        if sub.is_dir():
            for f in sorted(sub.iterdir()):
                if f.name.endswith(".rholog"):
                    found.append(f"{sub.name}/{f.name}")
    return found
