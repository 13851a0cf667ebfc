"""Immutable syntax trees: variables, terms, hedges, contexts, substitutions.

A *term* is an individual variable, the reserved constant ``hole``, or an
application of a head to an argument hedge; the head is a function symbol
(plain ``str``), a function variable, or a context variable (whose argument
hedge always holds exactly one term).  Function symbols have flexible arity:
the same symbol may be applied to any number of arguments, and a constant
like ``a`` is the application of ``a`` to the empty hedge.

A *hedge* is a flat, ordered sequence of terms and sequence variables; the
empty hedge is written ``eps``.  Hedges flatten on construction, so
concatenation is associative with ``eps`` as its unit and no hedge ever
contains another hedge as an element.

A *context* is a term containing exactly one occurrence of ``hole``;
applying a context to a term replaces the hole with that term.

Everything here is immutable and compares structurally, so the backtracking
machinery can share values freely without copying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

HOLE_NAME = "hole"

#: Variable kinds, keyed by their source-syntax prefix letter.
KINDS = ("i", "s", "f", "c")
KIND_NAMES = {"i": "individual", "s": "sequence", "f": "function", "c": "context"}


@dataclass(frozen=True)
class Var:
    """A variable of one of the four kinds.

    The kind is the prefix letter of the concrete syntax (``i_X`` is the
    individual variable ``Var("i", "X")``).  Anonymous variables keep the
    ``anon`` flag and carry a unique generated name, so every textual
    occurrence of ``i_`` is a distinct variable while still printing as a
    bare prefix.
    """

    kind: str
    name: str
    anon: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown variable kind {self.kind!r}")

    def text(self) -> str:
        return f"{self.kind}_" if self.anon else f"{self.kind}_{self.name}"

    def __repr__(self) -> str:
        return self.text()


class Hedge:
    """A flat, immutable sequence of terms and sequence variables."""

    __slots__ = ("items",)

    def __init__(self, items: Iterable = ()):
        flat: list = []
        for item in items:
            if isinstance(item, Hedge):
                flat.extend(item.items)
            else:
                flat.append(item)
        object.__setattr__(self, "items", tuple(flat))

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Hedge is immutable")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator:
        return iter(self.items)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Hedge(self.items[index])
        return self.items[index]

    def __bool__(self) -> bool:
        return bool(self.items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Hedge) and self.items == other.items

    def __hash__(self) -> int:
        return hash(("hedge", self.items))

    def __repr__(self) -> str:
        return _bounded_repr(self)


EMPTY_HEDGE = Hedge()


@dataclass(frozen=True)
class Apply:
    """Application of a head to an argument hedge.

    ``head`` is a function symbol name, a function variable, or a context
    variable.  A context variable is applied to exactly one term; the
    reserved symbol ``hole`` never takes arguments.
    """

    head: Union[str, Var]
    args: Hedge = EMPTY_HEDGE

    def __post_init__(self) -> None:
        head = self.head
        if isinstance(head, Var):
            if head.kind == "c" and len(self.args) != 1:
                raise ValueError("a context variable applies to exactly one term")
            if head.kind in ("i", "s"):
                raise ValueError(f"{head.text()} cannot head an application")
        elif head == HOLE_NAME and len(self.args) != 0:
            raise ValueError("hole never takes arguments")

    def __repr__(self) -> str:
        return _bounded_repr(self)


def _bounded_repr(value, depth: int = 40) -> str:
    """Debug text in rough source syntax; very deep values are elided."""
    if depth <= 0:
        return "..."
    if isinstance(value, Var):
        return value.text()
    if isinstance(value, Hedge):
        if not value.items:
            return "eps"
        inner = ", ".join(_bounded_repr(i, depth - 1) for i in value.items)
        return inner if len(value.items) == 1 else f"({inner})"
    name = value.head.text() if isinstance(value.head, Var) else value.head
    if not value.args:
        return name
    return name + "(" + ", ".join(_bounded_repr(a, depth - 1)
                                  for a in value.args) + ")"


#: The reserved constant marking the insertion point of a context.
HOLE = Apply(HOLE_NAME)

# A term is a Var of kind "i" or an Apply; hedge elements additionally allow
# Vars of kind "s".  We keep these as plain unions rather than a class
# hierarchy: matching and printing dispatch on the two cases anyway.
Term = Union[Var, Apply]


def num(value: int) -> Apply:
    """The numeral constant for an integer."""
    return Apply(str(value))


def int_value(t) -> Optional[int]:
    """The integer a numeral constant denotes, or None."""
    if isinstance(t, Apply) and not t.args and isinstance(t.head, str):
        name = t.head
        if name.isdigit() or (name.startswith("-") and name[1:].isdigit()):
            return int(name)
    return None


def hedge_concat(h1: Hedge, h2: Hedge) -> Hedge:
    """Flat concatenation of two hedges; ``eps`` is the unit."""
    return Hedge((h1, h2))


def singleton(t) -> Hedge:
    return Hedge((t,))


def vars_of(value) -> Iterator[Var]:
    """All variable occurrences in a term, hedge, or hedge element."""
    if isinstance(value, Var):
        yield value
    elif isinstance(value, Apply):
        if isinstance(value.head, Var):
            yield value.head
        yield from vars_of(value.args)
    elif isinstance(value, Hedge):
        for item in value:
            yield from vars_of(item)
    else:  # pragma: no cover - defensive
        raise TypeError(f"not a syntax value: {value!r}")


def is_ground(value) -> bool:
    """True when the value contains no variables of any kind."""
    return next(vars_of(value), None) is None


def hole_count(value) -> int:
    if isinstance(value, Var):
        return 0
    if isinstance(value, Apply):
        if value.head == HOLE_NAME:
            return 1
        return hole_count(value.args)
    if isinstance(value, Hedge):
        return sum(hole_count(item) for item in value)
    raise TypeError(f"not a syntax value: {value!r}")


def is_hole_free(value) -> bool:
    return hole_count(value) == 0


def is_context(t) -> bool:
    """A context is a term with exactly one occurrence of ``hole``."""
    return isinstance(t, (Var, Apply)) and hole_count(t) == 1


class Subst:
    """An immutable finite map from variables to their images.

    Individual variables map to hole-free terms, sequence variables to
    hole-free hedges, function variables to symbol names (or, for identity
    renamings, to function variables), and context variables to contexts.
    Unmapped variables are implicitly identity.

    Bindings share structure: ``bind`` returns a child substitution backed
    by its parent, which keeps backtracking cheap and makes it easy to
    recover the bindings added since any earlier point.
    """

    __slots__ = ("_var", "_value", "_parent", "_len")

    def __init__(self):
        object.__setattr__(self, "_var", None)
        object.__setattr__(self, "_value", None)
        object.__setattr__(self, "_parent", None)
        object.__setattr__(self, "_len", 0)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Subst is immutable")

    @classmethod
    def of(cls, mapping) -> "Subst":
        s = EMPTY_SUBST
        for var, value in mapping.items() if hasattr(mapping, "items") else mapping:
            s = s.bind(var, value)
        return s

    def bind(self, var: Var, value) -> "Subst":
        _check_binding(var, value)
        return self._bind_unchecked(var, value)

    def _bind_unchecked(self, var: Var, value) -> "Subst":
        # For binders that guarantee well-formed images by construction
        # (the matcher carves every image out of a ground subject).
        child = object.__new__(Subst)
        object.__setattr__(child, "_var", var)
        object.__setattr__(child, "_value", value)
        object.__setattr__(child, "_parent", self)
        object.__setattr__(child, "_len", self._len + 1)
        return child

    def get(self, var: Var, default=None):
        node = self
        while node is not None and node._len:
            if node._var == var:
                return node._value
            node = node._parent
        return default

    def __contains__(self, var: Var) -> bool:
        return self.get(var, _MISSING) is not _MISSING

    def __len__(self) -> int:
        return len(self.as_dict())

    def items(self):
        return self.as_dict().items()

    def as_dict(self) -> dict:
        seen: dict = {}
        node = self
        while node is not None and node._len:
            if node._var not in seen:
                seen[node._var] = node._value
            node = node._parent
        return seen

    def added_since(self, base: "Subst") -> dict:
        """Bindings introduced on the chain between ``base`` and this map."""
        added: dict = {}
        node = self
        while node is not base:
            if node._var not in added:
                added[node._var] = node._value
            node = node._parent
        return added

    def named(self) -> dict:
        """The bindings of non-anonymous variables only."""
        return {v: val for v, val in self.as_dict().items() if not v.anon}

    def __eq__(self, other) -> bool:
        return isinstance(other, Subst) and self.as_dict() == other.as_dict()

    def __hash__(self) -> int:
        return hash(frozenset(self.as_dict().items()))

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{var!r} -> {value!r}"
            for var, value in sorted(self.as_dict().items(), key=lambda kv: (kv[0].kind, kv[0].name))
        )
        return "{" + inner + "}"


_MISSING = object()
EMPTY_SUBST = Subst()


def _check_binding(var: Var, value) -> None:
    if var.kind == "i":
        ok = isinstance(value, (Var, Apply)) and is_hole_free(value)
        ok = ok and not (isinstance(value, Var) and value.kind != "i")
    elif var.kind == "s":
        ok = isinstance(value, Hedge) and is_hole_free(value)
    elif var.kind == "f":
        ok = isinstance(value, str) or (isinstance(value, Var) and value.kind == "f")
    else:
        ok = is_context(value)
    if not ok:
        raise ValueError(f"bad image for {var.text()}: {value!r}")


def apply_subst(subst, value):
    """Apply a substitution to a term, hedge, or hedge element.

    Application is simultaneous: images are not themselves rewritten.  The
    image of a sequence variable splices into the surrounding hedge, a bound
    function variable replaces the head of its application, and a bound
    context variable application ``c_X(t)`` becomes its context image with
    the (rewritten) argument in place of the hole.

    ``subst`` may be a :class:`Subst` or any object with a ``get(var)``
    mapping — a plain ``dict`` works — which renaming and the matcher rely on.
    """
    if isinstance(value, Hedge):
        return Hedge(_apply_elem(subst, item) for item in value)
    result = _apply_elem(subst, value)
    if isinstance(result, Hedge):
        raise ValueError(f"sequence image {result!r} cannot stand as a term")
    return result


def _apply_elem(subst, elem):
    if isinstance(elem, Var):
        image = subst.get(elem)
        return elem if image is None else image
    if isinstance(elem, Apply):
        head = elem.head
        if isinstance(head, Var) and head.kind == "c":
            arg = apply_subst(subst, elem.args[0])
            ctx = subst.get(head)
            if ctx is None:
                return Apply(head, singleton(arg))
            return apply_context(ctx, arg)
        if isinstance(head, Var):
            image = subst.get(head)
            if image is not None:
                head = image
        return Apply(head, Hedge(_apply_elem(subst, a) for a in elem.args))
    raise TypeError(f"not a syntax value: {elem!r}")


def apply_context(ctx, t):
    """Replace the single hole of ``ctx`` with the term ``t``."""
    holes = hole_count(ctx)
    if holes != 1:
        raise ValueError(f"malformed context ({holes} holes): {ctx!r}")
    return _fill_hole(ctx, t)


def _fill_hole(ctx, t):
    if isinstance(ctx, Apply):
        if ctx.head == HOLE_NAME:
            return t
        if hole_count(ctx) == 0:
            return ctx
        return Apply(ctx.head, Hedge(_fill_hole(a, t) for a in ctx.args))
    return ctx


def subterms(t) -> Iterator:
    """All subterms of a term, in pre-order."""
    yield t
    if isinstance(t, Apply):
        for arg in t.args:
            yield from subterms(arg)
