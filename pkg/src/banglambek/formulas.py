"""Formulas, sequents, the text syntax, size and fragment classification.

Division is written the Lambek way: ``B/A`` wants an ``A`` on its right,
``A\\B`` wants an ``A`` on its left.  ``!`` binds tighter than both divisions
and divisions never associate, so ``p/q/r`` is rejected.

Atoms whose name starts with ``#`` are reserved for generated (fresh)
variables.  The public parser refuses them unless ``allow_reserved=True``,
which is what the file readers for derivations and rule sets use.
"""

from __future__ import annotations

import itertools
import re
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

RESERVED_PREFIX = "#"


@dataclass(frozen=True, slots=True, eq=False)
class Var:
    name: str
    _h: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "name", sys.intern(self.name))
        object.__setattr__(self, "_h", hash(("v", self.name)))

    def __eq__(self, other):
        return self is other or (type(other) is Var and self.name == other.name)

    def __hash__(self):
        return self._h

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, slots=True, eq=False)
class Over:
    """``num/den``: yields ``num`` once a ``den`` is supplied on the right."""

    num: Formula
    den: Formula
    _h: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("/", self.num._h, self.den._h)))

    def __eq__(self, other):
        return self is other or (
            type(other) is Over
            and self._h == other._h
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return self._h

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, slots=True, eq=False)
class Under:
    """``den\\num``: yields ``num`` once a ``den`` is supplied on the left."""

    den: Formula
    num: Formula
    _h: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("\\", self.den._h, self.num._h)))

    def __eq__(self, other):
        return self is other or (
            type(other) is Under
            and self._h == other._h
            and self.den == other.den
            and self.num == other.num
        )

    def __hash__(self):
        return self._h

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, slots=True, eq=False)
class Bang:
    body: Formula
    _h: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(("!", self.body._h)))

    def __eq__(self, other):
        return self is other or (
            type(other) is Bang and self._h == other._h and self.body == other.body
        )

    def __hash__(self):
        return self._h

    def __str__(self):
        return format_formula(self)


Formula = Union[Var, Over, Under, Bang]


@dataclass(frozen=True, slots=True)
class Sequent:
    antecedent: tuple[Formula, ...]
    succedent: Formula

    def __post_init__(self):
        if not isinstance(self.antecedent, tuple):
            object.__setattr__(self, "antecedent", tuple(self.antecedent))

    def __str__(self):
        return format_sequent(self)


@dataclass(frozen=True)
class FragmentFlags:
    bang_free: bool
    one_division: bool
    bang_on_vars_only: bool


# --------------------------------------------------------------------------
# text syntax

class ParseError(ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
        self.text = text


_ATOM = re.compile(r"[A-Za-z][A-Za-z0-9_']*")
_RESERVED_ATOM = re.compile(r"#[A-Za-z0-9_'~#]+")


class _Parser:
    def __init__(self, text: str, allow_reserved: bool):
        self.text = text
        self.pos = 0
        self.allow_reserved = allow_reserved

    def error(self, expected: str):
        raise ParseError(f"expected {expected}", self._byte_offset(), self.text)

    def _byte_offset(self):
        return len(self.text[: self.pos].encode("utf-8"))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at(self, token: str) -> bool:
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def formula(self) -> Formula:
        left = self.term()
        ch = self.peek()
        if ch == "/":
            self.pos += 1
            right = self.term()
            result: Formula = Over(left, right)
        elif ch == "\\":
            self.pos += 1
            right = self.term()
            result = Under(left, right)
        else:
            return left
        if self.peek() in ("/", "\\"):
            self.error("')' or end of formula (nested divisions need parentheses)")
        return result

    def term(self) -> Formula:
        ch = self.peek()
        if ch == "!":
            self.pos += 1
            return Bang(self.term())
        if ch == "(":
            self.pos += 1
            inner = self.formula()
            if self.peek() != ")":
                self.error("')'")
            self.pos += 1
            return inner
        m = _ATOM.match(self.text, self.pos)
        if m is None and self.allow_reserved:
            m = _RESERVED_ATOM.match(self.text, self.pos)
        if m is None:
            self.error("atom, '!' or '('")
        self.pos = m.end()
        return Var(m.group())

    def end(self):
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("end of input")


def parse_formula(text: str, *, allow_reserved: bool = False) -> Formula:
    p = _Parser(text, allow_reserved)
    f = p.formula()
    p.end()
    return f


def parse_sequent(text: str, *, allow_reserved: bool = False) -> Sequent:
    """Parse ``A1, ..., An -> B`` (the antecedent may be empty)."""
    p = _Parser(text, allow_reserved)
    ant: list[Formula] = []
    if not p.at("->"):
        ant.append(p.formula())
        while p.peek() == ",":
            p.pos += 1
            ant.append(p.formula())
    if not p.at("->"):
        p.error("',' or '->'")
    p.pos += 2
    succ = p.formula()
    p.end()
    return Sequent(tuple(ant), succ)


def _fmt_term(f: Formula) -> str:
    if isinstance(f, (Over, Under)):
        return "(" + format_formula(f) + ")"
    return format_formula(f)


def format_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Bang):
        return "!" + _fmt_term(f.body)
    if isinstance(f, Over):
        return _fmt_term(f.num) + "/" + _fmt_term(f.den)
    return _fmt_term(f.den) + "\\" + _fmt_term(f.num)


def format_sequent(s: Sequent) -> str:
    if not s.antecedent:
        return "-> " + format_formula(s.succedent)
    return ", ".join(map(format_formula, s.antecedent)) + " -> " + format_formula(s.succedent)


# --------------------------------------------------------------------------
# measures

def size(x: Formula | Sequent) -> int:
    """Number of variable and connective occurrences."""
    if isinstance(x, Sequent):
        return sum(size(a) for a in x.antecedent) + size(x.succedent)
    if isinstance(x, Var):
        return 1
    if isinstance(x, Bang):
        return size(x.body) + 1
    return size(x.num) + size(x.den) + 1


def subterms(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Bang):
        yield from subterms(f.body)
    elif isinstance(f, (Over, Under)):
        yield from subterms(f.num)
        yield from subterms(f.den)


def sequent_formulas(s: Sequent) -> Iterator[Formula]:
    for a in s.antecedent:
        yield from subterms(a)
    yield from subterms(s.succedent)


def atoms(x: Formula | Sequent | Iterable[Formula]) -> set[str]:
    if isinstance(x, Sequent):
        terms: Iterable[Formula] = sequent_formulas(x)
    elif isinstance(x, (Var, Over, Under, Bang)):
        terms = subterms(x)
    else:
        terms = itertools.chain.from_iterable(subterms(f) for f in x)
    return {t.name for t in terms if isinstance(t, Var)}


def is_bang_free(f: Formula) -> bool:
    return not any(isinstance(t, Bang) for t in subterms(f))


def bang_on_vars_only(f: Formula) -> bool:
    return all(isinstance(t.body, Var) for t in subterms(f) if isinstance(t, Bang))


def classify(s: Sequent) -> FragmentFlags:
    terms = list(sequent_formulas(s))
    bangs = [t for t in terms if isinstance(t, Bang)]
    return FragmentFlags(
        bang_free=not bangs,
        one_division=not any(isinstance(t, Under) for t in terms),
        bang_on_vars_only=all(isinstance(b.body, Var) for b in bangs),
    )


# --------------------------------------------------------------------------
# fresh atoms

def is_reserved(name: str) -> bool:
    return name.startswith(RESERVED_PREFIX)


def fresh_name(stem: str) -> str:
    """A reserved atom name; user atoms can never start with ``#``."""
    return RESERVED_PREFIX + stem


class FreshSupply:
    """Deterministic counter-based fresh atom generator."""

    def __init__(self, stem: str = "u"):
        self.stem = stem
        self._counter = itertools.count()

    def __call__(self) -> str:
        return fresh_name(f"{self.stem}{next(self._counter)}")
