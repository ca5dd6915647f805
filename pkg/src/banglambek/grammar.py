"""Binary grammars and a breadth-first rewriting engine.

A binary grammar has productions of two shapes only: ``w => v1 v2``
(expand) and ``v1 v2 => w`` (reduce).  Words are tuples of symbol names.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from banglambek.formulas import ParseError, Var, fresh_name, parse_formula

Word = tuple[str, ...]


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class Expand:
    """``w => v1 v2``"""

    w: str
    v1: str
    v2: str

    @property
    def lhs(self) -> Word:
        return (self.w,)

    @property
    def rhs(self) -> Word:
        return (self.v1, self.v2)

    def __str__(self):
        return f"{self.w} => {self.v1} {self.v2}"


@dataclass(frozen=True)
class Reduce:
    """``v1 v2 => w``"""

    v1: str
    v2: str
    w: str

    @property
    def lhs(self) -> Word:
        return (self.v1, self.v2)

    @property
    def rhs(self) -> Word:
        return (self.w,)

    def __str__(self):
        return f"{self.v1} {self.v2} => {self.w}"


Production = Union[Expand, Reduce]


def _check_symbol(name: str) -> None:
    try:
        ok = isinstance(parse_formula(name, allow_reserved=True), Var)
    except ParseError:
        ok = False
    if not ok:
        raise GrammarError(f"{name!r} is not a valid symbol name")


@dataclass(frozen=True)
class BinaryGrammar:
    nonterminals: tuple[str, ...]
    terminals: tuple[str, ...]
    start: str
    productions: tuple[Production, ...] = ()

    def __post_init__(self):
        # keep first-occurrence order: it fixes fresh-atom numbering downstream
        for name in ("nonterminals", "terminals", "productions"):
            object.__setattr__(self, name, tuple(dict.fromkeys(getattr(self, name))))
        for s in self.symbols:
            _check_symbol(s)
        overlap = set(self.nonterminals) & set(self.terminals)
        if overlap:
            raise GrammarError(f"symbols are both terminal and nonterminal: {sorted(overlap)}")
        if self.start not in self.nonterminals:
            raise GrammarError(f"start symbol {self.start!r} is not a nonterminal")
        known = set(self.symbols)
        for p in self.productions:
            if not isinstance(p, (Expand, Reduce)):
                raise GrammarError(f"not a binary production: {p!r}")
            bad = [s for s in p.lhs + p.rhs if s not in known]
            if bad:
                raise GrammarError(f"production {p} uses unknown symbol(s) {bad}")

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.nonterminals + self.terminals

    @property
    def expands(self) -> tuple[Expand, ...]:
        return tuple(p for p in self.productions if isinstance(p, Expand))

    @property
    def reduces(self) -> tuple[Reduce, ...]:
        return tuple(p for p in self.productions if isinstance(p, Reduce))


def rewrite_step(word: Sequence[str], prod: Production, pos: int) -> Word:
    """Replace the occurrence of ``prod``'s left side starting at ``pos``."""
    word = tuple(word)
    lhs = prod.lhs
    if pos < 0 or word[pos:pos + len(lhs)] != lhs:
        raise GrammarError(f"{prod} does not apply at position {pos} of {' '.join(word)!r}")
    return word[:pos] + prod.rhs + word[pos + len(lhs):]


@dataclass(frozen=True)
class RewriteTrace:
    start: str
    steps: tuple[tuple[Production, int], ...] = ()

    def words(self) -> list[Word]:
        """Every intermediate word, starting with ``(start,)``."""
        out = [(self.start,)]
        for prod, pos in self.steps:
            out.append(rewrite_step(out[-1], prod, pos))
        return out

    @property
    def result(self) -> Word:
        return self.words()[-1]

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Yes:
    trace: RewriteTrace


@dataclass(frozen=True)
class No:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str = ""


def _successors(grammar: BinaryGrammar, word: Word, cap: int):
    for prod in grammar.productions:
        lhs = prod.lhs
        if len(word) - len(lhs) + len(prod.rhs) > cap:
            continue
        for pos in range(len(word) - len(lhs) + 1):
            if word[pos:pos + len(lhs)] == lhs:
                yield prod, pos, word[:pos] + prod.rhs + word[pos + len(lhs):]


def derives(
    grammar: BinaryGrammar,
    target: Sequence[str] | str,
    start: str | None = None,
    step_budget: int = 4,
    max_states: int = 1_000_000,
) -> Yes | No | Unknown:
    """Breadth-first search for ``start =>* target``.

    Intermediate words longer than ``len(target) + step_budget`` are pruned,
    so ``No`` means "not derivable without exceeding that length".
    ``Unknown`` is returned when more than ``max_states`` words were seen.
    """
    if isinstance(target, str):
        target = target.split()
    target = tuple(target)
    start = grammar.start if start is None else start
    if not target:
        raise GrammarError("target word must be nonempty")
    known = set(grammar.symbols)
    for s in target + (start,):
        if s not in known:
            raise GrammarError(f"unknown symbol {s!r}")
    cap = len(target) + step_budget
    origin = (start,)
    parent: dict[Word, tuple[Word, Production, int] | None] = {origin: None}
    queue = deque([origin])
    while queue:
        word = queue.popleft()
        if word == target:
            steps = []
            while parent[word] is not None:
                prev, prod, pos = parent[word]
                steps.append((prod, pos))
                word = prev
            return Yes(RewriteTrace(start, tuple(reversed(steps))))
        for prod, pos, nxt in _successors(grammar, word, cap):
            if nxt not in parent:
                if len(parent) >= max_states:
                    return Unknown(f"more than {max_states} words explored")
                parent[nxt] = (word, prod, pos)
                queue.append(nxt)
    return No()


def split_unit_productions(grammar: BinaryGrammar, units: Iterable[tuple[str, str]]) -> BinaryGrammar:
    """Add each unit production ``u => v`` as ``u => w1 w2`` plus ``w1 w2 => v``.

    ``w1`` and ``w2`` are fresh nonterminals, so the new grammar derives
    the same words over the original terminals.
    """
    taken = set(grammar.symbols)
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = fresh_name(f"w{next(counter)}")
            if name not in taken:
                taken.add(name)
                return name

    extra_n: list[str] = []
    extra_p: list[Production] = []
    for u, v in units:
        if u not in taken or v not in taken:
            raise GrammarError(f"unit production {u} => {v} uses unknown symbols")
        if u not in grammar.nonterminals:
            raise GrammarError(f"unit production must rewrite a nonterminal, got {u!r}")
        w1, w2 = fresh(), fresh()
        extra_n += [w1, w2]
        extra_p += [Expand(u, w1, w2), Reduce(w1, w2, v)]
    return BinaryGrammar(
        grammar.nonterminals + tuple(extra_n),
        grammar.terminals,
        grammar.start,
        grammar.productions + tuple(extra_p),
    )


# --------------------------------------------------------------------------
# file format

# a comment is a '#' standing alone as a token; '#w1' is a generated symbol
_COMMENT = re.compile(r"(?:^|(?<=\s))#(?=\s|$)")


def parse_grammar(text: str) -> BinaryGrammar:
    header: dict[str, list[str]] = {}
    prods: list[Production] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.split(raw, 1)[0].strip()
        if not line:
            continue
        if "=>" in line:
            lhs, rhs = (part.split() for part in line.split("=>", 1))
            if len(lhs) == 1 and len(rhs) == 2:
                prods.append(Expand(lhs[0], rhs[0], rhs[1]))
            elif len(lhs) == 2 and len(rhs) == 1:
                prods.append(Reduce(lhs[0], lhs[1], rhs[0]))
            else:
                raise GrammarError(f"line {lineno}: production must be 'w => v1 v2' or 'v1 v2 => w'")
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or key not in ("nonterminals", "terminals", "start"):
            raise GrammarError(f"line {lineno}: expected a header or a production, got {line!r}")
        if key in header:
            raise GrammarError(f"line {lineno}: duplicate '{key}:' header")
        header[key] = rest.split()
    for key in ("nonterminals", "terminals", "start"):
        if key not in header:
            raise GrammarError(f"missing '{key}:' header")
    if len(header["start"]) != 1:
        raise GrammarError("'start:' takes exactly one symbol")
    return BinaryGrammar(
        tuple(header["nonterminals"]), tuple(header["terminals"]), header["start"][0], tuple(prods)
    )


def format_grammar(grammar: BinaryGrammar) -> str:
    lines = [
        "nonterminals: " + " ".join(grammar.nonterminals),
        "terminals: " + " ".join(grammar.terminals),
        "start: " + grammar.start,
    ]
    lines += [str(p) for p in grammar.productions]
    return "\n".join(lines) + "\n"
