"""Categorial-grammar front end: lexicons and sentence parsing.

A sentence parses as a target type when, for some choice of lexical types,
the sequent ``type(w1), ..., type(wn) -> target`` is derivable in !L*.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from banglambek.calculus import BANG_LSTAR, Derivation
from banglambek.formulas import Formula, ParseError, Sequent, classify, parse_formula
from banglambek.prover import Budget, ProveResult, decide_restricted, prove

Lexicon = Mapping[str, tuple[Formula, ...]]


class UnknownWord(KeyError):
    def __init__(self, word: str):
        super().__init__(word)
        self.word = word

    def __str__(self):
        return f"word not in lexicon: {self.word!r}"


class LexiconError(ValueError):
    pass


_BUILTIN = """
John: np
Pete: np
Mary: np
Ann: np
person: n
paper: n
book: n
the: np/n
met: (np\\s)/np
likes: (np\\s)/np
reads: (np\\s)/np
signed: (np\\s)/np
runs: np\\s
sleeps: np\\s
yesterday: (np\\s)\\(np\\s)
today: (np\\s)\\(np\\s)
whom: (n\\n)/(s/!np)
that: (n\\n)/(s/!np)
# the first type yields a verb phrase modifier expecting the phrase on its
# right; only the second one lets "signed without reading" combine
without: ((np\\s)/(np\\s))/np
without: ((np\\s)\\(np\\s))/np
reading: np/np
"""


def parse_lexicon(text: str) -> dict[str, tuple[Formula, ...]]:
    """Read ``word: formula`` lines; repeated words accumulate types."""
    lex: dict[str, list[Formula]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, sep, rest = line.partition(":")
        word = word.strip()
        if not sep or not word or re.search(r"\s", word):
            raise LexiconError(f"line {lineno}: expected 'word: formula', got {line!r}")
        try:
            f = parse_formula(rest)
        except ParseError as exc:
            raise LexiconError(f"line {lineno}: {exc}") from exc
        types = lex.setdefault(word, [])
        if f not in types:
            types.append(f)
    return {w: tuple(fs) for w, fs in lex.items()}


def builtin_lexicon() -> dict[str, tuple[Formula, ...]]:
    return parse_lexicon(_BUILTIN)


def _words(words: Sequence[str] | str) -> list[str]:
    return words.split() if isinstance(words, str) else list(words)


def sentence_to_sequents(words: Sequence[str] | str, lex: Lexicon, target: Formula) -> list[Sequent]:
    """One sequent per combination of lexical types, in lexicon order."""
    words = _words(words)
    choices = []
    for w in words:
        if w not in lex or not lex[w]:
            raise UnknownWord(w)
        choices.append(lex[w])
    return [Sequent(tuple(combo), target) for combo in itertools.product(*choices)]


@dataclass(frozen=True)
class ParseOutcome:
    sequent: Sequent
    result: ProveResult

    @property
    def derivable(self) -> bool:
        return self.result.derivable

    @property
    def derivation(self) -> Derivation | None:
        return self.result.derivation


def parse_sentence(
    words: Sequence[str] | str,
    lex: Lexicon,
    target: Formula,
    budget: Budget = Budget(),
) -> list[ParseOutcome]:
    """Prove every candidate sequent; restricted ones are decided exactly."""
    out = []
    for seq in sentence_to_sequents(words, lex, target):
        if classify(seq).bang_on_vars_only:
            res = decide_restricted(seq)
        else:
            res = prove(seq, BANG_LSTAR, budget)
        out.append(ParseOutcome(seq, res))
    return out


def parses(outcomes: Iterable[ParseOutcome]) -> bool:
    return any(o.derivable for o in outcomes)
