import pytest

from banglambek import parse_formula, parse_sequent
from banglambek.calculus import BANG_LSTAR, Rule, check_derivation, count_rules
from banglambek.lingparse import (
    LexiconError,
    UnknownWord,
    builtin_lexicon,
    parse_lexicon,
    parse_sentence,
    parses,
    sentence_to_sequents,
)
from banglambek.prover import Status, decide_restricted

LEX = builtin_lexicon()
S, NP = parse_formula("s"), parse_formula("np")


def test_lookup():
    assert LEX["whom"] == (parse_formula("(n\\n)/(s/!np)"),)
    assert LEX["yesterday"] == (parse_formula("(np\\s)\\(np\\s)"),)
    assert LEX["without"][0] == parse_formula("((np\\s)/(np\\s))/np")
    assert LEX["without"][1] == parse_formula("((np\\s)\\(np\\s))/np")
    for word in ("John", "Pete", "Mary", "Ann"):
        assert LEX[word] == (NP,)
    assert LEX["the"] == (parse_formula("np/n"),)


def test_sentence_to_sequents():
    assert sentence_to_sequents(["John", "met", "Pete"], LEX, S) == [parse_sequent("np, (np\\s)/np, np -> s")]
    lex = {"runs": (parse_formula("np\\s"),)}
    assert sentence_to_sequents("runs", lex, parse_formula("np\\s")) == [parse_sequent("np\\s -> np\\s")]


def test_ambiguity_multiplies_candidates():
    lex = parse_lexicon("w: p\nw: q\n")
    seqs = sentence_to_sequents("w w", lex, S)
    assert len(seqs) == 4
    assert seqs[1] == parse_sequent("p, q -> s")


def test_unknown_word_is_named():
    with pytest.raises(UnknownWord) as info:
        sentence_to_sequents("John saw Pete", LEX, S)
    assert info.value.word == "saw"
    assert "saw" in str(info.value)


@pytest.mark.parametrize(
    "sentence, target",
    [
        ("John met Pete", "s"),
        ("John met Pete yesterday", "s"),
        ("the person whom John met", "np"),
        ("the person whom John met yesterday", "np"),
        ("the paper that John signed without reading", "np"),
    ],
)
def test_examples_parse(sentence, target):
    outcomes = parse_sentence(sentence, LEX, parse_formula(target))
    assert parses(outcomes)
    for o in outcomes:
        assert o.result.status is not Status.UNKNOWN
        if o.derivable:
            check_derivation(o.derivation, BANG_LSTAR)


def _first_derivation(sentence, target):
    return next(o.derivation for o in parse_sentence(sentence, LEX, parse_formula(target)) if o.derivable)


def test_medial_extraction_uses_one_permutation():
    d = _first_derivation("the person whom John met yesterday", "np")
    rules = count_rules(d)
    assert rules[Rule.PERM1] + rules[Rule.PERM2] == 1
    assert rules[Rule.BANG_L] == 1


def test_parasitic_extraction_uses_contraction():
    outcomes = parse_sentence("the paper that John signed without reading", LEX, NP)
    assert [o.derivable for o in outcomes] == [False, True]
    assert count_rules(outcomes[1].derivation)[Rule.CONTR] == 1


@pytest.mark.parametrize(
    "goal",
    [
        "np/n, n, (n\\n)/(s/!np), np, (np\\s)/np, (np\\s)/(np\\s) -> np",
        "np/n, n, (n\\n)/(s/!np), np, (np\\s)/np, ((np\\s)/(np\\s))/np, np/np -> np",
    ],
    ids=["medial", "parasitic"],
)
def test_prefix_modifier_variants_are_not_derivable(goal):
    # a (np\s)/(np\s) modifier needs a verb phrase on its right; none follows
    assert decide_restricted(parse_sequent(goal)).status is Status.NOT_DERIVABLE


@pytest.mark.parametrize(
    "sentence, target",
    [("met John Pete", "s"), ("John met Pete yesterday", "np"), ("Pete John", "s")],
)
def test_negative_controls(sentence, target):
    outcomes = parse_sentence(sentence, LEX, parse_formula(target))
    assert [o.result.status for o in outcomes] == [Status.NOT_DERIVABLE] * len(outcomes)


def test_general_bang_goes_through_prove():
    lex = parse_lexicon("w: !(p/p)\nx: p\n")
    outcomes = parse_sentence("w w x", lex, parse_formula("p"))
    assert parses(outcomes)


def test_lexicon_file_format():
    lex = parse_lexicon("# header\nJohn: np   # name\n\nmet: (np\\s)/np\nJohn: np\n")
    assert lex == {"John": (NP,), "met": (parse_formula("(np\\s)/np"),)}
    for bad in ("John np", "two words: np", "John: np/", ": np"):
        with pytest.raises(LexiconError):
            parse_lexicon(bad)
