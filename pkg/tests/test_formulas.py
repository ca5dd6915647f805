import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banglambek import (
    Bang,
    FragmentFlags,
    Over,
    ParseError,
    Sequent,
    Under,
    Var,
    classify,
    format_formula,
    format_sequent,
    parse_formula,
    parse_sequent,
    size,
)
from banglambek.formulas import FreshSupply, atoms, fresh_name, is_reserved
from conftest import formula_depth, formulas

p, q, r, s, np_ = Var("p"), Var("q"), Var("r"), Var("s"), Var("np")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("p", p),
        ("(np\\s)/np", Over(Under(np_, s), np_)),
        ("!np", Bang(np_)),
        ("!!p", Bang(Bang(p))),
        ("!(p/q)", Bang(Over(p, q))),
        ("!p/q", Over(Bang(p), q)),
        ("  ( p )  ", p),
        ("r/(p/q)", Over(r, Over(p, q))),
    ],
)
def test_parse_formula(text, expected):
    assert parse_formula(text) == expected


@pytest.mark.parametrize(
    "f, text",
    [
        (p, "p"),
        (Over(r, Over(p, q)), "r/(p/q)"),
        (Bang(np_), "!np"),
        (Under(Under(np_, s), Under(np_, s)), "(np\\s)\\(np\\s)"),
        (Bang(Over(p, q)), "!(p/q)"),
    ],
)
def test_format_formula(f, text):
    assert format_formula(f) == text


@pytest.mark.parametrize(
    "text, offset",
    [
        ("p/q/r", 3),
        ("p\\q/r", 3),
        ("(p", 2),
        ("", 0),
        ("p q", 2),
        ("#p", 0),
        ("1p", 0),
    ],
)
def test_parse_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse_formula(text)
    assert info.value.offset == offset
    assert "expected" in info.value.message


def test_parse_error_offset_is_in_bytes():
    with pytest.raises(ParseError) as info:
        parse_formula("(p/é")
    assert info.value.offset == 3


def test_reserved_atoms_need_opt_in():
    assert parse_formula("#u1/#a~2", allow_reserved=True) == Over(Var("#u1"), Var("#a~2"))
    with pytest.raises(ParseError):
        parse_sequent("#u1 -> p")


@given(formulas(max_depth=8))
@settings(max_examples=300)
def test_round_trip(f):
    assert formula_depth(f) <= 8
    assert parse_formula(format_formula(f)) == f


@given(st.lists(formulas(max_depth=5), max_size=4), formulas(max_depth=5))
def test_sequent_round_trip(ant, succ):
    seq = Sequent(tuple(ant), succ)
    assert parse_sequent(format_sequent(seq)) == seq


@given(formulas(max_depth=8))
def test_size_exceeds_immediate_subterms(f):
    if isinstance(f, Bang):
        assert size(f) == size(f.body) + 1
    elif isinstance(f, (Over, Under)):
        assert size(f) == size(f.num) + size(f.den) + 1
    else:
        assert size(f) == 1


def test_sizes():
    assert size(p) == 1
    assert size(Over(p, q)) == 3
    assert size(parse_sequent("!p, q -> q")) == 4


def test_empty_antecedent_sequent():
    seq = parse_sequent("-> p/p")
    assert seq.antecedent == ()
    assert format_sequent(seq) == "-> p/p"


def test_equality_is_syntactic():
    assert Over(p, q) != Under(q, p)
    assert Over(p, q) == parse_formula("p/q")
    assert hash(Over(p, q)) == hash(parse_formula("p/q"))
    assert Var("p") != Var("q")


@pytest.mark.parametrize(
    "text, flags",
    [
        ("p/q, q -> p", FragmentFlags(True, True, True)),
        ("!(r/(p/q)), s -> s", FragmentFlags(False, True, False)),
        ("np, (np\\s)/np, np -> s", FragmentFlags(True, False, True)),
        ("!p, q -> q", FragmentFlags(False, True, True)),
    ],
)
def test_classify(text, flags):
    assert classify(parse_sequent(text)) == flags


@given(st.lists(formulas(max_depth=4), max_size=3), formulas(max_depth=4))
def test_bang_free_implies_bang_on_vars(ant, succ):
    flags = classify(Sequent(tuple(ant), succ))
    assert not flags.bang_free or flags.bang_on_vars_only
    assert classify(Sequent(tuple(ant), succ)) == flags


def test_fresh_names_are_reserved():
    supply = FreshSupply("u")
    names = [supply() for _ in range(3)]
    assert names == ["#u0", "#u1", "#u2"]
    assert all(is_reserved(n) for n in names)
    assert fresh_name("a1") == "#a1"
    assert atoms(parse_sequent("p/q, !r -> p")) == {"p", "q", "r"}
