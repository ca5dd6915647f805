import random
from collections import defaultdict

import pytest

from banglambek import Sequent, Var, parse_formula, parse_sequent, size
from banglambek.calculus import (
    BANG_LSTAR,
    LSTAR,
    BRule,
    Derivation,
    Rule,
    axiom,
    check_derivation,
    is_cut_free,
    lstar_with,
)
from banglambek.cutelim import CutEliminationError, eliminate_cut
from banglambek.prover import Budget, prove
from enumerate_sequents import sequents_up_to

SMALL = Budget(max_logical_steps=10, max_contractions=0, max_nodes=20_000)
RULES = (BRule(1, "p", "q", "r"), BRule(2, "r", "q", "p"), BRule(1, "q", "q", "p"))


def seq(text):
    return parse_sequent(text)


def derive(text, sys_):
    res = prove(seq(text), sys_, SMALL)
    assert res.derivable, text
    return res.derivation


def _pool(sys_, max_size, names):
    out = []
    for goal in sequents_up_to(max_size, names):
        res = prove(goal, sys_, SMALL)
        if res.derivable:
            out.append(res.derivation)
    return out


def _random_pairs(pool, count, rng, max_size=10):
    by_succ = defaultdict(list)
    for d in pool:
        by_succ[d.succedent].append(d)
    candidates = []
    for right in pool:
        for w, f in enumerate(right.antecedent):
            for left in by_succ.get(f, ()):
                if max(size(left.conclusion), size(right.conclusion)) <= max_size:
                    candidates.append((left, right, w))
    assert len(candidates) >= count
    return rng.sample(candidates, count)


def _check_pairs(pairs, sys_):
    for left, right, w in pairs:
        out = eliminate_cut(left, right, w, sys_)
        rant = right.antecedent
        want = Sequent(rant[:w] + left.antecedent + rant[w + 1:], right.succedent)
        assert out.conclusion == want
        assert is_cut_free(out)
        check_derivation(out, sys_)


def test_random_pairs_lstar():
    rng = random.Random(7)
    pairs = _random_pairs(_pool(LSTAR, 7, ("p", "q")), 200, rng)
    _check_pairs(pairs, LSTAR)


def test_random_pairs_with_buszkowski_rules():
    sys_ = lstar_with(RULES)
    rng = random.Random(11)
    pairs = _random_pairs(_pool(sys_, 5, ("p", "q", "r")), 100, rng)
    assert any(n.rule in (Rule.B1, Rule.B2) for left, right, _ in pairs for n in (left, right))
    _check_pairs(pairs, sys_)


def test_axiom_on_the_left_returns_right():
    sys_ = lstar_with((BRule(1, "q", "p", "r"),))
    right = derive("q, p -> r", sys_)
    assert eliminate_cut(axiom(Var("p")), right, 1, sys_) is right


def test_principal_cut_on_both_sides():
    sys_ = lstar_with((BRule(1, "p", "q", "r"),))
    b1 = derive("p, q -> r", sys_)
    left = Derivation(Rule.OVER_R, (), seq("p -> r/q"), (b1,))
    right = derive("r/q, q -> r", sys_)
    assert right.rule is Rule.OVER_L
    out = eliminate_cut(left, right, 0, sys_)
    assert out.conclusion == seq("p, q -> r")
    check_derivation(out, sys_)
    assert is_cut_free(out)


def test_cut_moves_above_b1():
    sys_ = lstar_with((BRule(1, "p", "q", "r"),))
    right = derive("p, q -> r", sys_)
    left = derive("p/s, s -> p", sys_)
    out = eliminate_cut(left, right, 0, sys_)
    assert out.rule is Rule.B1
    assert out.positions == (0, 2)
    assert out.conclusion == seq("p/s, s, q -> r")
    assert out.premises[0].conclusion == seq("p/s, s -> p")
    check_derivation(out, sys_)


def test_b1_rule_matches_its_axiom_form():
    sys_ = lstar_with((BRule(1, "p", "q", "r"),))
    ax = derive("p, q -> r", sys_)
    for pi1, pi2 in [("p/s, s", "q"), ("p", "t, t\\q"), ("p/(q/q)", "q/r, r")]:
        d1 = derive(f"{pi1} -> p", sys_)
        d2 = derive(f"{pi2} -> q", sys_)
        step = eliminate_cut(d1, ax, 0, sys_)
        out = eliminate_cut(d2, step, len(d1.antecedent), sys_)
        assert out.conclusion == seq(f"{pi1}, {pi2} -> r")
        check_derivation(out, sys_)


def test_b2_rule_matches_its_axiom_form():
    sys_ = lstar_with((BRule(2, "p", "q", "r"),))
    ax = derive("p/q -> r", sys_)
    assert ax.rule is Rule.B2
    for pi in ["p/q", "s, s\\(p/q)", "(p/q)/t, t"]:
        prem = derive(f"{pi}, q -> p", sys_)
        left = Derivation(Rule.OVER_R, (), seq(f"{pi} -> p/q"), (prem,))
        out = eliminate_cut(left, ax, 0, sys_)
        assert out.conclusion == seq(f"{pi} -> r")
        check_derivation(out, sys_)


def test_preconditions():
    p = axiom(Var("p"))
    right = derive("p/q, q -> p", LSTAR)
    with pytest.raises(CutEliminationError):
        eliminate_cut(p, right, 0, LSTAR)
    with pytest.raises(CutEliminationError):
        eliminate_cut(p, right, 5, LSTAR)
    with pytest.raises(CutEliminationError):
        eliminate_cut(p, p, 0, BANG_LSTAR)
    bogus = Derivation(Rule.AXIOM, (), seq("p -> q"))
    with pytest.raises(CutEliminationError) as info:
        eliminate_cut(bogus, right, 1, LSTAR)
    assert info.value.sequent == seq("p -> q")
    cut = Derivation(Rule.CUT, (0,), seq("p -> p"), (p, p))
    with pytest.raises(CutEliminationError):
        eliminate_cut(cut, p, 0, LSTAR)
    assert parse_formula("p") == p.succedent
