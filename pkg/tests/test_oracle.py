import pytest

from banglambek import parse_sequent
from banglambek.calculus import BANG_LSTAR, LSTAR, BRule, lstar_with
from banglambek.oracle import brute_force_derivable


@pytest.mark.parametrize(
    "goal, bound, expected",
    [
        ("p -> p", 1, True),
        ("-> p/p", 5, True),
        ("-> p/p", 1, False),
        ("q, p -> p", 50, False),
        ("p/q, q -> p", 3, True),
        ("p/q, q -> p", 2, False),
    ],
)
def test_lstar_examples(goal, bound, expected):
    assert brute_force_derivable(parse_sequent(goal), LSTAR, bound) is expected


def test_contraction_needs_room():
    goal = parse_sequent("(q/p)/p, !p -> q")
    assert brute_force_derivable(goal, BANG_LSTAR, 30)
    assert not brute_force_derivable(goal, BANG_LSTAR, 5)


def test_no_weakening_in_banglstar():
    assert not brute_force_derivable(parse_sequent("!p, q -> q"), BANG_LSTAR, 60)


def test_buszkowski_rules():
    sys_ = lstar_with((BRule(1, "p", "q", "r"),))
    assert brute_force_derivable(parse_sequent("p, q -> r"), sys_, 3)
    assert not brute_force_derivable(parse_sequent("q, p -> r"), sys_, 40)
    sys2 = lstar_with((BRule(2, "r", "q", "p"),))
    assert brute_force_derivable(parse_sequent("r/q -> p"), sys2, 4)
