"""Constructive cut elimination for L* and L* extended with Buszkowski rules.

``eliminate_cut(left, right, window, sys)`` takes cut-free derivations of
``G -> A`` and ``D1, A, D2 -> C`` (with ``A`` at index ``window`` of the
right antecedent) and returns a cut-free derivation of ``D1, G, D2 -> C``.

The transformation is the usual one:

* an axiom premise is dropped and the other premise returned;
* a cut whose formula is not principal in the right premise is pushed into
  the premise that contains it (this covers both Buszkowski rules, whose
  antecedents never contain a principal formula);
* a cut formula that is principal on the right but not on the left is pushed
  into the left premise's major premise;
* a cut on ``B/A`` or ``A\\B`` that is principal on both sides is replaced by
  two cuts on the smaller formulas ``A`` and ``B``.
"""

from __future__ import annotations

import sys as _sys

from banglambek.calculus import (
    Base,
    Derivation,
    DerivationError,
    Rule,
    System,
    check_derivation,
    is_cut_free,
)
from banglambek.formulas import Formula, Sequent, format_sequent


class CutEliminationError(ValueError):
    def __init__(self, message: str, sequent: Sequent | None = None):
        text = message if sequent is None else f"{message}: {format_sequent(sequent)}"
        super().__init__(text)
        self.sequent = sequent


def _node(rule: Rule, pos, ant, succ: Formula, *premises: Derivation) -> Derivation:
    return Derivation(rule, tuple(pos), Sequent(tuple(ant), succ), premises)


def _cut(left: Derivation, right: Derivation, d: int) -> Derivation:
    gam = left.antecedent
    lg = len(gam)
    if left.rule is Rule.AXIOM:
        return right
    if right.rule is Rule.AXIOM:
        return left

    rant, c = right.antecedent, right.succedent
    out = rant[:d] + gam + rant[d + 1:]
    shift = lg - 1
    rr, rp = right.rule, right.positions

    # cut formula is a side formula of the right premise
    if rr is Rule.OVER_R:
        return _node(rr, (), out, c, _cut(left, right.premises[0], d))
    if rr is Rule.UNDER_R:
        return _node(rr, (), out, c, _cut(left, right.premises[0], d + 1))
    if rr is Rule.B2:
        return _node(rr, rp, out, c, _cut(left, right.premises[0], d))
    if rr is Rule.B1:
        k, s = rp
        p1, p2 = right.premises
        if d < s:
            return _node(rr, (k, s + shift), out, c, _cut(left, p1, d), p2)
        return _node(rr, (k, s), out, c, p1, _cut(left, p2, d - s))
    if rr is Rule.OVER_L:
        i, g = rp
        minor, major = right.premises
        if d < i:
            return _node(rr, (i + shift, g), out, c, minor, _cut(left, major, d))
        if i < d <= i + g:
            return _node(rr, (i, g + shift), out, c, _cut(left, minor, d - i - 1), major)
        if d > i + g:
            return _node(rr, (i, g), out, c, minor, _cut(left, major, d - g))
    elif rr is Rule.UNDER_L:
        j, g = rp
        minor, major = right.premises
        if d < j - g:
            return _node(rr, (j + shift, g), out, c, minor, _cut(left, major, d))
        if j - g <= d < j:
            return _node(rr, (j + shift, g + shift), out, c, _cut(left, minor, d - j + g), major)
        if d > j:
            return _node(rr, (j, g), out, c, minor, _cut(left, major, d - g))
    else:
        raise CutEliminationError(f"unexpected rule {rr.value} in the right premise", right.conclusion)

    # cut formula is principal on the right; look at the left premise
    lr, lp = left.rule, left.positions
    if lr is Rule.OVER_L:
        i, g = lp
        minor, major = left.premises
        return _node(lr, (d + i, g), out, c, minor, _cut(major, right, d))
    if lr is Rule.UNDER_L:
        j, g = lp
        minor, major = left.premises
        return _node(lr, (d + j, g), out, c, minor, _cut(major, right, d))
    if lr is Rule.OVER_R and rr is Rule.OVER_L:
        # G, A -> B  and  D' -> A  give  G, D' -> B; then cut B into the major premise
        i, g = right.positions
        minor, major = right.premises
        inner = _cut(minor, left.premises[0], lg)
        return _cut(inner, major, d)
    if lr is Rule.UNDER_R and rr is Rule.UNDER_L:
        j, g = right.positions
        minor, major = right.premises
        inner = _cut(minor, left.premises[0], 0)
        return _cut(inner, major, d - g)
    raise CutEliminationError(
        f"cannot reduce a cut between {lr.value} and {rr.value}", Sequent(out, c)
    )


def eliminate_cut(left: Derivation, right: Derivation, window: int, sys: System) -> Derivation:
    """Cut-free derivation of the conclusion of cutting ``left`` into ``right``.

    ``window`` is the index of the cut formula in the right antecedent.
    Only L*-based systems are supported; inputs must be valid and cut-free.
    """
    if sys.base is not Base.LSTAR:
        raise CutEliminationError("cut elimination is implemented for L*-based systems only")
    for name, d in (("left", left), ("right", right)):
        if not is_cut_free(d):
            raise CutEliminationError(f"{name} premise is not cut-free", d.conclusion)
        try:
            check_derivation(d, sys)
        except DerivationError as exc:
            raise CutEliminationError(f"{name} premise is invalid ({exc})", d.conclusion) from exc
    rant = right.antecedent
    if not 0 <= window < len(rant):
        raise CutEliminationError(f"window {window} is outside the antecedent", right.conclusion)
    if rant[window] != left.succedent:
        raise CutEliminationError(
            f"formula at window {window} does not match the left succedent", right.conclusion
        )
    limit = _sys.getrecursionlimit()
    need = 4 * (_depth_bound(left) + _depth_bound(right)) + 200
    if need > limit:
        _sys.setrecursionlimit(need)
    return _cut(left, right, window)


def _depth_bound(d: Derivation) -> int:
    best = 0
    stack = [(d, 1)]
    while stack:
        n, k = stack.pop()
        best = max(best, k)
        stack.extend((p, k + 1) for p in n.premises)
    return best

