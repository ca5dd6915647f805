"""Inference systems, derivation trees and the derivation checker.

Every node records the rule used plus the positional data needed to check
it locally (which antecedent formula is principal, how long the consumed
segment is, where a permuted formula moves).  Positions are 0-based indices
into the *conclusion* antecedent unless stated otherwise:

========  =============  ===================================================
rule      positions      meaning
========  =============  ===================================================
axiom     ()
/R, \\R   ()
/L        (i, g)         ``ant[i]`` is ``B/A``; ``ant[i+1:i+1+g]`` proves A
\\L       (j, g)         ``ant[j]`` is ``A\\B``; ``ant[j-g:j]`` proves A
!L        (i,)           ``ant[i]`` is ``!A``, premise has ``A`` there
!R        ()
perm1     (src, dst)     src in the premise, dst in the conclusion, src <= dst
perm2     (src, dst)     as perm1 with dst <= src
contr     (i,)           ``ant[i]`` is ``!A``; premise has ``!A, !A`` there
B1        (k, s)         rule-set entry k; ``ant[:s]`` proves its first atom
B2        (k,)           rule-set entry k
cut       (d,)           the left premise's antecedent is spliced at d
========  =============  ===================================================
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from banglambek.formulas import (
    Bang,
    Formula,
    Over,
    Sequent,
    Under,
    Var,
    format_sequent,
    is_bang_free,
    parse_sequent,
)


class Rule(str, enum.Enum):
    AXIOM = "axiom"
    OVER_R = "/R"
    OVER_L = "/L"
    UNDER_R = "\\R"
    UNDER_L = "\\L"
    BANG_L = "!L"
    BANG_R = "!R"
    PERM1 = "perm1"
    PERM2 = "perm2"
    CONTR = "contr"
    B1 = "B1"
    B2 = "B2"
    CUT = "cut"


PERMS = (Rule.PERM1, Rule.PERM2)
STRUCTURAL = (Rule.PERM1, Rule.PERM2, Rule.CONTR)
_ARITY = {
    Rule.AXIOM: 0,
    Rule.OVER_L: 2,
    Rule.UNDER_L: 2,
    Rule.B1: 2,
    Rule.CUT: 2,
}
_NPOS = {
    Rule.AXIOM: 0, Rule.OVER_R: 0, Rule.UNDER_R: 0, Rule.BANG_R: 0,
    Rule.OVER_L: 2, Rule.UNDER_L: 2, Rule.PERM1: 2, Rule.PERM2: 2, Rule.B1: 2,
    Rule.BANG_L: 1, Rule.CONTR: 1, Rule.B2: 1, Rule.CUT: 1,
}


def arity(rule: Rule) -> int:
    return _ARITY.get(rule, 1)


@dataclass(frozen=True)
class BRule:
    """A Buszkowski rule over fixed atoms.

    kind 1:  from ``P1 -> p`` and ``P2 -> q`` infer ``P1, P2 -> r``
    kind 2:  from ``P, q -> p`` infer ``P -> r``
    """

    kind: int
    p: str
    q: str
    r: str

    def __post_init__(self):
        if self.kind not in (1, 2):
            raise ValueError(f"Buszkowski rule kind must be 1 or 2, got {self.kind}")

    def __str__(self):
        return f"B{self.kind} {self.p} {self.q} {self.r}"


RuleSet = tuple  # tuple[BRule, ...]


class Base(str, enum.Enum):
    LSTAR = "lstar"
    BANG_LSTAR = "banglstar"


@dataclass(frozen=True)
class System:
    base: Base = Base.BANG_LSTAR
    rules: tuple[BRule, ...] = ()
    allow_cut: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if self.base is Base.BANG_LSTAR and self.rules:
            raise ValueError("Buszkowski rules are only combined with L*, not !L*")


LSTAR = System(Base.LSTAR)
BANG_LSTAR = System(Base.BANG_LSTAR)


def lstar_with(rules: Sequence[BRule]) -> System:
    return System(Base.LSTAR, tuple(rules))


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: Rule
    positions: tuple[int, ...]
    conclusion: Sequent
    premises: tuple["Derivation", ...] = ()
    _size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(self.positions))
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "_size", 1 + sum(p._size for p in self.premises))

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return (
            self.rule == other.rule
            and self.positions == other.positions
            and self.conclusion == other.conclusion
            and self.premises == other.premises
        )

    __hash__ = None

    @property
    def antecedent(self) -> tuple[Formula, ...]:
        return self.conclusion.antecedent

    @property
    def succedent(self) -> Formula:
        return self.conclusion.succedent

    def __str__(self):
        return render(self)


def axiom(f: Formula) -> Derivation:
    return Derivation(Rule.AXIOM, (), Sequent((f,), f))


def node_count(d: Derivation) -> int:
    return d._size


def iter_nodes(d: Derivation) -> Iterator[Derivation]:
    stack = [d]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.premises))


def count_rules(d: Derivation) -> Counter:
    return Counter(n.rule for n in iter_nodes(d))


def is_cut_free(d: Derivation) -> bool:
    return all(n.rule is not Rule.CUT for n in iter_nodes(d))


def depth(d: Derivation) -> int:
    return 1 + max((depth(p) for p in d.premises), default=0)


# --------------------------------------------------------------------------
# checking

class DerivationError(ValueError):
    """A node does not instantiate a rule of the system.

    ``path`` lists premise indices from the root to the failing node.
    """

    def __init__(self, path: tuple[int, ...], message: str, sequent: Sequent | None = None):
        where = "root" if not path else "root" + "".join(f".{i}" for i in path)
        text = f"{where}: {message}"
        if sequent is not None:
            text += f" [{format_sequent(sequent)}]"
        super().__init__(text)
        self.path = path
        self.message = message
        self.sequent = sequent


def _moved(ant: Sequence[Formula], src: int, dst: int) -> tuple[Formula, ...]:
    rest = list(ant[:src]) + list(ant[src + 1:])
    rest.insert(dst, ant[src])
    return tuple(rest)


def expected_premises(
    rule: Rule, pos: tuple[int, ...], concl: Sequent, sys: System, premises=()
) -> list[Sequent]:
    """Premise sequents forced by a rule instance; raises ``ValueError``.

    For the two rules whose premises are not determined by the conclusion
    alone (permutations and cut), the actual premise conclusions are
    consulted.
    """
    ant, c = concl.antecedent, concl.succedent
    n = len(ant)
    if len(pos) != _NPOS[rule]:
        raise ValueError(f"{rule.value} takes {_NPOS[rule]} position(s), got {len(pos)}")
    if any(x < 0 for x in pos):
        raise ValueError("negative position")

    if rule is Rule.AXIOM:
        if ant != (c,):
            raise ValueError("axiom must have the form A -> A")
        return []
    if rule is Rule.OVER_R:
        if not isinstance(c, Over):
            raise ValueError("(->/) needs a succedent of the form B/A")
        return [Sequent(ant + (c.den,), c.num)]
    if rule is Rule.UNDER_R:
        if not isinstance(c, Under):
            raise ValueError("(->\\) needs a succedent of the form A\\B")
        return [Sequent((c.den,) + ant, c.num)]
    if rule is Rule.OVER_L:
        i, g = pos
        if i >= n or i + 1 + g > n:
            raise ValueError("(/->) position out of range")
        f = ant[i]
        if not isinstance(f, Over):
            raise ValueError("(/->) principal formula is not of the form B/A")
        return [
            Sequent(ant[i + 1:i + 1 + g], f.den),
            Sequent(ant[:i] + (f.num,) + ant[i + 1 + g:], c),
        ]
    if rule is Rule.UNDER_L:
        j, g = pos
        if j >= n or j - g < 0:
            raise ValueError("(\\->) position out of range")
        f = ant[j]
        if not isinstance(f, Under):
            raise ValueError("(\\->) principal formula is not of the form A\\B")
        return [
            Sequent(ant[j - g:j], f.den),
            Sequent(ant[:j - g] + (f.num,) + ant[j + 1:], c),
        ]
    if rule is Rule.BANG_L:
        (i,) = pos
        if i >= n:
            raise ValueError("(!->) position out of range")
        if not isinstance(ant[i], Bang):
            raise ValueError("(!->) principal formula is not banged")
        return [Sequent(ant[:i] + (ant[i].body,) + ant[i + 1:], c)]
    if rule is Rule.BANG_R:
        if not isinstance(c, Bang):
            raise ValueError("(->!) needs a banged succedent")
        if not all(isinstance(a, Bang) for a in ant):
            raise ValueError("(->!) premise antecedent contains a non-banged formula")
        return [Sequent(ant, c.body)]
    if rule in PERMS:
        src, dst = pos
        if not premises:
            raise ValueError("permutation needs its premise to be checked")
        pant = premises[0].conclusion.antecedent
        if len(pant) != n or src >= n or dst >= n:
            raise ValueError("permutation position out of range")
        if rule is Rule.PERM1 and src > dst:
            raise ValueError("(perm1) moves a formula to the right")
        if rule is Rule.PERM2 and dst > src:
            raise ValueError("(perm2) moves a formula to the left")
        if not isinstance(pant[src], Bang):
            raise ValueError("permuted formula is not banged")
        return [Sequent(_moved(ant, dst, src), c)]
    if rule is Rule.CONTR:
        (i,) = pos
        if i >= n:
            raise ValueError("(contr) position out of range")
        if not isinstance(ant[i], Bang):
            raise ValueError("(contr) formula is not banged")
        return [Sequent(ant[:i] + (ant[i], ant[i]) + ant[i + 1:], c)]
    if rule in (Rule.B1, Rule.B2):
        k = pos[0]
        if k >= len(sys.rules):
            raise ValueError(f"no Buszkowski rule with index {k}")
        br = sys.rules[k]
        if br.kind != (1 if rule is Rule.B1 else 2):
            raise ValueError(f"rule {k} is {br}, not {rule.value}")
        if c != Var(br.r):
            raise ValueError(f"succedent must be the atom {br.r}")
        if rule is Rule.B1:
            s = pos[1]
            if s > n:
                raise ValueError("(B1) split out of range")
            return [Sequent(ant[:s], Var(br.p)), Sequent(ant[s:], Var(br.q))]
        return [Sequent(ant + (Var(br.q),), Var(br.p))]
    if rule is Rule.CUT:
        if not sys.allow_cut:
            raise ValueError("cut is not a rule of this system")
        (d,) = pos
        if len(premises) != 2:
            raise ValueError("cut needs two premises")
        left = premises[0].conclusion
        right = premises[1].conclusion
        if d >= len(right.antecedent) or right.antecedent[d] != left.succedent:
            raise ValueError("cut formula not found at the stated position")
        return [left, right]
    raise ValueError(f"unknown rule {rule!r}")


def _check_node(d: Derivation, sys: System, path: tuple[int, ...]):
    rule = d.rule
    if sys.base is Base.LSTAR:
        if rule in (Rule.BANG_L, Rule.BANG_R) or rule in STRUCTURAL:
            raise DerivationError(path, f"{rule.value} is not a rule of L*", d.conclusion)
        if not all(is_bang_free(f) for f in d.conclusion.antecedent + (d.conclusion.succedent,)):
            raise DerivationError(path, "L* sequents may not contain !", d.conclusion)
    elif rule in (Rule.B1, Rule.B2):
        raise DerivationError(path, "Buszkowski rules are not part of !L*", d.conclusion)
    if len(d.premises) != arity(rule):
        raise DerivationError(
            path, f"{rule.value} takes {arity(rule)} premise(s), got {len(d.premises)}",
            d.conclusion,
        )
    try:
        want = expected_premises(rule, d.positions, d.conclusion, sys, d.premises)
    except ValueError as exc:
        raise DerivationError(path, str(exc), d.conclusion) from None
    for i, (w, p) in enumerate(zip(want, d.premises)):
        if p.conclusion != w:
            raise DerivationError(
                path + (i,),
                f"premise {i} of {rule.value} should be {format_sequent(w)}",
                p.conclusion,
            )


def check_derivation(d: Derivation, sys: System) -> None:
    """Raise ``DerivationError`` at the first (pre-order) invalid node."""
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        n, path = stack.pop()
        _check_node(n, sys, path)
        for i in reversed(range(len(n.premises))):
            stack.append((n.premises[i], path + (i,)))


def is_valid(d: Derivation, sys: System) -> bool:
    try:
        check_derivation(d, sys)
    except DerivationError:
        return False
    return True


# --------------------------------------------------------------------------
# backward reading of the rules

class Expansion(NamedTuple):
    rule: Rule
    positions: tuple[int, ...]
    premises: tuple[Sequent, ...]


def backward_expansions(goal: Sequent, sys: System, contr_allowed: bool = True) -> list[Expansion]:
    """All rule instances of ``sys`` whose conclusion is exactly ``goal``.

    Structural rules are listed only when ``contr_allowed``; cut never is.
    """
    ant, c = goal.antecedent, goal.succedent
    n = len(ant)
    out: list[Expansion] = []
    if ant == (c,):
        out.append(Expansion(Rule.AXIOM, (), ()))
    if isinstance(c, Over):
        out.append(Expansion(Rule.OVER_R, (), (Sequent(ant + (c.den,), c.num),)))
    if isinstance(c, Under):
        out.append(Expansion(Rule.UNDER_R, (), (Sequent((c.den,) + ant, c.num),)))
    banged = sys.base is Base.BANG_LSTAR
    if banged and isinstance(c, Bang) and all(isinstance(a, Bang) for a in ant):
        out.append(Expansion(Rule.BANG_R, (), (Sequent(ant, c.body),)))
    for i, f in enumerate(ant):
        if isinstance(f, Over):
            for g in range(n - i):
                out.append(Expansion(
                    Rule.OVER_L, (i, g),
                    (Sequent(ant[i + 1:i + 1 + g], f.den),
                     Sequent(ant[:i] + (f.num,) + ant[i + 1 + g:], c)),
                ))
        elif isinstance(f, Under):
            for g in range(i + 1):
                out.append(Expansion(
                    Rule.UNDER_L, (i, g),
                    (Sequent(ant[i - g:i], f.den),
                     Sequent(ant[:i - g] + (f.num,) + ant[i + 1:], c)),
                ))
        elif isinstance(f, Bang) and banged:
            out.append(Expansion(
                Rule.BANG_L, (i,), (Sequent(ant[:i] + (f.body,) + ant[i + 1:], c),)
            ))
    if banged and contr_allowed:
        for i, f in enumerate(ant):
            if not isinstance(f, Bang):
                continue
            out.append(Expansion(
                Rule.CONTR, (i,), (Sequent(ant[:i] + (f, f) + ant[i + 1:], c),)
            ))
            for src in range(n):
                if src == i:
                    continue
                # conclusion has f at i; in the premise it sat at src
                rule = Rule.PERM1 if src < i else Rule.PERM2
                out.append(Expansion(rule, (src, i), (Sequent(_moved(ant, i, src), c),)))
    for k, br in enumerate(sys.rules):
        if c != Var(br.r):
            continue
        if br.kind == 1:
            for s in range(n + 1):
                out.append(Expansion(
                    Rule.B1, (k, s), (Sequent(ant[:s], Var(br.p)), Sequent(ant[s:], Var(br.q)))
                ))
        else:
            out.append(Expansion(Rule.B2, (k,), (Sequent(ant + (Var(br.q),), Var(br.p)),)))
    return out


# --------------------------------------------------------------------------
# permutation blocks

def perm_step(d: Derivation, src: int, dst: int) -> Derivation:
    """Move the banged formula at ``src`` of ``d``'s conclusion to ``dst``."""
    ant = d.conclusion.antecedent
    rule = Rule.PERM1 if src <= dst else Rule.PERM2
    return Derivation(rule, (src, dst), Sequent(_moved(ant, src, dst), d.succedent), (d,))


def contr_step(d: Derivation, i: int) -> Derivation:
    """Merge the equal banged formulas at ``i`` and ``i + 1``."""
    ant = d.conclusion.antecedent
    if not (isinstance(ant[i], Bang) and ant[i] == ant[i + 1]):
        raise ValueError("contraction needs two adjacent copies of a banged formula")
    return Derivation(Rule.CONTR, (i,), Sequent(ant[:i] + ant[i + 1:], d.succedent), (d,))


def perm_moves(top: Sequence[Formula], bottom: Sequence[Formula]) -> list[tuple[int, int]]:
    """A shortest list of single-formula moves turning ``top`` into ``bottom``.

    Only banged formulas move; non-banged ones must already be in the same
    relative order.  The formulas kept in place form a longest common
    subsequence that includes every non-banged formula, so each displaced
    banged formula moves exactly once.
    """
    L = len(top)
    if len(bottom) != L or Counter(top) != Counter(bottom):
        raise ValueError("permutation block must preserve the antecedent multiset")
    neg = float("-inf")
    # best[i][j]: max kept pairs for top[i:], bottom[j:]
    best = [[neg] * (L + 1) for _ in range(L + 1)]
    best[L][L] = 0
    for i in range(L, -1, -1):
        for j in range(L, -1, -1):
            if i == L and j == L:
                continue
            v = neg
            if i < L and j < L and top[i] == bottom[j]:
                v = 1 + best[i + 1][j + 1]
            if i < L and isinstance(top[i], Bang):
                v = max(v, best[i + 1][j])
            if j < L and isinstance(bottom[j], Bang):
                v = max(v, best[i][j + 1])
            best[i][j] = v
    if best[0][0] == neg:
        raise ValueError("non-banged formulas change order inside a permutation block")

    # recover matching: ids for top positions, bottom positions get ids
    bottom_id: list[int | None] = [None] * L
    kept_top = set()
    i = j = 0
    while i < L or j < L:
        if i < L and j < L and top[i] == bottom[j] and best[i][j] == 1 + best[i + 1][j + 1]:
            bottom_id[j] = i
            kept_top.add(i)
            i += 1
            j += 1
        elif i < L and isinstance(top[i], Bang) and best[i][j] == best[i + 1][j]:
            i += 1
        else:
            j += 1
    spare: dict[Formula, list[int]] = {}
    for t in range(L):
        if t not in kept_top:
            spare.setdefault(top[t], []).append(t)
    moved = set()
    for j in range(L):
        if bottom_id[j] is None:
            bottom_id[j] = spare[bottom[j]].pop(0)
            moved.add(j)

    cur = list(range(L))
    moves: list[tuple[int, int]] = []
    for j in range(L):
        if j not in moved:
            continue
        ident = bottom_id[j]
        src = cur.index(ident)
        cur.pop(src)
        dst = 0 if j == 0 else cur.index(bottom_id[j - 1]) + 1
        cur.insert(dst, ident)
        if src != dst:
            moves.append((src, dst))
    assert [top[t] for t in cur] == list(bottom)
    return moves


def permute_to(d: Derivation, target: Sequence[Formula]) -> Derivation:
    for src, dst in perm_moves(d.conclusion.antecedent, target):
        d = perm_step(d, src, dst)
    return d


def rearrange(d: Derivation, target: Sequence[Formula]) -> Derivation:
    """Extend ``d`` by contractions and permutations to conclude ``target``.

    ``d``'s antecedent may hold extra copies of banged formulas that occur
    in ``target``; each extra copy is permuted leftward next to another copy
    and contracted, then one permutation block produces the target order.
    """
    target = tuple(target)
    have = Counter(d.conclusion.antecedent)
    need = Counter(target)
    extra = have - need
    if need - have:
        raise ValueError("target antecedent has formulas the derivation lacks")
    for f in extra:
        if not isinstance(f, Bang):
            raise ValueError(f"cannot discard non-banged formula {f}")
    for f, cnt in extra.items():
        for _ in range(cnt):
            ant = d.conclusion.antecedent
            first = ant.index(f)
            second = ant.index(f, first + 1)
            if second != first + 1:
                d = perm_step(d, second, first + 1)
            d = contr_step(d, first)
    return permute_to(d, target)


def normalize_perm_blocks(d: Derivation, sys: System | None = None) -> Derivation:
    """Shrink every maximal run of permutations to one move per displaced formula."""
    if sys is not None:
        check_derivation(d, sys)
    return _normalize(d)


def _normalize(d: Derivation) -> Derivation:
    if d.rule in PERMS:
        top = d
        while top.rule in PERMS:
            top = top.premises[0]
        return permute_to(_normalize(top), d.conclusion.antecedent)
    if not d.premises:
        return d
    new = tuple(_normalize(p) for p in d.premises)
    if all(a is b for a, b in zip(new, d.premises)):
        return d
    return Derivation(d.rule, d.positions, d.conclusion, new)


def perm_blocks(d: Derivation) -> list[int]:
    """Lengths of all maximal permutation runs."""
    out = []
    for n in iter_nodes(d):
        if n.rule in PERMS:
            continue
        for p in n.premises:
            k = 0
            while p.rule in PERMS:
                k += 1
                p = p.premises[0]
            if k:
                out.append(k)
    if d.rule in PERMS:
        k, p = 0, d
        while p.rule in PERMS:
            k += 1
            p = p.premises[0]
        out.append(k)
    return out


# --------------------------------------------------------------------------
# serialization

def to_json(d: Derivation) -> dict:
    return {
        "rule": d.rule.value,
        "positions": list(d.positions),
        "conclusion": format_sequent(d.conclusion),
        "premises": [to_json(p) for p in d.premises],
    }


def from_json(obj: dict) -> Derivation:
    try:
        rule = Rule(obj["rule"])
        return Derivation(
            rule,
            tuple(int(x) for x in obj["positions"]),
            parse_sequent(obj["conclusion"], allow_reserved=True),
            tuple(from_json(p) for p in obj["premises"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed derivation node: {exc}") from None


def dumps(d: Derivation) -> str:
    return json.dumps(to_json(d), indent=1, sort_keys=True, ensure_ascii=False)


def loads(text: str) -> Derivation:
    return from_json(json.loads(text))


def render(d: Derivation, indent: str = "") -> str:
    """Indented text tree, conclusion first."""
    pos = ",".join(map(str, d.positions))
    label = d.rule.value + (f"[{pos}]" if pos else "")
    lines = [f"{indent}{format_sequent(d.conclusion)}    ({label})"]
    for p in d.premises:
        lines.append(render(p, indent + "  "))
    return "\n".join(lines)
