"""Brute-force derivability oracle by forward enumeration.

Derivations are grown upward-to-downward from axioms, cheapest first
(a Knuth-style generalisation of Dijkstra's algorithm where the cost of a
derivation is its node count).  Only sequents that can occur in a cut-free
derivation of the goal are kept:

* antecedent formulas are negative subformulas of the goal, the succedent
  is a positive one (plus the atoms of any Buszkowski rules);
* when ``!`` only applies to atoms, compound formulas are never duplicated,
  so each compound may occur at most as often as it occurs in the goal,
  and antecedents stay shorter than ``3n``;
* an antecedent is never longer than the derivation proving it.

The module deliberately shares nothing with the backward prover beyond the
formula data types.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict

from banglambek.formulas import Bang, Formula, Over, Sequent, Under, Var, classify, size


def _polar_subformulas(goal: Sequent):
    pos: Counter = Counter()
    neg: Counter = Counter()

    def walk(f: Formula, positive: bool):
        (pos if positive else neg)[f] += 1
        if isinstance(f, (Over, Under)):
            walk(f.num, positive)
            walk(f.den, not positive)
        elif isinstance(f, Bang):
            walk(f.body, positive)

    for a in goal.antecedent:
        walk(a, False)
    walk(goal.succedent, True)
    return pos, neg


def brute_force_derivable(goal: Sequent, sys=None, size_bound: int = 0) -> bool:
    """True iff ``goal`` has a cut-free derivation with at most ``size_bound`` nodes.

    ``sys`` is a :class:`~banglambek.calculus.System` (default !L*); only its
    base and Buszkowski rules are consulted.
    """
    banged = True
    rules: tuple = ()
    if sys is not None:
        banged = getattr(sys.base, "value", sys.base) == "banglstar"
        rules = tuple(sys.rules)
    if size_bound <= 0:
        return False
    flags = classify(goal)
    if not banged and not flags.bang_free:
        return False

    pos_count, neg_count = _polar_subformulas(goal)
    pos_set = set(pos_count)
    neg_set = set(neg_count)
    for br in rules:
        for a in (br.p, br.q, br.r):
            pos_set.add(Var(a))
            neg_set.add(Var(a))

    n = size(goal)
    max_len = size_bound
    caps: dict = {}
    if flags.bang_on_vars_only:
        caps = {f: k for f, k in neg_count.items() if isinstance(f, (Over, Under))}
        if not rules:
            max_len = min(max_len, 3 * n - 1 if not flags.bang_free else n)

    def admissible(ant: tuple, succ: Formula) -> bool:
        if len(ant) > max_len or succ not in pos_set:
            return False
        for f in ant:
            if f not in neg_set:
                return False
        if caps:
            cnt = Counter(f for f in ant if isinstance(f, (Over, Under)))
            for f, k in cnt.items():
                if k > caps[f]:
                    return False
        return True

    target = (tuple(goal.antecedent), goal.succedent)
    best: dict = {}
    heap: list = []
    tie = 0

    def push(ant, succ, cost):
        nonlocal tie
        if cost > size_bound:
            return
        key = (ant, succ)
        old = best.get(key)
        if old is not None and old <= cost:
            return
        if not admissible(ant, succ):
            return
        best[key] = cost
        tie += 1
        heapq.heappush(heap, (cost, tie, key))

    for f in pos_set & neg_set:
        push((f,), f, 1)

    done: dict = {}
    by_succ: dict = defaultdict(list)      # succedent -> finished sequents
    by_member: dict = defaultdict(list)    # antecedent formula -> finished sequents
    over_by_den: dict = defaultdict(list)  # A -> [B/A in neg]
    under_by_den: dict = defaultdict(list)
    for f in neg_set:
        if isinstance(f, Over):
            over_by_den[f.den].append(f)
        elif isinstance(f, Under):
            under_by_den[f.den].append(f)
    over_by_num: dict = defaultdict(list)
    under_by_num: dict = defaultdict(list)
    for f in neg_set:
        if isinstance(f, Over):
            over_by_num[f.num].append(f)
        elif isinstance(f, Under):
            under_by_num[f.num].append(f)

    while heap:
        cost, _, key = heapq.heappop(heap)
        if key in done:
            continue
        done[key] = cost
        if key == target:
            return True
        ant, succ = key
        by_succ[succ].append(key)
        for f in set(ant):
            by_member[f].append(key)

        # unary rules with this sequent as premise
        if ant:
            f = Over(succ, ant[-1])
            if f in pos_set:
                push(ant[:-1], f, cost + 1)
            f = Under(ant[0], succ)
            if f in pos_set:
                push(ant[1:], f, cost + 1)
        if banged:
            for i, a in enumerate(ant):
                b = Bang(a)
                if b in neg_set:
                    push(ant[:i] + (b,) + ant[i + 1:], succ, cost + 1)
            if all(isinstance(a, Bang) for a in ant) and Bang(succ) in pos_set:
                push(ant, Bang(succ), cost + 1)
            for i, a in enumerate(ant):
                if not isinstance(a, Bang):
                    continue
                rest = ant[:i] + ant[i + 1:]
                for j in range(len(ant)):
                    if j != i:
                        push(rest[:j] + (a,) + rest[j:], succ, cost + 1)
                if i + 1 < len(ant) and ant[i + 1] == a:
                    push(ant[:i] + ant[i + 1:], succ, cost + 1)
        for br in rules:
            if br.kind == 2 and succ == Var(br.p) and ant and ant[-1] == Var(br.q):
                push(ant[:-1], Var(br.r), cost + 1)

        # binary rules: this sequent as the minor premise (proving A)
        for f in over_by_den.get(succ, ()):
            for other in list(by_member.get(f.num, ())):
                d_ant, c = other
                oc = done[other]
                for k, x in enumerate(d_ant):
                    if x == f.num:
                        push(d_ant[:k] + (f,) + ant + d_ant[k + 1:], c, cost + oc + 1)
        for f in under_by_den.get(succ, ()):
            for other in list(by_member.get(f.num, ())):
                d_ant, c = other
                oc = done[other]
                for k, x in enumerate(d_ant):
                    if x == f.num:
                        push(d_ant[:k] + ant + (f,) + d_ant[k + 1:], c, cost + oc + 1)
        # this sequent as the major premise (containing B)
        for k, x in enumerate(ant):
            for f in over_by_num.get(x, ()):
                for other in list(by_succ.get(f.den, ())):
                    oc = done[other]
                    push(ant[:k] + (f,) + other[0] + ant[k + 1:], succ, cost + oc + 1)
            for f in under_by_num.get(x, ()):
                for other in list(by_succ.get(f.den, ())):
                    oc = done[other]
                    push(ant[:k] + other[0] + (f,) + ant[k + 1:], succ, cost + oc + 1)
        for br in rules:
            if br.kind != 1:
                continue
            if succ == Var(br.p):
                for other in list(by_succ.get(Var(br.q), ())):
                    push(ant + other[0], Var(br.r), cost + done[other] + 1)
            if succ == Var(br.q):
                for other in list(by_succ.get(Var(br.p), ())):
                    if other == key:
                        continue  # already paired above
                    push(other[0] + ant, Var(br.r), cost + done[other] + 1)
    return False
