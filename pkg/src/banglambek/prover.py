"""Backward proof search and the decision procedure for ``!`` on atoms.

Search never permutes explicitly.  Banged formulas can be moved anywhere by
the permutation rules, so an antecedent is searched as the ordered list of
its non-banged formulas plus a multiset of banged ones.  Contraction is
applied lazily, only where two copies are actually needed: when the banged
multiset is split between the two premises of a left rule, and when a
banged formula is derelicted while a copy stays behind.  The explicit
permutation and contraction nodes are put back when the abstract proof is
turned into a :class:`~banglambek.calculus.Derivation`.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from banglambek.calculus import (
    BANG_LSTAR,
    Base,
    Derivation,
    Rule,
    System,
    axiom,
    normalize_perm_blocks,
    rearrange,
)
from banglambek.formulas import (
    Bang,
    Formula,
    Over,
    Sequent,
    Under,
    Var,
    classify,
    format_formula,
    size,
)


@dataclass(frozen=True)
class Budget:
    """Search limits.

    ``max_logical_steps`` and ``max_contractions`` bound the number of
    logical rules and contractions along any branch; ``max_nodes`` caps the
    number of search states visited overall (``None`` for no cap).
    """

    max_logical_steps: int = 64
    max_contractions: int = 16
    max_nodes: Optional[int] = 1_000_000

    def __post_init__(self):
        if self.max_logical_steps < 0 or self.max_contractions < 0:
            raise ValueError("budget fields must be non-negative")
        if self.max_nodes is not None and self.max_nodes < 0:
            raise ValueError("budget fields must be non-negative")


class Status(str, enum.Enum):
    DERIVABLE = "DERIVABLE"
    NOT_DERIVABLE = "NOT_DERIVABLE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ProveResult:
    status: Status
    derivation: Optional[Derivation] = None
    reason: str = ""
    nodes: int = 0  # search states visited

    @property
    def derivable(self) -> bool:
        return self.status is Status.DERIVABLE


class FragmentViolation(ValueError):
    pass


def lemma_bound(n: int) -> int:
    """Derivation-size bound for sequents of size ``n`` with ``!`` on atoms only."""
    return 12 * n * n + 3 * n


def restricted_budget(goal: Sequent) -> Budget:
    n = size(goal)
    return Budget(max_logical_steps=n - 1, max_contractions=2 * n - 1, max_nodes=None)


# --------------------------------------------------------------------------
# abstract proofs

_key_cache: dict[Formula, str] = {}


def _fkey(f: Formula) -> str:
    k = _key_cache.get(f)
    if k is None:
        if len(_key_cache) > 200_000:
            _key_cache.clear()
        k = _key_cache[f] = format_formula(f)
    return k


def _bag(items) -> tuple[Formula, ...]:
    return tuple(sorted(items, key=_fkey))


@dataclass(eq=False)
class _Step:
    kind: str
    seq: tuple
    bangs: tuple
    succ: Formula
    info: tuple
    premises: tuple
    ldepth: int
    cdepth: int


class _OutOfNodes(Exception):
    pass


def _balance_ok(seq, bangs, succ) -> bool:
    """Atom-count condition necessary for derivability when ``!`` sits on atoms.

    Positive atom occurrences are matched one-to-one with negative ones in
    axioms; a negative ``!p`` stands for one or more negative ``p``.
    """
    pos: Counter = Counter()
    neg: Counter = Counter()
    nb: Counter = Counter()
    stack = [(f, False) for f in seq] + [(f, False) for f in bangs] + [(succ, True)]
    while stack:
        f, positive = stack.pop()
        if isinstance(f, Var):
            (pos if positive else neg)[f.name] += 1
        elif isinstance(f, Over):
            stack.append((f.num, positive))
            stack.append((f.den, not positive))
        elif isinstance(f, Under):
            stack.append((f.num, positive))
            stack.append((f.den, not positive))
        elif positive:
            stack.append((f.body, True))
        else:
            nb[f.body.name] += 1
    for a in pos.keys() | neg.keys() | nb.keys():
        if nb[a]:
            if pos[a] < neg[a] + nb[a]:
                return False
        elif pos[a] != neg[a]:
            return False
    return True


def _splits(bangs: tuple) -> list[tuple[tuple, tuple, int]]:
    """Ways to share the banged multiset between two premises.

    Each side gets some copies of every banged formula; together they get
    either exactly the available copies or one more (one contraction).
    Further copies can always be made inside the premise that needs them.
    """
    groups = [(f, len(list(g))) for f, g in itertools.groupby(bangs)]
    per = []
    for f, m in groups:
        opts = []
        for a in range(m + 1):
            for b in range(m + 1):
                if a + b == m or a + b == m + 1:
                    opts.append((f, a, b, a + b - m))
        per.append(opts)
    out = []
    for combo in itertools.product(*per):
        left, right, extra = [], [], 0
        for f, a, b, d in combo:
            left.extend([f] * a)
            right.extend([f] * b)
            extra += d
        out.append((tuple(left), tuple(right), extra))
    out.sort(key=lambda t: t[2])
    return out


class _Search:
    def __init__(self, sys: System, budget: Budget, prune: bool):
        self.sys = sys
        self.budget = budget
        self.prune = prune
        self.nodes = 0
        self.cut = False
        self.proved: dict = {}
        self.failed: dict = {}

    @staticmethod
    def place(seq: tuple, bangs: tuple, f: Formula, at_end: bool = True):
        if isinstance(f, Bang):
            return seq, _bag(bangs + (f,))
        return (seq + (f,) if at_end else (f,) + seq), bangs

    def solve(self, seq: tuple, bangs: tuple, succ: Formula, c: int, l: int) -> Optional[_Step]:
        key = (seq, bangs, succ)
        hit = self.proved.get(key)
        if hit is not None and hit.cdepth <= c and hit.ldepth <= l:
            return hit
        for fc, fl, had_cut in self.failed.get(key, ()):
            if c <= fc and l <= fl:
                self.cut = self.cut or had_cut
                return None
        self.nodes += 1
        cap = self.budget.max_nodes
        if cap is not None and self.nodes > cap:
            raise _OutOfNodes
        outer_cut, self.cut = self.cut, False
        step = self._expand(seq, bangs, succ, c, l)
        local_cut = self.cut
        self.cut = outer_cut or local_cut
        if step is None:
            self.failed.setdefault(key, []).append((c, l, local_cut))
        else:
            self.proved[key] = step
        return step

    def _expand(self, seq, bangs, succ, c, l) -> Optional[_Step]:
        if self.prune and not _balance_ok(seq, bangs, succ):
            return None
        if (seq == (succ,) and not bangs) or (not seq and bangs == (succ,)):
            return _Step("ax", seq, bangs, succ, (), (), 0, 0)
        if l <= 0:
            self.cut = True
            return None
        banged = self.sys.base is Base.BANG_LSTAR

        def mk(kind, info, prems, contr=0):
            return _Step(
                kind, seq, bangs, succ, info, tuple(prems),
                1 + max(p.ldepth for p in prems),
                contr + max(p.cdepth for p in prems),
            )

        if isinstance(succ, Over):
            s2, b2 = self.place(seq, bangs, succ.den)
            p = self.solve(s2, b2, succ.num, c, l - 1)
            if p is not None:
                return mk("/R", (), [p])
        if isinstance(succ, Under):
            s2, b2 = self.place(seq, bangs, succ.den, at_end=False)
            p = self.solve(s2, b2, succ.num, c, l - 1)
            if p is not None:
                return mk("\\R", (), [p])
        if banged and isinstance(succ, Bang) and not seq:
            p = self.solve((), bangs, succ.body, c, l - 1)
            if p is not None:
                return mk("!R", (), [p])

        splits = _splits(bangs) if bangs else [((), (), 0)]
        n = len(seq)
        for i, f in enumerate(seq):
            if isinstance(f, Over):
                ranges = [(i + 1, j) for j in range(i + 1, n + 1)]
            elif isinstance(f, Under):
                ranges = [(j, i) for j in range(i, -1, -1)]
            else:
                continue
            for lo, hi in ranges:
                gamma = seq[lo:hi]
                for m1, m2, extra in splits:
                    if extra > c:
                        self.cut = True
                        continue
                    p1 = self.solve(gamma, m1, f.den, c - extra, l - 1)
                    if p1 is None:
                        continue
                    if isinstance(f, Over):
                        rest = seq[:i] + seq[hi:]
                        at = i
                    else:
                        rest = seq[:lo] + seq[i + 1:]
                        at = lo
                    if isinstance(f.num, Bang):
                        s2, b2 = rest, _bag(m2 + (f.num,))
                    else:
                        s2, b2 = rest[:at] + (f.num,) + rest[at:], m2
                    p2 = self.solve(s2, b2, succ, c - extra, l - 1)
                    if p2 is not None:
                        kind = "/L" if isinstance(f, Over) else "\\L"
                        return mk(kind, (i, lo, hi, m1, m2), [p1, p2], extra)

        if banged and bangs:
            for keep in (False, True):
                if keep and c <= 0:
                    self.cut = True
                    continue
                for f in dict.fromkeys(bangs):
                    rest = list(bangs)
                    if not keep:
                        rest.remove(f)
                    body = f.body
                    if isinstance(body, Bang):
                        targets = [(seq, _bag(rest + [body]), None)]
                    else:
                        targets = [
                            (seq[:k] + (body,) + seq[k:], tuple(rest), k) for k in range(n + 1)
                        ]
                    for s2, b2, k in targets:
                        p = self.solve(s2, b2, succ, c - keep, l - 1)
                        if p is not None:
                            return mk("!L", (f, keep, k), [p], int(keep))

        if isinstance(succ, Var):
            for idx, br in enumerate(self.sys.rules):
                if br.r != succ.name:
                    continue
                if br.kind == 1:
                    for s in range(n + 1):
                        p1 = self.solve(seq[:s], (), Var(br.p), c, l - 1)
                        if p1 is None:
                            continue
                        p2 = self.solve(seq[s:], (), Var(br.q), c, l - 1)
                        if p2 is not None:
                            return mk("B1", (idx, s), [p1, p2])
                else:
                    p = self.solve(seq + (Var(br.q),), (), Var(br.p), c, l - 1)
                    if p is not None:
                        return mk("B2", (idx,), [p])
        return None


def _split_class(ant) -> tuple[tuple, tuple]:
    seq = tuple(f for f in ant if not isinstance(f, Bang))
    return seq, _bag(f for f in ant if isinstance(f, Bang))


def _realize(step: _Step, ant: tuple) -> Derivation:
    """Explicit derivation of ``ant -> succ`` for an abstract proof of its class."""
    seq, succ = step.seq, step.succ
    concl = Sequent(ant, succ)
    k = step.kind
    if k == "ax":
        return axiom(succ)
    if k == "/R":
        return Derivation(Rule.OVER_R, (), concl, (_realize(step.premises[0], ant + (succ.den,)),))
    if k == "\\R":
        return Derivation(Rule.UNDER_R, (), concl, (_realize(step.premises[0], (succ.den,) + ant),))
    if k == "!R":
        return Derivation(Rule.BANG_R, (), concl, (_realize(step.premises[0], ant),))
    if k in ("/L", "\\L"):
        i, lo, hi, m1, m2 = step.info
        f = seq[i]
        gamma = m1 + seq[lo:hi]
        if k == "/L":
            delta1 = seq[:i]
            delta2 = seq[hi:] + m2
            core_ant = delta1 + (f,) + gamma + delta2
            pos = (len(delta1), len(gamma))
        else:
            delta1 = m2 + seq[:lo]
            delta2 = seq[i + 1:]
            core_ant = delta1 + gamma + (f,) + delta2
            pos = (len(delta1) + len(gamma), len(gamma))
        left = _realize(step.premises[0], gamma)
        right = _realize(step.premises[1], delta1 + (f.num,) + delta2)
        rule = Rule.OVER_L if k == "/L" else Rule.UNDER_L
        core = Derivation(rule, pos, Sequent(core_ant, succ), (left, right))
        return rearrange(core, ant)
    if k == "!L":
        f, keep, at = step.info
        rest = list(step.bangs)
        if not keep:
            rest.remove(f)
        body = f.body
        if at is None:
            prem_ant = (body,) + seq + tuple(rest)
            core_ant = (f,) + seq + tuple(rest)
            idx = 0
        else:
            prem_ant = seq[:at] + (body,) + seq[at:] + tuple(rest)
            core_ant = seq[:at] + (f,) + seq[at:] + tuple(rest)
            idx = at
        prem = _realize(step.premises[0], prem_ant)
        core = Derivation(Rule.BANG_L, (idx,), Sequent(core_ant, succ), (prem,))
        return rearrange(core, ant)
    if k == "B1":
        idx, s = step.info
        return Derivation(
            Rule.B1, (idx, s), concl,
            (_realize(step.premises[0], ant[:s]), _realize(step.premises[1], ant[s:])),
        )
    if k == "B2":
        (idx,) = step.info
        q = step.premises[0].seq[-1]
        return Derivation(Rule.B2, (idx,), concl, (_realize(step.premises[0], ant + (q,)),))
    raise AssertionError(k)


# --------------------------------------------------------------------------
# atomic goals under Buszkowski rules
#
# With atoms only, every sequent of a cut-free derivation is atomic and only
# axioms and the rule set apply.  Under a cap on antecedent length the
# subgoals form a finite AND-OR graph, solved as a Horn fixpoint.

class _Shape:
    """Over-approximate shape of the antecedents derivable for each atom.

    Tracks the possible first and last atoms, adjacent pairs and whether the
    empty antecedent may occur.  A subgoal outside its shape is dead.
    """

    def __init__(self, rules):
        atoms = {a for br in rules for a in (br.p, br.q, br.r)}
        self.first = {a: {a} for a in atoms}
        self.last = {a: {a} for a in atoms}
        self.adj = {a: set() for a in atoms}
        self.null = set()
        changed = True
        while changed:
            changed = False
            for br in rules:
                p, q, r = br.p, br.q, br.r
                first, last, adj = set(), set(), set()
                if br.kind == 1:
                    first |= self.first[p]
                    if p in self.null:
                        first |= self.first[q]
                    last |= self.last[q]
                    if q in self.null:
                        last |= self.last[p]
                    adj |= self.adj[p] | self.adj[q]
                    adj |= {(x, y) for x in self.last[p] for y in self.first[q]}
                    null = p in self.null and q in self.null
                else:
                    first |= self.first[p]
                    last |= {x for x, y in self.adj[p] if y == q}
                    adj |= self.adj[p]
                    null = q in self.first[p] and q in self.last[p]
                if not first <= self.first[r]:
                    self.first[r] |= first
                    changed = True
                if not last <= self.last[r]:
                    self.last[r] |= last
                    changed = True
                if not adj <= self.adj[r]:
                    self.adj[r] |= adj
                    changed = True
                if null and r not in self.null:
                    self.null.add(r)
                    changed = True

    def admits(self, ant: tuple, r: str) -> bool:
        if r not in self.first:
            return ant == (r,)
        if not ant:
            return r in self.null
        if ant[0] not in self.first[r] or ant[-1] not in self.last[r]:
            return False
        adj = self.adj[r]
        return all(pair in adj for pair in zip(ant, ant[1:]))


def _atomic_solve(goal_key, by_r, shape: _Shape, max_len: int, counter: list, cap):
    """Lazy Horn fixpoint over the subgoal graph.

    Premises of a rule instance are explored left to right: the next one is
    only visited once the previous one is proved.  Every node a proof needs
    is still reached, so exhausting the graph is a definitive failure (under
    the length cap).  Returns ``(proved, pruned)``.
    """
    proved: dict = {}
    waiting: dict = {}
    seen: set = set()
    todo = [goal_key]
    done_q: list = []
    pruned = False

    def live(key) -> bool:
        return shape.admits(*key)

    def advance(parent, option, at):
        kids = option[2]
        while at < len(kids) and kids[at] in proved:
            at += 1
        if at == len(kids):
            if parent not in proved:
                proved[parent] = option
                done_q.append(parent)
            return
        kid = kids[at]
        waiting.setdefault(kid, []).append((parent, option, at))
        if kid not in seen:
            todo.append(kid)

    while goal_key not in proved:
        if done_q:
            key = done_q.pop()
            for parent, option, at in waiting.pop(key, ()):
                if parent not in proved:
                    advance(parent, option, at + 1)
            continue
        if not todo:
            break
        key = todo.pop()
        if key in seen:
            continue
        seen.add(key)
        counter[0] += 1
        if cap is not None and counter[0] > cap:
            raise _OutOfNodes
        ant, r = key
        if ant == (r,):
            advance(key, ("ax", None, ()), 0)
            continue
        for idx, br in by_r.get(r, ()):
            if br.kind == 1:
                for cut in range(len(ant) + 1):
                    kids = ((ant[:cut], br.p), (ant[cut:], br.q))
                    if live(kids[0]) and live(kids[1]):
                        advance(key, ("B1", (idx, cut), kids), 0)
            elif len(ant) + 1 > max_len:
                pruned = True
            else:
                kid = (ant + (br.q,), br.p)
                if live(kid):
                    advance(key, ("B2", (idx,), (kid,)), 0)
    return proved, pruned


def _atomic_derivation(key, proved: dict) -> Derivation:
    built: dict = {}
    stack = [key]
    while stack:
        k = stack[-1]
        if k in built:
            stack.pop()
            continue
        kind, info, kids = proved[k]
        todo = [c for c in kids if c not in built]
        if todo:
            stack.extend(todo)
            continue
        stack.pop()
        ant, r = k
        concl = Sequent(tuple(Var(a) for a in ant), Var(r))
        if kind == "ax":
            built[k] = axiom(Var(r))
        else:
            rule = Rule.B1 if kind == "B1" else Rule.B2
            built[k] = Derivation(rule, info, concl, tuple(built[c] for c in kids))
    return built[key]


def _prove_atomic(goal: Sequent, sys: System, budget: Budget) -> ProveResult:
    by_r: dict = {}
    for idx, br in enumerate(sys.rules):
        by_r.setdefault(br.r, []).append((idx, br))
    key = (tuple(a.name for a in goal.antecedent), goal.succedent.name)
    counter = [0]
    base = max(len(key[0]), 1)
    shape = _Shape(sys.rules)
    if not shape.admits(*key):
        return ProveResult(Status.NOT_DERIVABLE)
    try:
        for extra in range(1, budget.max_logical_steps + 2):
            proved, pruned = _atomic_solve(key, by_r, shape, base + extra, counter, budget.max_nodes)
            if key in proved:
                return ProveResult(Status.DERIVABLE, _atomic_derivation(key, proved), nodes=counter[0])
            if not pruned:
                return ProveResult(Status.NOT_DERIVABLE, nodes=counter[0])
    except _OutOfNodes:
        return ProveResult(
            Status.UNKNOWN, reason=f"node budget of {budget.max_nodes} exhausted", nodes=counter[0]
        )
    return ProveResult(Status.UNKNOWN, reason="antecedent length budget exhausted", nodes=counter[0])


def _run(goal: Sequent, sys: System, budget: Budget, prune: bool, c: int, l: int, search=None):
    search = search or _Search(sys, budget, prune)
    seq, bangs = _split_class(goal.antecedent)
    step = search.solve(seq, bangs, goal.succedent, c, l)
    return step, search


def _finish(goal: Sequent, step: _Step, nodes: int) -> ProveResult:
    d = _realize(step, goal.antecedent)
    return ProveResult(Status.DERIVABLE, normalize_perm_blocks(d), nodes=nodes)


def prove(goal: Sequent, sys: System = BANG_LSTAR, budget: Budget = Budget()) -> ProveResult:
    """Budgeted backward search for a cut-free derivation of ``goal`` in ``sys``.

    ``NOT_DERIVABLE`` is returned only when the search space was exhausted
    without ever hitting a budget limit.
    """
    flags = classify(goal)
    if sys.base is Base.LSTAR and not flags.bang_free:
        raise FragmentViolation("L* sequents may not contain !")
    if sys.rules and all(isinstance(f, Var) for f in goal.antecedent + (goal.succedent,)):
        return _prove_atomic(goal, sys, budget)
    restricted = flags.bang_on_vars_only and not sys.rules
    c_max, l_max = budget.max_contractions, budget.max_logical_steps
    try:
        if restricted:
            step, search = _run(goal, sys, budget, True, c_max, l_max)
            if step is not None:
                return _finish(goal, step, search.nodes)
            if search.cut:
                return ProveResult(
                    Status.UNKNOWN, reason="step or contraction budget exhausted", nodes=search.nodes
                )
            return ProveResult(Status.NOT_DERIVABLE, nodes=search.nodes)
        # iterative deepening so that short proofs are found first
        search = None
        top = max(c_max, l_max)
        for d in range(1, top + 1):
            c, l = min(d, c_max), min(d, l_max)
            fresh = _Search(sys, budget, False)
            if search is not None:
                fresh.nodes = search.nodes
            step, search = _run(goal, sys, budget, False, c, l, fresh)
            if step is not None:
                return _finish(goal, step, search.nodes)
            if not search.cut:
                return ProveResult(Status.NOT_DERIVABLE, nodes=search.nodes)
        nodes = search.nodes if search is not None else 0
        return ProveResult(Status.UNKNOWN, reason="step or contraction budget exhausted", nodes=nodes)
    except _OutOfNodes:
        return ProveResult(
            Status.UNKNOWN, reason=f"node budget of {budget.max_nodes} exhausted", nodes=budget.max_nodes
        )


def decide_restricted(goal: Sequent) -> ProveResult:
    """Decide ``goal`` in !L* when every ``!`` applies to an atom.

    Branches are limited to ``n - 1`` logical rules and ``2n - 1``
    contractions (``n`` the size of the goal); every derivable goal of this
    fragment has a derivation within these counts, so a failed search is a
    definitive negative answer.
    """
    if not classify(goal).bang_on_vars_only:
        raise FragmentViolation("! must be applied to atoms only")
    budget = restricted_budget(goal)
    step, search = _run(goal, BANG_LSTAR, budget, True, budget.max_contractions, budget.max_logical_steps)
    if step is None:
        return ProveResult(Status.NOT_DERIVABLE, nodes=search.nodes)
    return _finish(goal, step, search.nodes)
