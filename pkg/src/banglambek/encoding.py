"""From binary grammars to Buszkowski rules, and from those rules to !L*.

``encode_grammar`` produces a rule set under which ``z1, ..., zm -> x`` is
derivable exactly when ``x`` rewrites to ``z1 ... zm``.  Expand productions
become one B1 rule each.  A reduce production ``v1 v2 => w`` is simulated,
separately for every possible succedent ``x``, by a family of rules that
walks a marker through the antecedent: symbols are tagged (renamed to fresh
"marked" atoms) while the marker moves left, the two symbols next to it are
replaced by ``w``, and then everything is untagged again.

``gamma`` turns rules into formulas, ``embed`` prefixes a sequent with
banged copies of such formulas, and ``translate_to_bang`` converts an L*+R
derivation into an !L* derivation of the embedded sequent.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from banglambek.calculus import (
    BANG_LSTAR,
    BRule,
    Derivation,
    Rule,
    System,
    axiom,
    check_derivation,
    lstar_with,
    permute_to,
    rearrange,
)
from banglambek.cutelim import eliminate_cut
from banglambek.formulas import (
    Bang,
    Formula,
    Over,
    ParseError,
    Sequent,
    Var,
    classify,
    fresh_name,
    parse_formula,
)
from banglambek.grammar import (
    BinaryGrammar,
    Expand,
    GrammarError,
    Reduce,
    RewriteTrace,
    Unknown,
)
from banglambek.prover import Budget, Status, decide_restricted, prove


@dataclass(frozen=True)
class PairContext:
    """Fresh atoms and rule indices for one (reduce production, succedent) pair.

    Rules for the per-symbol steps are stored as ``{y: (b2_index, b1_index)}``.
    """

    production: Reduce
    x: str
    pid: int
    marked: dict
    a: str
    b: str
    c: str
    e: str
    f: str
    aux: tuple[str, ...]
    start_rule: int                 # e, ... -> a from ... -> x
    mark_a: dict                    # tag the last symbol while in state a
    apply_rules: tuple[int, int, int]
    mark_b: dict                    # tag the last symbol while in state b
    switch_rules: tuple[int, int]   # drop e, prepend f
    unmark: dict                    # untag the last symbol, prepend it plain
    finish_rule: int                # drop f, back to x

    def rule_count(self) -> int:
        return 1 + 3 + 2 + 1 + 2 * (len(self.mark_a) + len(self.mark_b) + len(self.unmark))


@dataclass(frozen=True)
class EncodedSystem:
    grammar: BinaryGrammar
    ruleset: tuple[BRule, ...]
    expand_rules: dict = field(default_factory=dict)   # Expand -> rule index
    pair_table: dict = field(default_factory=dict)     # (Reduce, x) -> PairContext

    @property
    def system(self) -> System:
        return lstar_with(self.ruleset)


def encode_grammar(grammar: BinaryGrammar) -> EncodedSystem:
    """Deterministic: equal grammars give equal rule sets, fresh names included."""
    rules: list[BRule] = []
    expand_rules: dict = {}
    pair_table: dict = {}
    taken = set(grammar.symbols)
    aux_counter = itertools.count(1)

    def new(name: str) -> str:
        if name in taken:
            raise GrammarError(f"generated atom {name} clashes with a grammar symbol")
        taken.add(name)
        return name

    def add(kind: int, p: str, q: str, r: str) -> int:
        rules.append(BRule(kind, p, q, r))
        return len(rules) - 1

    for prod in grammar.expands:
        expand_rules[prod] = add(1, prod.v1, prod.v2, prod.w)

    pid = 0
    for prod in grammar.reduces:
        for x in grammar.symbols:
            pid += 1
            marked = {y: new(fresh_name(f"{y}~{pid}")) for y in grammar.symbols}
            a, b, c, e, f = (new(fresh_name(f"{k}{pid}")) for k in "abcef")
            aux: list[str] = []

            def u() -> str:
                name = new(fresh_name(f"u{next(aux_counter)}"))
                aux.append(name)
                return name

            def two_step(p: str, t: str, q: str, r: str) -> tuple[int, int]:
                # from  D1 -> p  and  D2, q -> r  infer  D1, D2 -> t
                uu = u()
                return add(2, r, q, uu), add(1, p, uu, t)

            start_rule = add(1, e, x, a)
            mark_a = {y: two_step(marked[y], a, y, a) for y in grammar.symbols}
            u1 = u()
            u2 = u()
            apply_rules = (
                add(2, a, prod.v2, u1),
                add(2, u1, prod.v1, u2),
                add(1, marked[prod.w], u2, b),
            )
            mark_b = {y: two_step(marked[y], b, y, b) for y in grammar.symbols}
            switch_rules = two_step(f, c, e, b)
            unmark = {y: two_step(y, c, marked[y], c) for y in grammar.symbols}
            finish_rule = add(2, c, f, x)
            pair_table[(prod, x)] = PairContext(
                prod, x, pid, marked, a, b, c, e, f, tuple(aux),
                start_rule, mark_a, apply_rules, mark_b, switch_rules, unmark, finish_rule,
            )
    return EncodedSystem(grammar, tuple(rules), expand_rules, pair_table)


# --------------------------------------------------------------------------
# rule-set and pair-table text formats

_COMMENT = re.compile(r"(?:^|(?<=\s))#(?=\s|$)")


def format_ruleset(rules: Iterable[BRule]) -> str:
    return "".join(f"{r}\n" for r in rules)


def parse_ruleset(text: str) -> tuple[BRule, ...]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.split(raw, 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ("B1", "B2"):
            raise ValueError(f"line {lineno}: expected 'B1 p q r' or 'B2 p q r', got {line!r}")
        for atom in parts[1:]:
            try:
                ok = isinstance(parse_formula(atom, allow_reserved=True), Var)
            except ParseError:
                ok = False
            if not ok:
                raise ValueError(f"line {lineno}: {atom!r} is not an atom")
        out.append(BRule(int(parts[0][1]), *parts[1:]))
    return tuple(out)


def pair_table_json(enc: EncodedSystem) -> str:
    rows = []
    for (prod, x), ctx in enc.pair_table.items():
        rows.append({
            "pair": ctx.pid,
            "production": str(prod),
            "x": x,
            "marked": ctx.marked,
            "a": ctx.a, "b": ctx.b, "c": ctx.c, "e": ctx.e, "f": ctx.f,
            "aux": list(ctx.aux),
            "rules": {
                "start": ctx.start_rule,
                "mark_a": {y: list(v) for y, v in ctx.mark_a.items()},
                "apply": list(ctx.apply_rules),
                "mark_b": {y: list(v) for y, v in ctx.mark_b.items()},
                "switch": list(ctx.switch_rules),
                "unmark": {y: list(v) for y, v in ctx.unmark.items()},
                "finish": ctx.finish_rule,
            },
        })
    expand = {str(p): i for p, i in enc.expand_rules.items()}
    return json.dumps({"expand": expand, "pairs": rows}, indent=1, ensure_ascii=False)


# --------------------------------------------------------------------------
# grammar traces to L*+R derivations

def _b1(rules, k: int, left: Derivation, right: Derivation) -> Derivation:
    concl = Sequent(left.antecedent + right.antecedent, Var(rules[k].r))
    return Derivation(Rule.B1, (k, len(left.antecedent)), concl, (left, right))


def _b2(rules, k: int, prem: Derivation) -> Derivation:
    concl = Sequent(prem.antecedent[:-1], Var(rules[k].r))
    return Derivation(Rule.B2, (k,), concl, (prem,))


def _ax(name: str) -> Derivation:
    return axiom(Var(name))


def _reduce_block(enc: EncodedSystem, ctx: PairContext, d: Derivation, pre, post) -> Derivation:
    """Extend ``d`` proving ``pre, v1, v2, post -> x`` to ``pre, w, post -> x``."""
    rs = enc.ruleset

    def shift(pair, name, prem):
        b2, b1 = pair
        return _b1(rs, b1, _ax(name), _b2(rs, b2, prem))

    d = _b1(rs, ctx.start_rule, _ax(ctx.e), d)
    for y in reversed(post):
        d = shift(ctx.mark_a[y], ctx.marked[y], d)
    r_v2, r_v1, r_w = ctx.apply_rules
    d = _b1(rs, r_w, _ax(ctx.marked[ctx.production.w]), _b2(rs, r_v1, _b2(rs, r_v2, d)))
    for y in reversed(pre):
        d = shift(ctx.mark_b[y], ctx.marked[y], d)
    d = shift(ctx.switch_rules, ctx.f, d)
    for y in reversed(tuple(pre) + (ctx.production.w,) + tuple(post)):
        d = shift(ctx.unmark[y], y, d)
    return _b2(rs, ctx.finish_rule, d)


def grammar_to_derivation(enc: EncodedSystem, trace: RewriteTrace) -> Derivation:
    """Cut-free L*+R derivation of ``z1, ..., zm -> x`` for a trace ``x =>* z1 ... zm``."""
    grammar = enc.grammar
    x = trace.start
    if x not in grammar.symbols:
        raise GrammarError(f"trace starts from unknown symbol {x!r}")
    words = trace.words()  # raises on an invalid step
    sys = enc.system
    d = _ax(x)
    for (prod, pos), word in zip(trace.steps, words):
        if prod not in grammar.productions:
            raise GrammarError(f"{prod} is not a production of the grammar")
        if isinstance(prod, Expand):
            k = enc.expand_rules[prod]
            step = _b1(enc.ruleset, k, _ax(prod.v1), _ax(prod.v2))
            d = eliminate_cut(step, d, pos, sys)
        else:
            ctx = enc.pair_table[(prod, x)]
            d = _reduce_block(enc, ctx, d, word[:pos], word[pos + 2:])
    return d


# --------------------------------------------------------------------------
# rules as formulas

def rule_formula(rule: BRule) -> Formula:
    p, q, r = Var(rule.p), Var(rule.q), Var(rule.r)
    if rule.kind == 1:
        return Over(Over(r, q), p)
    return Over(r, Over(p, q))


def gamma(rules: Sequence[BRule]) -> tuple[Formula, ...]:
    """One formula per rule, duplicates dropped, in rule order."""
    return tuple(dict.fromkeys(rule_formula(r) for r in rules))


def embed(hyps: Iterable[Formula], goal: Sequent) -> Sequent:
    return Sequent(tuple(Bang(f) for f in hyps) + goal.antecedent, goal.succedent)


def translate_to_bang(d: Derivation, rules: Sequence[BRule]) -> tuple[tuple[Formula, ...], Derivation]:
    """Turn a cut-free L*+R derivation into an !L* one.

    Returns ``(B, d')`` where ``B`` lists (in ``gamma`` order) the formulas of
    the rules actually used and ``d'`` derives ``embed(B, conclusion(d))``.
    """
    rules = tuple(rules)
    check_derivation(d, lstar_with(rules))
    if not classify(d.conclusion).bang_free:
        raise ValueError("the derivation must be bang-free")
    formulas = gamma(rules)
    index = {f: i for i, f in enumerate(formulas)}
    used, out = _translate(d, rules, index, formulas)
    return tuple(formulas[i] for i in used), out


def _bangs(ids, formulas) -> tuple[Formula, ...]:
    return tuple(Bang(formulas[i]) for i in ids)


def _translate(d: Derivation, rules, index, formulas) -> tuple[tuple[int, ...], Derivation]:
    rule = d.rule
    ant, succ = d.antecedent, d.succedent
    if rule is Rule.AXIOM:
        return (), d
    if rule is Rule.OVER_R:
        ids, p = _translate(d.premises[0], rules, index, formulas)
        bang = _bangs(ids, formulas)
        return ids, Derivation(Rule.OVER_R, (), Sequent(bang + ant, succ), (p,))
    if rule is Rule.UNDER_R:
        ids, p = _translate(d.premises[0], rules, index, formulas)
        bang = _bangs(ids, formulas)
        p = permute_to(p, (succ.den,) + bang + ant)
        return ids, Derivation(Rule.UNDER_R, (), Sequent(bang + ant, succ), (p,))
    if rule in (Rule.OVER_L, Rule.UNDER_L):
        ids1, minor = _translate(d.premises[0], rules, index, formulas)
        ids2, major = _translate(d.premises[1], rules, index, formulas)
        b1, b2 = _bangs(ids1, formulas), _bangs(ids2, formulas)
        i, g = d.positions
        if rule is Rule.OVER_L:
            wide = b2 + ant[:i + 1] + b1 + ant[i + 1:]
            pos = (len(b2) + i, len(b1) + g)
        else:
            wide = b2 + ant[:i - g] + b1 + ant[i - g:]
            pos = (len(b2) + len(b1) + i, len(b1) + g)
        node = Derivation(rule, pos, Sequent(wide, succ), (minor, major))
        ids = tuple(sorted(set(ids1) | set(ids2)))
        return ids, rearrange(node, _bangs(ids, formulas) + ant)
    if rule is Rule.B1:
        k, s = d.positions
        br = rules[k]
        g = index[rule_formula(br)]
        ids1, left = _translate(d.premises[0], rules, index, formulas)
        ids2, right = _translate(d.premises[1], rules, index, formulas)
        r, q = Var(br.r), Var(br.q)
        rq = Over(r, q)
        form = formulas[g]
        inner_ant = (rq,) + right.antecedent
        inner = Derivation(Rule.OVER_L, (0, len(right.antecedent)), Sequent(inner_ant, r),
                           (right, axiom(r)))
        outer_ant = (form,) + left.antecedent + right.antecedent
        outer = Derivation(Rule.OVER_L, (0, len(left.antecedent)), Sequent(outer_ant, r),
                           (left, inner))
        banged = Derivation(Rule.BANG_L, (0,), Sequent((Bang(form),) + outer_ant[1:], r), (outer,))
        ids = tuple(sorted(set(ids1) | set(ids2) | {g}))
        return ids, rearrange(banged, _bangs(ids, formulas) + ant)
    if rule is Rule.B2:
        (k,) = d.positions
        br = rules[k]
        g = index[rule_formula(br)]
        ids0, prem = _translate(d.premises[0], rules, index, formulas)
        p, q, r = Var(br.p), Var(br.q), Var(br.r)
        form = formulas[g]
        lifted = Derivation(Rule.OVER_R, (), Sequent(prem.antecedent[:-1], Over(p, q)), (prem,))
        body = (form,) + lifted.antecedent
        applied = Derivation(Rule.OVER_L, (0, len(lifted.antecedent)), Sequent(body, r),
                             (lifted, axiom(r)))
        banged = Derivation(Rule.BANG_L, (0,), Sequent((Bang(form),) + body[1:], r), (applied,))
        ids = tuple(sorted(set(ids0) | {g}))
        return ids, rearrange(banged, _bangs(ids, formulas) + ant)
    raise ValueError(f"cannot translate rule {rule.value}")


# --------------------------------------------------------------------------
# deduction search

@dataclass(frozen=True)
class Found:
    hypotheses: tuple[Formula, ...]
    derivation: Derivation


@dataclass(frozen=True)
class NotFound:
    pass


def deduction_search(goal: Sequent, rules: Sequence[BRule], budget: Budget = Budget()):
    """Find ``B`` among the rule formulas with ``!B, goal`` derivable in !L*.

    Returns ``Found``, ``NotFound`` or ``Unknown``.  The empty ``B`` is tried
    first (decided exactly).  Otherwise the goal is searched in L*+R and a
    derivation found there is translated, which yields exactly the formulas
    of the rules it uses.  A definitive negative answer in L*+R means no
    ``B`` works.  If that search is inconclusive, subsets of the rule
    formulas are tried directly in !L*, smallest first, until the node
    budget runs out.
    """
    rules = tuple(rules)
    if not classify(goal).bang_free:
        raise ValueError("deduction_search expects a bang-free goal")
    plain = decide_restricted(goal)
    if plain.derivable:
        return Found((), plain.derivation)
    if not rules:
        return NotFound()
    res = prove(goal, lstar_with(rules), budget)
    if res.status is Status.DERIVABLE:
        return Found(*translate_to_bang(res.derivation, rules))
    if res.status is Status.NOT_DERIVABLE:
        return NotFound()

    formulas = gamma(rules)
    remaining = None if budget.max_nodes is None else budget.max_nodes - res.nodes - plain.nodes
    inconclusive = False
    for k in range(1, len(formulas) + 1):
        for combo in itertools.combinations(formulas, k):
            if remaining is not None and remaining <= 0:
                return Unknown(f"node budget of {budget.max_nodes} exhausted")
            sub = Budget(budget.max_logical_steps, budget.max_contractions, remaining)
            r = prove(embed(combo, goal), BANG_LSTAR, sub)
            if r.derivable:
                return Found(combo, r.derivation)
            inconclusive |= r.status is Status.UNKNOWN
            if remaining is not None:
                remaining -= max(r.nodes, 1)
    if inconclusive:
        return Unknown("search over rule formulas was inconclusive")
    return NotFound()
