"""Command-line interface.

Exit codes: 0 definitive positive, 1 definitive negative, 2 unknown,
3 usage error, 4 input/output error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from banglambek import calculus
from banglambek.calculus import BANG_LSTAR, LSTAR, DerivationError, System, lstar_with
from banglambek.encoding import (
    Found,
    NotFound,
    deduction_search,
    embed,
    encode_grammar,
    format_ruleset,
    gamma,
    pair_table_json,
    parse_ruleset,
)
from banglambek.formulas import (
    ParseError,
    classify,
    format_formula,
    format_sequent,
    parse_formula,
    parse_sequent,
    size,
)
from banglambek.grammar import GrammarError, parse_grammar
from banglambek.lingparse import LexiconError, UnknownWord, builtin_lexicon, parse_lexicon, parse_sentence
from banglambek.oracle import brute_force_derivable
from banglambek.prover import (
    Budget,
    FragmentViolation,
    ProveResult,
    Status,
    decide_restricted,
    lemma_bound,
    prove,
)

EXIT = {Status.DERIVABLE: 0, Status.NOT_DERIVABLE: 1, Status.UNKNOWN: 2}
EXIT_USAGE = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved for "unknown"
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _system(spec: str) -> System:
    if spec == "lstar":
        return LSTAR
    if spec == "banglstar":
        return BANG_LSTAR
    if spec.startswith("lstar+R:"):
        return lstar_with(parse_ruleset(_read(spec[len("lstar+R:"):])))
    raise UsageError(f"unknown system {spec!r} (expected lstar, banglstar or lstar+R:<file>)")


def _budget(args) -> Budget | None:
    return None if args.budget is None else Budget(max_nodes=args.budget)


def _emit(args, status: Status, payload: dict, derivation=None, extra_lines=()):
    if args.json:
        payload = {"status": status.value, **payload}
        if derivation is not None:
            payload["derivation"] = calculus.to_json(derivation)
        print(json.dumps(payload, indent=1, ensure_ascii=False))
    else:
        print(status.value)
        for line in extra_lines:
            print(line)
        if getattr(args, "tree", False) and derivation is not None:
            print(calculus.dumps(derivation))
    return EXIT[status]


def _result_payload(goal, res: ProveResult) -> dict:
    out = {"sequent": format_sequent(goal)}
    if res.reason:
        out["reason"] = res.reason
    return out


def cmd_prove(args) -> int:
    sys_ = _system(args.system)
    goal = parse_sequent(args.sequent)
    budget = _budget(args)
    restricted = sys_ is not LSTAR and not sys_.rules and classify(goal).bang_on_vars_only
    if budget is None and restricted:
        res = decide_restricted(goal)
    else:
        res = prove(goal, sys_, budget or Budget())
    return _emit(args, res.status, _result_payload(goal, res), res.derivation)


def cmd_decide(args) -> int:
    goal = parse_sequent(args.sequent)
    res = decide_restricted(goal)
    return _emit(args, res.status, _result_payload(goal, res), res.derivation)


def cmd_check(args) -> int:
    text = _read(args.file)
    start = text.find("{")
    if start < 0:
        raise UsageError("no derivation found in input")
    d = calculus.loads(text[start:])
    sys_ = _system(args.system)
    try:
        calculus.check_derivation(d, sys_)
    except DerivationError as exc:
        if args.json:
            print(json.dumps({"valid": False, "error": str(exc), "path": list(exc.path)}))
        else:
            print(f"INVALID: {exc}")
        return 1
    if args.json:
        print(json.dumps({"valid": True, "conclusion": format_sequent(d.conclusion)}))
    else:
        print(f"VALID: {format_sequent(d.conclusion)}")
    return 0


def cmd_parse(args) -> int:
    lex = parse_lexicon(_read(args.lexicon)) if args.lexicon else builtin_lexicon()
    target = parse_formula(args.target)
    outcomes = parse_sentence(args.sentence, lex, target, _budget(args) or Budget())
    statuses = [o.result.status for o in outcomes]
    if Status.DERIVABLE in statuses:
        overall = Status.DERIVABLE
    elif Status.UNKNOWN in statuses:
        overall = Status.UNKNOWN
    else:
        overall = Status.NOT_DERIVABLE
    if args.json:
        rows = []
        for o in outcomes:
            row = {"sequent": format_sequent(o.sequent), "status": o.result.status.value}
            if o.derivation is not None:
                row["derivation"] = calculus.to_json(o.derivation)
            rows.append(row)
        print(json.dumps({"status": overall.value, "candidates": rows}, indent=1, ensure_ascii=False))
        return EXIT[overall]
    print(overall.value)
    for o in outcomes:
        print(f"  {o.result.status.value}: {format_sequent(o.sequent)}")
    if args.tree:
        for o in outcomes:
            if o.derivation is not None:
                print(calculus.dumps(o.derivation))
                break
    return EXIT[overall]


def cmd_encode(args) -> int:
    enc = encode_grammar(parse_grammar(_read(args.grammar)))
    text = format_ruleset(enc.ruleset)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.pair_table:
        with open(args.pair_table, "w", encoding="utf-8") as fh:
            fh.write(pair_table_json(enc) + "\n")
    return 0


def _rules_of(args):
    sys_ = _system(args.system)
    if sys_.base is not calculus.Base.LSTAR:
        raise UsageError("this command needs --system lstar or lstar+R:<ruleset-file>")
    return sys_.rules


def cmd_embed(args) -> int:
    rules = _rules_of(args)
    goal = parse_sequent(args.sequent)
    print(format_sequent(embed(gamma(rules), goal)))
    return 0


def cmd_deduce(args) -> int:
    rules = _rules_of(args)
    goal = parse_sequent(args.sequent)
    res = deduction_search(goal, rules, _budget(args) or Budget())
    payload = {"sequent": format_sequent(goal)}
    if isinstance(res, Found):
        hyps = [format_formula(f) for f in res.hypotheses]
        payload["hypotheses"] = hyps
        payload["embedded"] = format_sequent(res.derivation.conclusion)
        lines = [f"B = {{{', '.join(hyps)}}}", format_sequent(res.derivation.conclusion)]
        return _emit(args, Status.DERIVABLE, payload, res.derivation, lines)
    if isinstance(res, NotFound):
        return _emit(args, Status.NOT_DERIVABLE, payload)
    payload["reason"] = res.reason
    return _emit(args, Status.UNKNOWN, payload, extra_lines=[res.reason])


def cmd_oracle(args) -> int:
    sys_ = _system(args.system)
    goal = parse_sequent(args.sequent)
    bound = args.bound if args.bound is not None else lemma_bound(size(goal))
    ok = brute_force_derivable(goal, sys_, bound)
    status = Status.DERIVABLE if ok else Status.NOT_DERIVABLE
    return _emit(args, status, {"sequent": format_sequent(goal), "bound": bound})


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="banglambek", description="Proof search for the Lambek calculus with a relevant modality.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, system="banglstar", tree=True):
        p.add_argument("--system", default=system, help="lstar, banglstar or lstar+R:<ruleset-file>")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if tree:
            p.add_argument("--tree", action="store_true", help="also print the derivation as JSON")

    p = sub.add_parser("prove", help="search for a cut-free derivation")
    p.add_argument("sequent")
    p.add_argument("--budget", type=int, help="maximum number of search nodes")
    common(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("decide", help="decide a sequent with ! on atoms only")
    p.add_argument("sequent")
    p.add_argument("--json", action="store_true")
    p.add_argument("--tree", action="store_true")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("check", help="validate a derivation file ('-' for stdin)")
    p.add_argument("file")
    common(p, tree=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("parse", help="parse a sentence with a lexicon")
    p.add_argument("sentence")
    p.add_argument("--lexicon", help="lexicon file (default: built-in)")
    p.add_argument("--target", default="s", help="target type (default: s)")
    p.add_argument("--budget", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("--tree", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("encode", help="write the rule set encoding a binary grammar")
    p.add_argument("grammar")
    p.add_argument("-o", "--output")
    p.add_argument("--pair-table", help="also write the pair table as JSON")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("embed", help="prefix a sequent with the banged rule formulas")
    p.add_argument("sequent")
    p.add_argument("--system", required=True, help="lstar+R:<ruleset-file>")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("deduce", help="search for rule formulas that make a sequent derivable in !L*")
    p.add_argument("sequent")
    p.add_argument("--budget", type=int)
    common(p, system="lstar")
    p.set_defaults(func=cmd_deduce)

    p = sub.add_parser("oracle", help="brute-force derivability up to a derivation size")
    p.add_argument("sequent")
    p.add_argument("--bound", type=int, help="maximum derivation size (default: 12n^2+3n)")
    common(p, tree=False)
    p.set_defaults(func=cmd_oracle)
    return top


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, GrammarError, LexiconError, UnknownWord, FragmentViolation, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
