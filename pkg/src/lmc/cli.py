"""Command-line entry point.

Exit codes: 0 success, 1 a check failed (invalid derivation, search
exhausted, counterexample found), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import algebra, models, traces
from .calculus import (
    PRIMITIVE, DerivationError, RuleError, check_derivation, dumps, format_derivation, loads,
)
from .search import SearchBudget, prove, prove_equation
from .syntax import (
    Equation, ParseError, cp, cp_s, natural, parse_formula, parse_inequation, parse_sequent,
    parse_struct, render, sharp,
)
from .transform import RankNotDecreasing, UnmatchedCase, eliminate_cut

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def _model(spec: str) -> models.Model:
    text = _read(spec) if os.path.exists(spec) else spec
    try:
        return models.parse_model(text)
    except (models.ModelError, ValueError) as e:
        raise UsageError(f"bad model {spec!r}: {e}")


def _budget(a) -> SearchBudget:
    return SearchBudget(max_depth=a.depth, max_capC_per_branch=a.capc, max_T_per_branch=a.tlimit,
                        t_focus=not a.no_focus, max_nodes=a.nodes)


def _load_derivation(path: str):
    try:
        return loads(_read(path))
    except (ValueError, ParseError, RuleError) as e:
        raise UsageError(f"{path}: {e}")


# ------------------------------------------------------------ commands

def cmd_parse(a) -> int:
    text = a.text
    if a.kind == "auto":
        a.kind = "sequent" if "|-" in text else "inequation" if ("<=" in text or "=" in text) \
            else "formula"
    if a.kind == "sequent":
        s = parse_sequent(text)
        print(render(s))
        print(f"antecedent cp_s = {cp_s(s.ant)}, succedent cp = {cp(s.succ)}")
        print(f"as inequation: {sharp(s)}")
    elif a.kind == "struct":
        t = parse_struct(text)
        print(render(t))
        print(f"cp_s = {cp_s(t)}, as formula: {render(natural(t))}")
    elif a.kind == "inequation":
        print(parse_inequation(text))
    else:
        f = parse_formula(text)
        print(render(f))
        print(f"cp = {cp(f)}")
    return OK


def cmd_check(a) -> int:
    d = _load_derivation(a.file)
    try:
        check_derivation(d, allow=PRIMITIVE if a.cut_free else tuple(PRIMITIVE) + ("cut", "mix"))
    except DerivationError as e:
        print(f"invalid: node {list(e.path)}: {e.reason}")
        return FAIL
    print(f"valid: {render(d.conclusion)} (height {d.height})")
    return OK


def cmd_prove(a) -> int:
    budget = _budget(a)
    t0 = time.perf_counter()
    if "|-" in a.text:
        s = parse_sequent(a.text)
        results = {render(s): prove(s, budget)}
    else:
        results = {render(k): v for k, v in prove_equation(parse_inequation(a.text), budget).items()}
    status = OK
    for goal, res in results.items():
        if res:
            print(f"proved {goal}")
            print(format_derivation(res))
            if a.emit:
                with open(a.emit, "w", encoding="utf-8") as fh:
                    fh.write(dumps(res) + "\n")
        else:
            status = FAIL
            print(f"exhausted {goal}: {res.reason}, {res.nodes} nodes, depth {res.depth_reached}")
    print(f"time {time.perf_counter() - t0:.2f}s")
    return status


def cmd_eliminate(a) -> int:
    d = _load_derivation(a.file)
    try:
        check_derivation(d)
    except DerivationError as e:
        print(f"invalid input: node {list(e.path)}: {e.reason}")
        return FAIL
    steps = []
    try:
        out = eliminate_cut(d, trace=steps)
    except (UnmatchedCase, RankNotDecreasing) as e:
        print(f"elimination failed: {e}")
        return FAIL
    if a.trace:
        for st in steps:
            print(f"trace {st}")
    print(format_derivation(out))
    print(f"{len(steps)} schema applications, height {d.height} -> {out.height}")
    if a.emit:
        with open(a.emit, "w", encoding="utf-8") as fh:
            fh.write(dumps(out) + "\n")
    return OK


def cmd_eval(a) -> int:
    m = _model(a.model)
    if a.assign is not None:
        asg = {}
        for item in a.assign:
            name, _, value = item.partition("=")
            try:
                asg[name] = m.parse_element(value)
            except ValueError as e:
                raise UsageError(str(e))
        try:
            v = models.eval_formula(m, asg, parse_formula(a.text))
        except models.UnboundVariable as e:
            raise UsageError(f"unbound variable {e}")
        print(m.show(int(v)))
        return OK
    e = sharp(parse_sequent(a.text)) if "|-" in a.text else parse_inequation(a.text)
    try:
        cex = models.check_inequation(m, e, a.strategy, a.samples, a.seed)
    except models.ModelError as err:
        raise UsageError(str(err))
    if cex is None:
        print(f"holds in {m.name} ({a.strategy})")
        return OK
    print(f"counterexample in {m.name}: {cex.show(m)}")
    return FAIL


def cmd_soundness(a) -> int:
    m = _model(a.model)
    rules = a.rule or [r for r in PRIMITIVE]
    status = OK
    for r in rules:
        if r not in PRIMITIVE:
            raise UsageError(f"unknown rule {r!r}")
        rep = models.check_rule_soundness(m, r, a.strategy, a.samples, a.seed, a.depth, a.invert)
        print(rep)
        if not rep.ok:
            status = FAIL
    return status


def cmd_countermodel(a) -> int:
    e = sharp(parse_sequent(a.text)) if "|-" in a.text else parse_inequation(a.text)
    t0 = time.perf_counter()
    res = models.countermodel_search(e, a.max_monoid_size, a.max_L)
    print(res)
    print(f"time {time.perf_counter() - t0:.2f}s")
    return FAIL if res else OK


def _lts(a) -> traces.LTS:
    if a.lts:
        try:
            return traces.parse_lts(_read(a.lts))
        except ValueError as e:
            raise UsageError(f"{a.lts}: {e}")
    return traces.running_example()


def cmd_traces(a) -> int:
    lts = _lts(a)
    if a.action == "enumerate":
        ts = traces.valid_traces(lts, a.max_len, a.rooted, a.strict)
        if not a.count:
            for w in sorted(ts, key=lambda w: (len(w), w)):
                print(traces.render_trace(w))
        print(f"{len(ts)} valid traces of length <= {a.max_len}")
        return OK
    if a.action == "classify":
        universe = traces.Universe(lts.alphabet, a.max_len)
        try:
            p = traces.parse_property(_read(a.file))
            c = traces.classify(p, universe)
        except ValueError as e:
            raise UsageError(str(e))
        print(f"{c} (box agrees: {traces.safety_via_box(p, universe) == c.safety})")
        return OK
    status = OK
    for text in a.trace:
        try:
            w = traces.parse_trace(text)
        except ValueError as e:
            raise UsageError(str(e))
        valid = traces.is_valid(lts, w, a.strict)
        p1, p2 = traces.policy_p1(w), traces.policy_p2(w)
        print(f"{traces.render_trace(w)}: valid={valid} P1={p1} P2={p2}")
        if not (valid and p1 and p2):
            status = FAIL
    return status


def cmd_algebra(a) -> int:
    if a.action == "endz":
        try:
            rep = algebra.endz_witness_check(a.lo, a.hi)
        except ValueError as e:
            raise UsageError(str(e))
        print(rep)
        return OK if rep.ok else FAIL
    if a.action == "rdp":
        split = algebra.rdp_decompose(a.u, a.v, a.w)
        if split is None:
            print(f"{a.w!r} is not a prefix of {a.u + a.v!r}")
            return FAIL
        print(f"{a.w!r} = {split[0]!r} . {split[1]!r}")
        return OK
    m = _model(a.model)
    if m.monoid is None:
        raise UsageError("the model has no monoid table")
    mon = m.monoid
    canc, con = algebra.cancellative_conical(mon)
    print(f"{m.name}: cancellative={canc} conical={con}")
    for side in ("l", "r"):
        rel = algebra.divisibility_preorder(mon, side)
        print(f"divisibility |_{side}: RDP witness {algebra.check_rdp(mon, rel)}")
    return OK


# -------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lmc", description="Sequent calculus toolkit for closure l-monoids.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="parse and re-render a term")
    s.add_argument("text")
    s.add_argument("--kind", choices=("auto", "formula", "struct", "sequent", "inequation"),
                   default="auto")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("check", help="check a derivation file")
    s.add_argument("file")
    s.add_argument("--cut-free", action="store_true", help="also reject cut and mix")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("prove", help="bounded cut-free proof search")
    s.add_argument("text", help="a sequent, inequation or equation")
    d = SearchBudget()
    s.add_argument("--depth", type=int, default=d.max_depth)
    s.add_argument("--capc", type=int, default=d.max_capC_per_branch)
    s.add_argument("--tlimit", type=int, default=d.max_T_per_branch)
    s.add_argument("--no-focus", action="store_true")
    s.add_argument("--nodes", type=int, default=d.max_nodes)
    s.add_argument("--emit", metavar="FILE", help="write the derivation as JSON")
    s.set_defaults(fn=cmd_prove)

    s = sub.add_parser("eliminate", help="eliminate cut and mix from a derivation file")
    s.add_argument("file")
    s.add_argument("--trace", action="store_true", help="print one record per schema application")
    s.add_argument("--emit", metavar="FILE")
    s.set_defaults(fn=cmd_eliminate)

    model_help = "builtin name, model file, or 'truncated alphabet=a L=2'"
    s = sub.add_parser("eval", help="check an inequation in a model, or evaluate a formula")
    s.add_argument("text")
    s.add_argument("--model", default="truncated alphabet=a L=2", help=model_help)
    s.add_argument("--assign", nargs="*", metavar="VAR=SET", help="evaluate under this assignment")
    s.add_argument("--strategy", choices=("exhaustive", "random"), default="exhaustive")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("soundness", help="rule soundness sweep in a model")
    s.add_argument("--model", default="truncated alphabet=a L=2", help=model_help)
    s.add_argument("--rule", action="append", help="repeatable; default all primitive rules")
    s.add_argument("--strategy", choices=("exhaustive", "random"), default="exhaustive")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--depth", type=int, default=2, help="context depth")
    s.add_argument("--invert", action="store_true", help="swap premise and conclusion (harness check)")
    s.set_defaults(fn=cmd_soundness)

    s = sub.add_parser("countermodel", help="search finite models for a refutation")
    s.add_argument("text")
    s.add_argument("--max-monoid-size", type=int, default=3)
    s.add_argument("--max-L", type=int, default=2)
    s.set_defaults(fn=cmd_countermodel)

    s = sub.add_parser("traces", help="LTS traces and trace properties")
    tsub = s.add_subparsers(dest="action", required=True)
    for name in ("enumerate", "classify", "policy"):
        t = tsub.add_parser(name)
        t.add_argument("--lts", help="LTS file (default: the request-response example)")
        t.add_argument("--strict", action="store_true", help="require the last action to be enabled")
        if name == "enumerate":
            t.add_argument("--max-len", type=int, default=4)
            t.add_argument("--rooted", action="store_true")
            t.add_argument("--count", action="store_true", help="print only the count")
        elif name == "classify":
            t.add_argument("file", help="property file, one trace per line")
            t.add_argument("--max-len", type=int, default=3)
        else:
            t.add_argument("trace", nargs="+", help="e.g. '(s0,conn),(s1,snd)'")
        t.set_defaults(fn=cmd_traces)

    s = sub.add_parser("algebra", help="monoid divisibility and witness checks")
    asub = s.add_subparsers(dest="action", required=True)
    t = asub.add_parser("endz", help="check the integer witness functions")
    t.add_argument("--lo", type=int, default=-100)
    t.add_argument("--hi", type=int, default=100)
    t.set_defaults(fn=cmd_algebra)
    t = asub.add_parser("rdp", help="split a prefix w of uv as u'v'")
    t.add_argument("u")
    t.add_argument("v")
    t.add_argument("w")
    t.set_defaults(fn=cmd_algebra)
    t = asub.add_parser("monoid", help="cancellation, conicity and RDP of divisibility")
    t.add_argument("--model", default="z2-total", help=model_help)
    t.set_defaults(fn=cmd_algebra)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.fn(args)
    except (UsageError, ParseError) as e:
        print(f"lmc: error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
