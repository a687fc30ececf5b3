"""The LMC rule system as data: forward application, derivation checking
and backward instance enumeration.

Every rule instance is a RuleApp.  ``ctx`` is the position of the hole of
the context Gamma{.}; it addresses the same path in premise and conclusion.
Axioms are zero-premise RuleApps whose ``aux`` carries the concluded
sequent, so forward application of an axiom validates and returns it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .syntax import (
    Angle, Atom, BBox, Bot, Cap, Comma, Dia, Eps, Formula, Join, Meet, One,
    Prod, Sequent, Struct, Top, parse_formula, parse_sequent, parse_struct, render,
    replace_at, subterm_at, walk,
)

AXIOMS = ("init", "oneR", "botL", "topR")
STRUCTURAL = ("oA_l2r", "oA_r2l", "oEps", "epsO", "capA_l2r", "capA_r2l",
              "capW1", "capE", "capC", "K", "T", "Four")
LEFT = ("prodL", "meetL", "joinL", "diaL", "bboxL", "oneL")
RIGHT = ("prodR", "meetR", "joinR1", "joinR2", "diaR", "bboxR", "prodOne", "oneProd")
PRIMITIVE = AXIOMS + STRUCTURAL + LEFT + RIGHT
RULES = PRIMITIVE + ("cut", "mix")

# rules acting on a subterm of the antecedent through a context Gamma{.}
CONTEXT_RULES = frozenset(STRUCTURAL + LEFT)

# right rules that decompose the head connective of the succedent
DECOMPOSING = frozenset(("prodR", "meetR", "joinR1", "joinR2", "diaR", "bboxR",
                         "oneR", "prodOne", "oneProd", "topR"))


class RuleError(ValueError):
    pass


class DerivationError(ValueError):
    def __init__(self, path, reason):
        super().__init__(f"at node {list(path)}: {reason}")
        self.path = tuple(path)
        self.reason = reason


@dataclass(frozen=True)
class RuleApp:
    rule: str
    ctx: tuple = ()
    occ: tuple = ()
    aux: object = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise RuleError(f"unknown rule {self.rule!r}")
        object.__setattr__(self, "ctx", tuple(self.ctx))
        object.__setattr__(self, "occ", tuple(tuple(p) for p in self.occ))


@dataclass(frozen=True)
class Derivation:
    conclusion: Sequent
    app: RuleApp
    premises: tuple = ()
    height: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "height", 1 + max((p.height for p in self.premises), default=0))

    @property
    def rule(self) -> str:
        return self.app.rule

    def nodes(self, path=()):
        """Preorder traversal yielding (path, node)."""
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def rules_used(self) -> set:
        return {n.rule for _, n in self.nodes()}


# ------------------------------------------------------------ application

def _expect(cond, app, msg):
    if not cond:
        raise RuleError(f"{app.rule} at {list(app.ctx)}: {msg}")


def _at(t: Struct, app: RuleApp) -> Struct:
    try:
        return subterm_at(t, app.ctx)
    except IndexError:
        raise RuleError(f"{app.rule}: position {list(app.ctx)} invalid in {render(t)}")


def check_axiom(app: RuleApp, s: Sequent) -> None:
    _expect(isinstance(s, Sequent), app, "axiom instance must carry its sequent")
    r = app.rule
    if r == "init":
        _expect(s.ant == Atom(s.succ), app, f"expected phi |- phi, got {render(s)}")
    elif r == "oneR":
        _expect(s == Sequent(Eps(), One()), app, f"expected e |- 1, got {render(s)}")
    elif r == "botL":
        _expect(_at(s.ant, app) == Atom(Bot()), app, f"expected bot at ctx in {render(s)}")
    elif r == "topR":
        _expect(s.succ == Top(), app, f"expected succedent top in {render(s)}")


def apply_rule(app: RuleApp, premises) -> Sequent:
    """Return the unique conclusion of ``app`` applied to ``premises``."""
    r = app.rule
    prem = list(premises)
    arity = {"cut": 2, "mix": 2, "prodR": 2, "meetR": 2, "joinL": 2}.get(r, 0 if r in AXIOMS else 1)
    _expect(len(prem) == arity, app, f"expected {arity} premise(s), got {len(prem)}")
    if r in AXIOMS:
        check_axiom(app, app.aux)
        return app.aux
    if r in ("cut", "mix"):
        left, right = prem
        occ = app.occ
        if r == "cut":
            _expect(len(occ) == 1, app, "cut needs exactly one occurrence")
        for p in occ:
            try:
                node = subterm_at(right.ant, p)
            except IndexError:
                raise RuleError(f"{r}: occurrence {list(p)} invalid in {render(right.ant)}")
            _expect(node == Atom(left.succ), app,
                    f"occurrence {list(p)} is {render(node)}, expected {render(left.succ)}")
        try:
            return Sequent(replace_at(right.ant, occ, left.ant), right.succ)
        except ValueError as e:
            raise RuleError(f"{r}: {e}")
    if r in RIGHT:
        return _apply_right(app, prem)
    if r == "joinL":
        return _apply_join_left(app, prem)
    (p,) = prem
    sub = _at(p.ant, app)
    new = _context_rule(app, sub)
    return Sequent(replace_at(p.ant, [app.ctx], new), p.succ)


def _apply_right(app, prem) -> Sequent:
    r = app.rule
    if r == "prodR":
        a, b = prem
        return Sequent(Comma(a.ant, b.ant), Prod(a.succ, b.succ))
    if r == "meetR":
        a, b = prem
        _expect(a.ant == b.ant, app, "premises must share the antecedent")
        return Sequent(a.ant, Meet(a.succ, b.succ))
    (p,) = prem
    if r == "joinR1":
        _expect(app.aux is not None, app, "aux must carry the added right disjunct")
        return Sequent(p.ant, Join(p.succ, app.aux))
    if r == "joinR2":
        _expect(app.aux is not None, app, "aux must carry the added left disjunct")
        return Sequent(p.ant, Join(app.aux, p.succ))
    if r == "diaR":
        return Sequent(Angle(p.ant), Dia(p.succ))
    if r == "bboxR":
        _expect(isinstance(p.ant, Angle), app, f"expected <Gamma> antecedent, got {render(p.ant)}")
        return Sequent(p.ant.arg, BBox(p.succ))
    if r == "prodOne":
        return Sequent(p.ant, Prod(p.succ, One()))
    if r == "oneProd":
        return Sequent(p.ant, Prod(One(), p.succ))
    raise RuleError(f"unhandled right rule {r}")


def _context_rule(app, sub) -> Struct:
    """Conclusion subterm at ctx, given the premise subterm ``sub``."""
    r = app.rule
    if r == "oA_l2r":
        _expect(isinstance(sub, Comma) and isinstance(sub.l, Comma), app,
                f"expected (D1 o D2) o D3, got {render(sub)}")
        return Comma(sub.l.l, Comma(sub.l.r, sub.r))
    if r == "oA_r2l":
        _expect(isinstance(sub, Comma) and isinstance(sub.r, Comma), app,
                f"expected D1 o (D2 o D3), got {render(sub)}")
        return Comma(Comma(sub.l, sub.r.l), sub.r.r)
    if r == "capA_l2r":
        _expect(isinstance(sub, Cap) and isinstance(sub.l, Cap), app,
                f"expected (D1 n D2) n D3, got {render(sub)}")
        return Cap(sub.l.l, Cap(sub.l.r, sub.r))
    if r == "capA_r2l":
        _expect(isinstance(sub, Cap) and isinstance(sub.r, Cap), app,
                f"expected D1 n (D2 n D3), got {render(sub)}")
        return Cap(Cap(sub.l, sub.r.l), sub.r.r)
    if r == "oEps":
        return Comma(sub, Eps())
    if r == "epsO":
        return Comma(Eps(), sub)
    if r == "capW1":
        _expect(app.aux is not None, app, "aux must carry the weakened-in term")
        return Cap(sub, app.aux)
    if r == "capE":
        _expect(isinstance(sub, Cap), app, f"expected D1 n D2, got {render(sub)}")
        return Cap(sub.r, sub.l)
    if r == "capC":
        _expect(isinstance(sub, Cap) and sub.l == sub.r, app, f"expected D n D, got {render(sub)}")
        return sub.l
    if r == "K":
        _expect(isinstance(sub, Comma) and isinstance(sub.l, Angle) and isinstance(sub.r, Angle),
                app, f"expected <D1> o <D2>, got {render(sub)}")
        return Angle(Comma(sub.l.arg, sub.r.arg))
    if r == "T":
        _expect(isinstance(sub, Angle), app, f"expected <D>, got {render(sub)}")
        return sub.arg
    if r == "Four":
        _expect(isinstance(sub, Angle), app, f"expected <D>, got {render(sub)}")
        return Angle(sub)
    if r == "prodL":
        _expect(isinstance(sub, Comma) and isinstance(sub.l, Atom) and isinstance(sub.r, Atom),
                app, f"expected phi o psi, got {render(sub)}")
        return Atom(Prod(sub.l.f, sub.r.f))
    if r == "meetL":
        _expect(isinstance(sub, Cap) and isinstance(sub.l, Atom) and isinstance(sub.r, Atom),
                app, f"expected phi n psi, got {render(sub)}")
        return Atom(Meet(sub.l.f, sub.r.f))
    if r == "diaL":
        _expect(isinstance(sub, Angle) and isinstance(sub.arg, Atom), app,
                f"expected <phi>, got {render(sub)}")
        return Atom(Dia(sub.arg.f))
    if r == "bboxL":
        _expect(isinstance(sub, Atom), app, f"expected a formula, got {render(sub)}")
        return Angle(Atom(BBox(sub.f)))
    if r == "oneL":
        _expect(isinstance(sub, Eps), app, f"expected e, got {render(sub)}")
        return Atom(One())
    raise RuleError(f"unhandled rule {r}")


def _apply_join_left(app, prem) -> Sequent:
    a, b = prem
    _expect(a.succ == b.succ, app, "premises must share the succedent")
    fa, fb = _at(a.ant, app), _at(b.ant, app)
    _expect(isinstance(fa, Atom) and isinstance(fb, Atom), app, "expected formulas at ctx")
    hole = Atom(Join(fa.f, fb.f))
    ca = replace_at(a.ant, [app.ctx], hole)
    cb = replace_at(b.ant, [app.ctx], hole)
    _expect(ca == cb, app, "premise contexts differ outside the hole")
    return Sequent(ca, a.succ)


# ---------------------------------------------------------- construction

def derive(app: RuleApp, *premises: Derivation) -> Derivation:
    return Derivation(apply_rule(app, [p.conclusion for p in premises]), app, premises)


def rule(name: str, *premises: Derivation, ctx=(), occ=(), aux=None) -> Derivation:
    return derive(RuleApp(name, ctx, occ, aux), *premises)


def init(f: Formula) -> Derivation:
    s = Sequent(Atom(f), f)
    return Derivation(s, RuleApp("init", aux=s))


def one_right() -> Derivation:
    s = Sequent(Eps(), One())
    return Derivation(s, RuleApp("oneR", aux=s))


def bot_left(ant: Struct, ctx, succ: Formula) -> Derivation:
    s = Sequent(ant, succ)
    return Derivation(s, RuleApp("botL", ctx, aux=s))


def top_right(ant: Struct) -> Derivation:
    s = Sequent(ant, Top())
    return Derivation(s, RuleApp("topR", aux=s))


def axiom(app_rule: str, s: Sequent, ctx=()) -> Derivation:
    return Derivation(s, RuleApp(app_rule, ctx, aux=s))


# --------------------------------------------------------------- checking

def check_derivation(d: Derivation, allow=RULES) -> None:
    """Raise DerivationError at the first bad node (preorder); None if ok."""
    for path, node in d.nodes():
        if node.rule not in allow:
            raise DerivationError(path, f"rule {node.rule} not permitted here")
        try:
            got = apply_rule(node.app, [p.conclusion for p in node.premises])
        except RuleError as e:
            raise DerivationError(path, str(e))
        if got != node.conclusion:
            raise DerivationError(path, f"recorded conclusion {render(node.conclusion)} "
                                        f"but rule yields {render(got)}")


def is_valid(d: Derivation) -> bool:
    try:
        check_derivation(d)
        return True
    except DerivationError:
        return False


def is_cut_free(d: Derivation) -> bool:
    return not ({"cut", "mix"} & d.rules_used())


# ------------------------------------------------------ backward instances

@dataclass(frozen=True)
class Limits:
    t_focus: bool = True
    allow_T: bool = True
    allow_capC: bool = True


class Redex:
    """A backward rule instance whose premises are built on demand.

    For context rules ``make`` returns the premise subterms at ``ctx``; for
    right rules and axioms it returns the premise sequents directly.
    """
    __slots__ = ("name", "ctx", "aux", "make", "in_context")

    def __init__(self, name, ctx=(), make=tuple, aux=None, in_context=True):
        self.name, self.ctx, self.aux, self.make = name, ctx, aux, make
        self.in_context = in_context

    @property
    def app(self) -> RuleApp:
        return RuleApp(self.name, self.ctx, aux=self.aux)

    def build(self, s: Sequent) -> list:
        if self.in_context:
            return [Sequent(replace_at(s.ant, [self.ctx], t), s.succ) for t in self.make()]
        return list(self.make())


_EPS, _ONE, _TOP = Eps(), One(), Top()
_BOT_ATOM = Atom(Bot())


def _t_focused(s: Sequent, p, sub) -> bool:
    # the wrap enables diaR at the root, K on a comma, or bboxL on a box
    return (p == () and isinstance(s.succ, Dia)) or isinstance(sub, Comma) \
        or (isinstance(sub, Atom) and isinstance(sub.f, BBox))


def _context_redexes(p, sub):
    """(rule name, Redex) for every context rule whose conclusion has ``sub`` at p."""
    if isinstance(sub, Atom):
        f = sub.f
        if isinstance(f, Prod):
            yield "prodL", Redex("prodL", p, lambda: (Comma(Atom(f.l), Atom(f.r)),))
        elif isinstance(f, Meet):
            yield "meetL", Redex("meetL", p, lambda: (Cap(Atom(f.l), Atom(f.r)),))
        elif isinstance(f, Join):
            yield "joinL", Redex("joinL", p, lambda: (Atom(f.l), Atom(f.r)))
        elif isinstance(f, Dia):
            yield "diaL", Redex("diaL", p, lambda: (Angle(Atom(f.arg)),))
        elif isinstance(f, One):
            yield "oneL", Redex("oneL", p, lambda: (Eps(),))
    elif isinstance(sub, Comma):
        if isinstance(sub.r, Comma):
            yield "oA_l2r", Redex("oA_l2r", p, lambda: (Comma(Comma(sub.l, sub.r.l), sub.r.r),))
        if isinstance(sub.l, Comma):
            yield "oA_r2l", Redex("oA_r2l", p, lambda: (Comma(sub.l.l, Comma(sub.l.r, sub.r)),))
        if isinstance(sub.r, Eps):
            yield "oEps", Redex("oEps", p, lambda: (sub.l,))
        if isinstance(sub.l, Eps):
            yield "epsO", Redex("epsO", p, lambda: (sub.r,))
    elif isinstance(sub, Cap):
        if isinstance(sub.r, Cap):
            yield "capA_l2r", Redex("capA_l2r", p, lambda: (Cap(Cap(sub.l, sub.r.l), sub.r.r),))
        if isinstance(sub.l, Cap):
            yield "capA_r2l", Redex("capA_r2l", p, lambda: (Cap(sub.l.l, Cap(sub.l.r, sub.r)),))
        yield "capW1", Redex("capW1", p, lambda: (sub.l,), aux=sub.r)
        yield "capE", Redex("capE", p, lambda: (Cap(sub.r, sub.l),))
    elif isinstance(sub, Angle):
        arg = sub.arg
        if isinstance(arg, Comma):
            yield "K", Redex("K", p, lambda: (Comma(Angle(arg.l), Angle(arg.r)),))
        elif isinstance(arg, Angle):
            yield "Four", Redex("Four", p, lambda: (arg,))
        elif isinstance(arg, Atom) and isinstance(arg.f, BBox):
            yield "bboxL", Redex("bboxL", p, lambda: (Atom(arg.f.arg),))


def _right_redexes(s: Sequent):
    ant, f = s.ant, s.succ
    if isinstance(f, Prod):
        if isinstance(ant, Comma):
            yield "prodR", Redex("prodR", make=lambda: (Sequent(ant.l, f.l), Sequent(ant.r, f.r)), in_context=False)
        if f.r == One():
            yield "prodOne", Redex("prodOne", make=lambda: (Sequent(ant, f.l),), in_context=False)
        if f.l == One():
            yield "oneProd", Redex("oneProd", make=lambda: (Sequent(ant, f.r),), in_context=False)
    elif isinstance(f, Meet):
        yield "meetR", Redex("meetR", make=lambda: (Sequent(ant, f.l), Sequent(ant, f.r)), in_context=False)
    elif isinstance(f, Join):
        yield "joinR1", Redex("joinR1", make=lambda: (Sequent(ant, f.l),), aux=f.r, in_context=False)
        yield "joinR2", Redex("joinR2", make=lambda: (Sequent(ant, f.r),), aux=f.l, in_context=False)
    elif isinstance(f, Dia):
        if isinstance(ant, Angle):
            yield "diaR", Redex("diaR", make=lambda: (Sequent(ant.arg, f.arg),), in_context=False)
    elif isinstance(f, BBox):
        yield "bboxR", Redex("bboxR", make=lambda: (Sequent(Angle(ant), f.arg),), in_context=False)


def all_redexes(s: Sequent, limits: Limits = Limits(), nodes=None) -> dict:
    """Map rule name to its backward redexes for ``s`` (cut and mix excluded)."""
    if nodes is None:
        nodes = list(walk(s.ant))
    out = {}

    def add(name, redex):
        out.setdefault(name, []).append(redex)

    if isinstance(s.ant, Atom) and s.ant.f == s.succ:
        add("init", Redex("init", aux=s, in_context=False))
    if s.ant == _EPS and s.succ == _ONE:
        add("oneR", Redex("oneR", aux=s, in_context=False))
    if s.succ == _TOP:
        add("topR", Redex("topR", aux=s, in_context=False))
    for name, r in _right_redexes(s):
        add(name, r)
    for p, sub in nodes:
        if sub == _BOT_ATOM:
            add("botL", Redex("botL", p, aux=s, in_context=False))
        for name, r in _context_redexes(p, sub):
            add(name, r)
        if limits.allow_T and (not limits.t_focus or _t_focused(s, p, sub)):
            add("T", Redex("T", p, lambda sub=sub: (Angle(sub),)))
        if limits.allow_capC:
            add("capC", Redex("capC", p, lambda sub=sub: (Cap(sub, sub),)))
    return out


def backward_instances(s: Sequent, name: str, limits: Limits = Limits(), nodes=None):
    """All (RuleApp, premises) with apply_rule(app, premises) == s."""
    return [(r.app, r.build(s)) for r in all_redexes(s, limits, nodes).get(name, [])]


# ------------------------------------------------------------- file format

def _aux_kind(rule_name: str) -> str | None:
    if rule_name == "capW1":
        return "struct"
    if rule_name in ("joinR1", "joinR2"):
        return "formula"
    return None


def to_record(d: Derivation) -> dict:
    """Nested dict with rule, ctx, occ, aux, conclusion and premises.

    Axiom leaves carry their sequent as the conclusion, so aux is left out.
    """
    rec = {"rule": d.rule, "ctx": list(d.app.ctx), "conclusion": render(d.conclusion)}
    if d.app.occ:
        rec["occ"] = [list(p) for p in d.app.occ]
    if _aux_kind(d.rule):
        rec["aux"] = render(d.app.aux)
    rec["premises"] = [to_record(p) for p in d.premises]
    return rec


def from_record(rec: dict) -> Derivation:
    """Rebuild a derivation exactly as recorded; nothing is re-derived here,
    so a tampered file is caught by check_derivation rather than repaired."""
    try:
        name = rec["rule"]
        concl = parse_sequent(rec["conclusion"])
        kind = _aux_kind(name)
        aux = None
        if name in AXIOMS:
            aux = concl
        elif kind == "struct":
            aux = parse_struct(rec["aux"])
        elif kind == "formula":
            aux = parse_formula(rec["aux"])
        app = RuleApp(name, tuple(rec.get("ctx", ())), tuple(map(tuple, rec.get("occ", ()))), aux)
        prems = tuple(from_record(p) for p in rec.get("premises", ()))
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed derivation record: {e!r}") from None
    return Derivation(concl, app, prems)


def dumps(d: Derivation) -> str:
    return json.dumps(to_record(d), indent=1, ensure_ascii=False)


def loads(text: str) -> Derivation:
    return from_record(json.loads(text))


def format_derivation(d: Derivation, indent: str = "  ") -> str:
    """One line per node, premises indented under their conclusion."""
    lines = []
    for path, node in d.nodes():
        where = f" @{list(node.app.ctx)}" if node.app.ctx else ""
        if node.app.occ:
            where += f" occ={[list(p) for p in node.app.occ]}"
        lines.append(f"{indent * len(path)}{render(node.conclusion)}    [{node.rule}{where}]")
    return "\n".join(lines)
