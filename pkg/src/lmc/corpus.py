"""Derived rules as macros over primitive steps, and the built-in corpus of
hand-encoded derivations."""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass

from .calculus import Derivation, RuleApp, init, rule
from .syntax import (
    Angle, Atom, BBox, Cap, Comma, Dia, Join, Meet, Prod, Struct, Var, occurrences_of,
    positions, walk,
)


# ------------------------------------------------------------ derived rules

def cap_w2(d: Derivation, ctx, extra: Struct) -> Derivation:
    """Gamma{D2} |- phi  to  Gamma{extra n D2} |- phi."""
    return rule("capE", rule("capW1", d, ctx=ctx, aux=extra), ctx=ctx)


def meet_l1(d: Derivation, ctx, other) -> Derivation:
    """Gamma{phi1} |- chi  to  Gamma{phi1 & other} |- chi."""
    return rule("meetL", rule("capW1", d, ctx=ctx, aux=Atom(other)), ctx=ctx)


def meet_l2(d: Derivation, ctx, other) -> Derivation:
    """Gamma{phi2} |- chi  to  Gamma{other & phi2} |- chi."""
    return rule("meetL", cap_w2(d, ctx, Atom(other)), ctx=ctx)


def _formula_premise(d: Derivation):
    ant = d.conclusion.ant
    if not isinstance(ant, Atom):
        raise ValueError(f"expected a formula antecedent, got {d.conclusion}")
    return ant.f


def prod_iso(d1: Derivation, d2: Derivation) -> Derivation:
    return rule("prodL", rule("prodR", d1, d2))


def meet_iso(d1: Derivation, d2: Derivation) -> Derivation:
    f1, f2 = _formula_premise(d1), _formula_premise(d2)
    left = rule("capW1", d1, aux=Atom(f2))
    right = cap_w2(d2, (), Atom(f1))
    return rule("meetL", rule("meetR", left, right))


def join_iso(d1: Derivation, d2: Derivation) -> Derivation:
    s1, s2 = d1.conclusion.succ, d2.conclusion.succ
    return rule("joinL", rule("joinR1", d1, aux=s2), rule("joinR2", d2, aux=s1))


MACROS = {"capW2": cap_w2, "meetL1": meet_l1, "meetL2": meet_l2,
          "prodIso": prod_iso, "meetIso": meet_iso, "joinIso": join_iso}


# ------------------------------------------------------------------ corpus

x, y, z = Var("x"), Var("y"), Var("z")


def _box_self(v):
    """<box v> |- box v  via init, bboxL, 4, bboxR."""
    return rule("bboxR", rule("Four", rule("bboxL", init(v))))


def _meet_intro(a, b):
    """a n b |- a & b."""
    return rule("meetR", rule("capW1", init(a), aux=Atom(b)), cap_w2(init(b), (), Atom(a)))


def builtin_corpus() -> dict[str, Derivation]:
    c = {}
    dx = rule("diaR", init(x))
    dy = rule("diaR", init(y))
    c["ax1"] = rule("T", dx)
    c["ax6"] = rule("diaL", rule("bboxL", init(x)))
    c["ax7"] = rule("bboxR", dx)
    c["ax2a"] = rule("diaL", rule("diaL", rule("Four", dx), ctx=(0,)))
    c["ax5"] = rule("diaL", rule("prodL", rule("K", rule("prodR", dx, dy)), ctx=(0,)))
    c["ax2b"] = rule("diaL", rule("diaR", rule("T", dx)))
    c["ax3a"] = rule("diaL", rule("joinL", rule("joinR1", dx, aux=Dia(y)),
                                  rule("joinR2", dy, aux=Dia(x)), ctx=(0,)))
    c["ax4b"] = rule("bboxR", rule("meetR",
                                   meet_l1(rule("bboxL", init(x)), (0,), BBox(y)),
                                   meet_l2(rule("bboxL", init(y)), (0,), BBox(x))))
    # the two converse directions the displays leave implicit
    jx = rule("diaL", rule("diaR", rule("joinR1", init(x), aux=y)))
    jy = rule("diaL", rule("diaR", rule("joinR2", init(y), aux=x)))
    c["ax3b"] = rule("joinL", jx, jy)
    bx = rule("bboxR", rule("bboxL", meet_l1(init(x), (), y)))
    by = rule("bboxR", rule("bboxL", meet_l2(init(y), (), x)))
    c["ax4a"] = rule("meetR", bx, by)

    k = rule("K", rule("prodR", _box_self(x), _box_self(y)))
    inner = rule("bboxL", rule("prodL", k, ctx=(0,)), ctx=(0,))
    c["conuc1"] = rule("T", rule("T", inner), ctx=())
    c["conuc2"] = rule("prodL", rule("bboxR", k))

    left = rule("joinR1", _meet_intro(x, y), aux=Meet(x, z))
    right = rule("joinR2", _meet_intro(x, z), aux=Meet(x, y))
    c["dist1"] = rule("meetL", rule("joinL", left, right, ctx=(1,)))

    goal = Join(x, Meet(y, z))
    a = rule("joinR1", cap_w2(init(x), (), Atom(Join(x, y))), aux=Meet(y, z))
    b = rule("joinR1", rule("capW1", init(x), aux=Atom(z)), aux=Meet(y, z))
    cc = rule("joinR2", _meet_intro(y, z), aux=x)
    c["dist2"] = rule("meetL", rule("joinL", a, rule("joinL", b, cc, ctx=(0,)), ctx=(1,)))
    assert c["dist2"].conclusion.succ == goal
    return c


# expected endsequents, in concrete syntax, for the corpus entries
CORPUS_CONCLUSIONS = {
    "ax1": "x |- dia x",
    "ax2a": "dia dia x |- dia x",
    "ax2b": "dia x |- dia dia x",
    "ax3a": "dia (x | y) |- (dia x | dia y)",
    "ax3b": "(dia x | dia y) |- dia (x | y)",
    "ax4a": "box (x & y) |- (box x & box y)",
    "ax4b": "(box x & box y) |- box (x & y)",
    "ax5": "dia (x * y) |- (dia x * dia y)",
    "ax6": "dia box x |- x",
    "ax7": "x |- box dia x",
    "conuc1": "box (box x * box y) |- (box x * box y)",
    "conuc2": "(box x * box y) |- box (box x * box y)",
    "dist1": "(x & (y | z)) |- ((x & y) | (x & z))",
    "dist2": "((x | y) & (x | z)) |- (x | (y & z))",
}


# --------------------------------------------------- substitution instances

def substitute(e, sigma: dict):
    """Replace variables by formulas throughout a formula, structure or sequent."""
    if isinstance(e, Var):
        return sigma.get(e.name, e)
    if e is None or not dataclasses.is_dataclass(e):
        return e
    return type(e)(*(substitute(getattr(e, f.name), sigma) for f in dataclasses.fields(e)))


def substitute_derivation(d: Derivation, sigma: dict) -> Derivation:
    """Uniform substitution keeps every rule instance an instance of the same rule."""
    app = RuleApp(d.app.rule, d.app.ctx, d.app.occ, substitute(d.app.aux, sigma))
    return Derivation(substitute(d.conclusion, sigma), app,
                      tuple(substitute_derivation(p, sigma) for p in d.premises))


def match(pattern, f, sigma=None) -> dict | None:
    """First-order matching of a formula pattern against f."""
    sigma = dict(sigma or {})
    if isinstance(pattern, Var):
        if sigma.setdefault(pattern.name, f) != f:
            return None
        return sigma
    if type(pattern) is not type(f):
        return None
    for fld in dataclasses.fields(pattern):
        sigma = match(getattr(pattern, fld.name), getattr(f, fld.name), sigma)
        if sigma is None:
            return None
    return sigma


# ------------------------------------------------ generated cut/mix corpus

_VARS = (x, y, z)


def random_formula(rng: random.Random, depth: int = 1):
    if depth <= 0 or rng.random() < 0.35:
        return rng.choice(_VARS)
    k = rng.randrange(5)
    if k == 0:
        return Dia(random_formula(rng, depth - 1))
    if k == 1:
        return BBox(random_formula(rng, depth - 1))
    op = (Prod, Meet, Join)[k - 2]
    return op(random_formula(rng, depth - 1), random_formula(rng, depth - 1))


def _instance(rng, corpus):
    key = rng.choice(sorted(corpus))
    sigma = {v.name: random_formula(rng, 1) for v in _VARS}
    return substitute_derivation(corpus[key], sigma)


def proofs_of(psi, corpus) -> list[Derivation]:
    """Derivations of some Δ ⊢ psi obtained as corpus instances (ax6 always fits)."""
    out = []
    for key in sorted(corpus):
        sigma = match(corpus[key].conclusion.succ, psi)
        if sigma is not None:
            out.append(substitute_derivation(corpus[key], sigma))
    return out


def _at_kind(t, kind):
    return [p for p, s in walk(t) if kind(s)]


def _wrap_left(rng, d):
    """Antecedent-only steps, so the succedent (the cut formula) is kept."""
    ant = d.conclusion.ant
    opts = ["capW1", "oEps", "epsO"]
    angles = _at_kind(ant, lambda s: isinstance(s, Angle))
    caps = _at_kind(ant, lambda s: isinstance(s, Cap))
    if angles:
        opts.append("Four")
    if caps:
        opts.append("capE")
    r = rng.choice(opts)
    ctx = rng.choice(angles if r == "Four" else caps if r == "capE" else list(positions(ant)))
    aux = Atom(random_formula(rng, 1)) if r == "capW1" else None
    return rule(r, d, ctx=ctx, aux=aux)


def _wrap_right(rng, d, psi, pool):
    ant = d.conclusion.ant
    kinds = {
        "T": lambda s: isinstance(s, Angle),
        "Four": lambda s: isinstance(s, Angle),
        "diaL": lambda s: isinstance(s, Angle) and isinstance(s.arg, Atom),
        "prodL": lambda s: isinstance(s, Comma) and isinstance(s.l, Atom) and isinstance(s.r, Atom),
        "K": lambda s: isinstance(s, Comma) and isinstance(s.l, Angle) and isinstance(s.r, Angle),
        "capE": lambda s: isinstance(s, Cap),
        "capC": lambda s: isinstance(s, Cap) and s.l == s.r,
        "bboxL": lambda s: isinstance(s, Atom),
    }
    opts = ["diaR", "prodR", "prodR", "capW1", "capW1", "oEps", "epsO", "joinR", "meetR"]
    opts += [k for k, f in kinds.items() if _at_kind(ant, f)]
    if isinstance(ant, Angle):
        opts.append("bboxR")
    r = rng.choice(opts)
    if r in kinds:
        return rule(r, d, ctx=rng.choice(_at_kind(ant, kinds[r])))
    if r in ("diaR", "bboxR"):
        return rule(r, d)
    if r == "prodR":
        other = init(psi) if rng.random() < 0.5 else rng.choice(pool)
        return rule("prodR", *((d, other) if rng.random() < 0.5 else (other, d)))
    if r == "capW1":
        aux = Atom(psi) if rng.random() < 0.6 else Comma(Atom(psi), Atom(random_formula(rng, 0)))
        return rule("capW1", d, ctx=rng.choice(list(positions(ant))), aux=aux)
    if r in ("oEps", "epsO"):
        return rule(r, d, ctx=rng.choice(list(positions(ant))))
    if r == "joinR":
        return rule(rng.choice(("joinR1", "joinR2")), d, aux=random_formula(rng, 1))
    return rule("meetR", d, d)


@dataclass
class GeneratedMix:
    derivation: Derivation
    occurrences: int
    nested: bool


def generated_mix_corpus(n: int = 120, seed: int = 0, corpus=None) -> list[GeneratedMix]:
    """Corpus instances joined by cut or mix at random antecedent positions.

    The right premise is a corpus instance (or an earlier generated item, for
    nesting) wrapped in a few random rule steps, some of which add further
    copies of the cut formula.  The left premise is a corpus instance whose
    succedent matches the chosen formula, occasionally padded with
    antecedent-only structural steps.
    """
    rng = random.Random(seed)
    corpus = corpus if corpus is not None else builtin_corpus()
    pool = [corpus[k] for k in sorted(corpus)]
    out: list[GeneratedMix] = []
    while len(out) < n:
        nested = bool(out) and rng.random() < 0.25
        d2 = rng.choice(out).derivation if nested else _instance(rng, corpus)
        atoms = [s.f for _, s in walk(d2.conclusion.ant) if isinstance(s, Atom)]
        psi = rng.choice(atoms)
        for _ in range(rng.randrange(4)):
            d2 = _wrap_right(rng, d2, psi, pool)
        occ = occurrences_of(d2.conclusion.ant, psi)
        if not occ:
            continue
        d1 = rng.choice(proofs_of(psi, corpus))
        for _ in range(rng.choice((0, 0, 1, 2))):
            d1 = _wrap_left(rng, d1)
        if len(occ) > 1 and rng.random() < 0.3:
            occ = sorted(rng.sample(occ, rng.randint(1, len(occ))))
        name = "cut" if len(occ) == 1 and rng.random() < 0.7 else "mix"
        out.append(GeneratedMix(rule(name, d1, d2, occ=tuple(occ)), len(occ), nested))
    return out
