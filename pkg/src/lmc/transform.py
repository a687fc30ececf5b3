"""Cut and mix elimination.

A mix replaces several occurrences of its formula φ in the right premise's
antecedent at once.  eliminate_mix removes mixes bottom-up; each one is
pushed upwards through the right derivation until an occurrence becomes
principal, then up the left derivation until φ is decomposed, and finally
split into mixes on the immediate subformulas of φ.  Every recursive mix
must have a strictly smaller rank (cp(φ), p, h(d1)+h(d2)) than its parent;
this is checked at run time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .calculus import (
    CONTEXT_RULES, DECOMPOSING, PRIMITIVE, Derivation, DerivationError, RuleApp, apply_rule,
    check_derivation,
)
from .syntax import Sequent, cp, render, replace_at


class UnmatchedCase(RuntimeError):
    """No transformation schema covers this pair of rules."""

    def __init__(self, left: str, right: str, detail: str = ""):
        self.pair = (left, right)
        super().__init__(f"unmatched case({left}/{right}){': ' + detail if detail else ''}")


class RankNotDecreasing(AssertionError):
    pass


@dataclass(frozen=True, order=True)
class Rank:
    cp: int
    p: int
    height: int

    def __str__(self):
        return f"<{self.cp},{self.p},{self.height}>"


def mix_rank(d1: Derivation, d2: Derivation) -> Rank:
    phi = d1.conclusion.succ
    return Rank(cp(phi), 0 if d1.rule in DECOMPOSING else 1, d1.height + d2.height)


def rank(node: Derivation) -> Rank:
    if node.rule not in ("mix", "cut"):
        raise ValueError(f"not a mix node: {node.rule}")
    return mix_rank(*node.premises)


@dataclass
class TraceStep:
    schema: str
    path: tuple
    before: Rank
    after: Rank | None

    def __str__(self):
        after = "-" if self.after is None else str(self.after)
        return f"{self.schema:<22} node {list(self.path)}  rank {self.before} -> {after}"


# ------------------------------------------------------------ cut <-> mix

def _map_tree(d: Derivation, f) -> Derivation:
    prems = tuple(_map_tree(p, f) for p in d.premises)
    return f(d, prems)


def cut_as_mix(d: Derivation) -> Derivation:
    """Turn every cut into a one-occurrence mix."""
    def f(node, prems):
        app = node.app
        if app.rule == "cut":
            app = RuleApp("mix", app.ctx, app.occ, app.aux)
        if app is node.app and prems == node.premises:
            return node
        return Derivation(node.conclusion, app, prems)
    return _map_tree(d, f)


def mix_as_cuts(d: Derivation) -> Derivation:
    """Turn every n-occurrence mix into n nested cuts (n = 0 keeps the right premise)."""
    def f(node, prems):
        if node.rule != "mix":
            return node if prems == node.premises else Derivation(node.conclusion, node.app, prems)
        left, out = prems
        for o in node.app.occ:
            app = RuleApp("cut", occ=(o,))
            out = Derivation(apply_rule(app, [left.conclusion, out.conclusion]), app, (left, out))
        if out.conclusion != node.conclusion:
            raise AssertionError("mix_as_cuts changed the endsequent")
        return out
    return _map_tree(d, f)


# ------------------------------------------- tracing occurrences upwards

def _local_premise_positions(rule: str, q: tuple, aux=None) -> list | None:
    """Where a conclusion-local position q (relative to ctx) sits in the
    premise-local term; [] when the occurrence was weakened in, None when q
    is the principal position of a left logical rule."""
    head, rest = (q[0], q[1:]) if q else (None, ())
    if rule == "oA_l2r":       # (D1 o D2) o D3  ->  D1 o (D2 o D3)
        if head == 0:
            return [(0, 0) + rest]
        return [(0, 1) + rest[1:]] if rest[0] == 0 else [(1,) + rest[1:]]
    if rule == "oA_r2l":       # D1 o (D2 o D3)  ->  (D1 o D2) o D3
        if head == 1:
            return [(1, 1) + rest]
        return [(0,) + rest[1:]] if rest[0] == 0 else [(1, 0) + rest[1:]]
    if rule == "capA_l2r":
        return _local_premise_positions("oA_l2r", q)
    if rule == "capA_r2l":
        return _local_premise_positions("oA_r2l", q)
    if rule == "oEps":         # D  ->  D o e
        return [rest]
    if rule == "epsO":         # D  ->  e o D
        return [rest]
    if rule == "capW1":        # D1  ->  D1 n D2
        return [rest] if head == 0 else []
    if rule == "capE":         # D1 n D2  ->  D2 n D1
        return [(1 - head,) + rest]
    if rule == "capC":         # D n D  ->  D
        return [(0,) + q, (1,) + q]
    if rule == "K":            # <D1> o <D2>  ->  <D1 o D2>
        return [(rest[0], 0) + rest[1:]]
    if rule == "T":            # <D>  ->  D
        return [(0,) + q]
    if rule == "Four":         # <D>  ->  <<D>>
        return [(0,) + rest[1:]]
    return None


def _trace_up(d2: Derivation, occ) -> tuple[list, tuple]:
    """Map conclusion occurrences to per-premise occurrence lists.

    Also returns the positions (relative to the weakened term) of occurrences
    that a capW1 step introduced.
    """
    app, rule = d2.app, d2.rule
    per = [[] for _ in d2.premises]
    weakened = []
    for o in occ:
        if rule in CONTEXT_RULES or rule == "joinL":
            c = app.ctx
            if o[:len(c)] != c:
                for lst in per:
                    lst.append(o)
                continue
            local = _local_premise_positions(rule, o[len(c):], app.aux)
            if local is None:
                raise UnmatchedCase("?", rule, f"occurrence {list(o)} is principal")
            if rule == "capW1" and not local:
                weakened.append(o[len(c) + 1:])
            per[0].extend(c + p for p in local)
        elif rule == "prodR":
            per[o[0]].append(o[1:])
        elif rule == "meetR":
            per[0].append(o)
            per[1].append(o)
        elif rule in ("joinR1", "joinR2", "prodOne", "oneProd"):
            per[0].append(o)
        elif rule == "diaR":
            per[0].append(o[1:])
        elif rule == "bboxR":
            per[0].append((0,) + o)
        else:
            raise UnmatchedCase("?", rule, "cannot trace occurrences through this rule")
    return [sorted(set(p)) for p in per], tuple(weakened)


def _principal(d2: Derivation, occ) -> tuple | None:
    rule, c = d2.rule, d2.app.ctx
    if rule in ("prodL", "meetL", "joinL", "diaL", "oneL", "botL") and c in occ:
        return c
    if rule == "bboxL" and c + (0,) in occ:
        return c + (0,)
    return None


# --------------------------------------------------------------- the core

@dataclass
class _Eliminator:
    check: bool = True
    trace: list = field(default_factory=list)
    path: tuple = ()
    steps: int = 0

    def built(self, node: Derivation) -> Derivation:
        # subtrees were checked when they were built, so the new root suffices
        if self.check:
            if node.rule not in PRIMITIVE:
                raise DerivationError(self.path, f"{node.rule} left in the result")
            got = apply_rule(node.app, [p.conclusion for p in node.premises])
            if got != node.conclusion:
                raise DerivationError(self.path, f"{node.rule} yields {got}, recorded {node.conclusion}")
        return node

    def child(self, schema, parent: Rank, d1, d2, occ) -> Derivation:
        occ = tuple(sorted(set(occ)))
        if not occ:
            return d2
        r = mix_rank(d1, d2)
        if not r < parent:
            raise RankNotDecreasing(f"{schema}: child rank {r} not below {parent}")
        self.trace.append(TraceStep(schema, self.path, parent, r))
        return self.mix(d1, d2, occ)

    def leaf(self, schema, parent, node):
        self.trace.append(TraceStep(schema, self.path, parent, None))
        return self.built(node)

    def mix(self, d1: Derivation, d2: Derivation, occ) -> Derivation:
        self.steps += 1
        occ = tuple(sorted(set(occ)))
        target = Sequent(replace_at(d2.conclusion.ant, occ, d1.conclusion.ant), d2.conclusion.succ)
        if not occ:
            return d2
        r = mix_rank(d1, d2)
        out = self._mix(d1, d2, occ, r, target)
        if out.conclusion != target:
            raise AssertionError(f"mix produced {out.conclusion}, expected {target}")
        return out

    def _mix(self, d1, d2, occ, r, target):
        delta, phi = d1.conclusion.ant, d1.conclusion.succ
        for d in (d1, d2):
            if d.rule in ("mix", "cut"):
                raise ValueError("mix premises must be mix-free; eliminate bottom-up")
        if d1.rule == "init":
            return self.leaf("base:init-left", r, d2)
        if d1.rule == "botL":
            pos = occ[0] + d1.app.ctx
            return self.leaf("base:botL-left", r, Derivation(target, RuleApp("botL", pos, aux=target)))
        if d2.rule == "topR":
            return self.leaf("base:topR-right", r, Derivation(target, RuleApp("topR", aux=target)))
        if d2.rule == "init":
            return self.leaf("base:init-right", r, d1)
        if d2.rule == "botL" and d2.app.ctx not in occ:
            return self.leaf("base:botL-right", r,
                             Derivation(target, RuleApp("botL", d2.app.ctx, aux=target)))

        star = _principal(d2, occ)
        if star is None:
            return self._permute(d1, d2, occ, r, target)

        # occurrences other than the principal one go into the premises first
        rest = tuple(o for o in occ if o != star)
        if d2.rule == "botL":
            # an axiom stays an axiom whatever replaces the other occurrences
            s2 = Sequent(replace_at(d2.conclusion.ant, rest, delta), d2.conclusion.succ)
            r2 = Derivation(s2, RuleApp("botL", star, aux=s2))
        elif rest:
            r2 = self._push(d1, d2, rest, r, "C:side-occurrences")
        else:
            r2 = d2
        if d1.rule in DECOMPOSING:
            return self._principal_reduction(d1, r2, star, r)
        return self._up_left(d1, r2, star, r)

    # B: no occurrence is principal, so the mix moves above d2's last rule
    def _permute(self, d1, d2, occ, r, target):
        out = self._push(d1, d2, occ, r, f"B:{d2.rule}")
        if out.conclusion != target:
            raise AssertionError(f"permutation over {d2.rule} gave {out.conclusion}")
        return out

    def _push(self, d1, d2, occ, r, schema):
        per, weakened = _trace_up(d2, occ)
        prems = tuple(self.child(schema, r, d1, p, o) for p, o in zip(d2.premises, per))
        app = d2.app
        if weakened:
            aux = replace_at(app.aux, weakened, d1.conclusion.ant)
            app = RuleApp(app.rule, app.ctx, app.occ, aux)
        concl = apply_rule(app, [p.conclusion for p in prems])
        return self.built(Derivation(concl, app, prems))

    # C, p = 0: both sides introduce the mix formula's main connective
    def _principal_reduction(self, d1, r2, star, r):
        l, rr = d1.rule, r2.rule
        pair = f"C:{l}/{rr}"
        if (l, rr) == ("prodR", "prodL"):
            (a, b), (p,) = d1.premises, r2.premises
            x = self.child(pair, r, a, p, [star + (0,)])
            y = self.child(pair, r, b, x, [star + (1,)])
            return self.built(y)
        if (l, rr) == ("meetR", "meetL"):
            (a, b), (p,) = d1.premises, r2.premises
            x = self.child(pair, r, a, p, [star + (0,)])
            y = self.child(pair, r, b, x, [star + (1,)])
            app = RuleApp("capC", star)
            return self.built(Derivation(apply_rule(app, [y.conclusion]), app, (y,)))
        if l in ("joinR1", "joinR2") and rr == "joinL":
            (a,) = d1.premises
            p = r2.premises[0 if l == "joinR1" else 1]
            return self.built(self.child(pair, r, a, p, [star]))
        if (l, rr) == ("diaR", "diaL"):
            (a,), (p,) = d1.premises, r2.premises
            return self.built(self.child(pair, r, a, p, [star + (0,)]))
        if (l, rr) == ("bboxR", "bboxL"):
            (a,), (p,) = d1.premises, r2.premises
            return self.built(self.child(pair, r, a, p, [star[:-1]]))
        if (l, rr) == ("oneR", "oneL"):
            (p,) = r2.premises
            self.trace.append(TraceStep(pair, self.path, r, None))
            return self.built(p)
        raise UnmatchedCase(l, rr, f"mix formula {render(d1.conclusion.succ)}")

    # C, p = 1: climb d1 until the rule that decomposes the mix formula
    def _up_left(self, d, r2, star, r):
        rule, c = d.rule, d.app.ctx
        target_ant = replace_at(r2.conclusion.ant, [star], d.conclusion.ant)
        target = Sequent(target_ant, r2.conclusion.succ)
        if rule == "init":
            return self.leaf("up:init", r, r2)
        if rule == "botL":
            return self.leaf("up:botL", r, Derivation(target, RuleApp("botL", star + c, aux=target)))
        if rule in DECOMPOSING:
            return self.built(self.child(f"up:{rule}", r, d, r2, [star]))
        if rule in CONTEXT_RULES or rule == "joinL":
            prems = tuple(self._up_left(p, r2, star, r) for p in d.premises)
            app = RuleApp(rule, star + c, aux=d.app.aux)
            self.trace.append(TraceStep(f"up:{rule}", self.path, r, None))
            return self.built(Derivation(apply_rule(app, [p.conclusion for p in prems]), app, prems))
        raise UnmatchedCase(rule, r2.rule, "while climbing the left derivation")


def eliminate_mix(d: Derivation, check: bool = True, trace: list | None = None) -> Derivation:
    """Remove every mix (and cut) from d, uppermost first, leftmost first.

    With ``trace`` given, one TraceStep per schema application is appended.
    """
    el = _Eliminator(check=check)

    def go(node: Derivation, path: tuple) -> Derivation:
        prems = tuple(go(p, path + (i,)) for i, p in enumerate(node.premises))
        if node.rule not in ("mix", "cut"):
            if prems == node.premises:
                return node
            return Derivation(node.conclusion, node.app, prems)
        el.path = path
        out = el.mix(prems[0], prems[1], node.app.occ)
        if out.conclusion != node.conclusion:
            raise AssertionError(f"endsequent changed at {list(path)}")
        return out

    out = go(d, ())
    if check:
        check_derivation(out, allow=PRIMITIVE)
    if trace is not None:
        trace.extend(el.trace)
    return out


def eliminate_cut(d: Derivation, check: bool = True, trace: list | None = None) -> Derivation:
    return eliminate_mix(cut_as_mix(d), check=check, trace=trace)

