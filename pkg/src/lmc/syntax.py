"""Formulas, structural terms and sequents, with parsing, rendering,
complexity measures, positions and the translations between sequents
and (in)equations.

Concrete syntax::

    formula := IDENT | "1" | "bot" | "top"
             | "(" formula ("*" | "&" | "|") formula ")"
             | ("dia" | "box") formula
    struct  := formula | "e" | "(" struct ("o" | "n") struct ")" | "<" struct ">"
    sequent := struct "|-" formula

Binary operators are always parenthesised, so no precedence rules are
needed.  Positions are tuples of child indices (0 or 1, unary nodes use 0).
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


# ---------------------------------------------------------------- formulas

def _term(cls):
    """Frozen dataclass with a cached hash.

    Terms are compared and hashed constantly during proof search; without
    the cache every lookup re-hashes the whole tree.
    """
    cls = dataclass(frozen=True)(cls)
    names = tuple(f.name for f in dataclasses.fields(cls))

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((cls.__name__,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


@_term
class Var:
    name: str


@_term
class One:
    pass


@_term
class Bot:
    pass


@_term
class Top:
    pass


@_term
class Prod:
    l: "Formula"
    r: "Formula"


@_term
class Meet:
    l: "Formula"
    r: "Formula"


@_term
class Join:
    l: "Formula"
    r: "Formula"


@_term
class Dia:
    arg: "Formula"


@_term
class BBox:
    arg: "Formula"


Formula = Union[Var, One, Bot, Top, Prod, Meet, Join, Dia, BBox]
BINARY_FORMULAS = (Prod, Meet, Join)
MODAL_FORMULAS = (Dia, BBox)


# ------------------------------------------------------- structural terms

@_term
class Atom:
    f: Formula


@_term
class Eps:
    pass


@_term
class Comma:
    l: "Struct"
    r: "Struct"


@_term
class Cap:
    l: "Struct"
    r: "Struct"


@_term
class Angle:
    arg: "Struct"


Struct = Union[Atom, Eps, Comma, Cap, Angle]
Position = tuple


@_term
class Sequent:
    ant: Struct
    succ: Formula

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Inequation:
    lhs: Formula
    rhs: Formula

    def __str__(self):
        return f"{render(self.lhs)} <= {render(self.rhs)}"


@dataclass(frozen=True)
class Equation:
    lhs: Formula
    rhs: Formula

    def __str__(self):
        return f"{render(self.lhs)} = {render(self.rhs)}"


# ------------------------------------------------------------- rendering

_FORMULA_OPS = {Prod: "*", Meet: "&", Join: "|"}
_STRUCT_OPS = {Comma: "o", Cap: "n"}


def render(e) -> str:
    if isinstance(e, Sequent):
        return f"{render(e.ant)} |- {render(e.succ)}"
    if isinstance(e, Inequation | Equation):
        return str(e)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, One):
        return "1"
    if isinstance(e, Bot):
        return "bot"
    if isinstance(e, Top):
        return "top"
    if isinstance(e, Dia):
        return "dia " + render(e.arg)
    if isinstance(e, BBox):
        return "box " + render(e.arg)
    if type(e) in _FORMULA_OPS:
        return f"({render(e.l)} {_FORMULA_OPS[type(e)]} {render(e.r)})"
    if isinstance(e, Atom):
        return render(e.f)
    if isinstance(e, Eps):
        return "e"
    if isinstance(e, Angle):
        return f"<{render(e.arg)}>"
    if type(e) in _STRUCT_OPS:
        return f"({render(e.l)} {_STRUCT_OPS[type(e)]} {render(e.r)})"
    raise TypeError(f"cannot render {e!r}")


# --------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<!>{text[pos:]}")
        self.pos = pos
        self.text = text


KEYWORDS = {"o", "n", "e", "dia", "box", "bot", "top"}
_TOKEN = re.compile(r"\s*(\|-|[()<>*&|]|1|[a-z][a-z0-9_]*)")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError("unexpected character", i, text)
        out.append((m.group(1), m.start(1)))
        i = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self):
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.pos(), self.text)
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.pos(), self.text)
        self.i += 1
        return tok

    def fail(self, msg):
        raise ParseError(msg, self.pos(), self.text)

    def formula(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self.fail("expected a formula")
        if tok == "(":
            self.take()
            left = self.formula()
            op = self.peek()
            if op not in ("*", "&", "|"):
                self.fail("expected '*', '&' or '|'")
            self.take()
            right = self.formula()
            self.take(")")
            return {"*": Prod, "&": Meet, "|": Join}[op](left, right)
        return self._formula_head(tok)

    def _formula_head(self, tok) -> Formula:
        if tok == "1":
            self.take()
            return One()
        if tok == "bot":
            self.take()
            return Bot()
        if tok == "top":
            self.take()
            return Top()
        if tok in ("dia", "box"):
            self.take()
            arg = self.formula()
            return Dia(arg) if tok == "dia" else BBox(arg)
        if re.fullmatch(r"[a-z][a-z0-9_]*", tok) and tok not in KEYWORDS:
            self.take()
            return Var(tok)
        self.fail(f"unexpected token {tok!r}")

    def struct(self) -> Struct:
        tok = self.peek()
        if tok is None:
            self.fail("expected a structural term")
        if tok == "e":
            self.take()
            return Eps()
        if tok == "<":
            self.take()
            arg = self.struct()
            self.take(">")
            return Angle(arg)
        if tok == "(":
            # either a structural pair or a parenthesised formula; decide
            # on the operator that follows the first component
            self.take()
            left = self.struct()
            op = self.peek()
            if op in ("o", "n"):
                self.take()
                right = self.struct()
                self.take(")")
                return Comma(left, right) if op == "o" else Cap(left, right)
            if op in ("*", "&", "|"):
                if not isinstance(left, Atom):
                    self.fail(f"formula operator {op!r} applied to a structural term")
                self.take()
                right = self.formula()
                self.take(")")
                return Atom({"*": Prod, "&": Meet, "|": Join}[op](left.f, right))
            self.fail("expected 'o', 'n', '*', '&' or '|'")
        return Atom(self._formula_head(tok))

    def end(self):
        if self.peek() is not None:
            self.fail(f"trailing input {self.peek()!r}")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.end()
    return f


def parse_struct(text: str) -> Struct:
    p = _Parser(text)
    s = p.struct()
    p.end()
    return s


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    ant = p.struct()
    p.take("|-")
    succ = p.formula()
    p.end()
    return Sequent(ant, succ)


def parse_inequation(text: str) -> Inequation | Equation:
    """Parse ``phi <= psi`` or ``phi = psi``; a sequent text is read through sharp."""
    if "|-" in text:
        return sharp(parse_sequent(text))
    for sep, cls in (("<=", Inequation), ("=", Equation)):
        if sep in text:
            lhs, rhs = text.split(sep, 1)
            return cls(parse_formula(lhs), parse_formula(rhs))
    raise ParseError("expected '<=', '=' or '|-'", len(text), text)


# -------------------------------------------------------------- measures

def cp(f: Formula) -> int:
    if isinstance(f, BINARY_FORMULAS):
        return cp(f.l) + cp(f.r) + 1
    if isinstance(f, MODAL_FORMULAS):
        return cp(f.arg) + 1
    return 0


def cp_s(t: Struct) -> int:
    if isinstance(t, (Comma, Cap)):
        return cp_s(t.l) + cp_s(t.r) + 1
    if isinstance(t, Angle):
        return cp_s(t.arg) + 1
    return 0


def variables(e) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Sequent):
        return variables(e.ant) | variables(e.succ)
    if isinstance(e, Inequation | Equation):
        return variables(e.lhs) | variables(e.rhs)
    return set().union(*(variables(c) for c in children(e))) if children(e) else set()


def children(e) -> tuple:
    if isinstance(e, (Prod, Meet, Join, Comma, Cap)):
        return (e.l, e.r)
    if isinstance(e, (Dia, BBox, Angle)):
        return (e.arg,)
    if isinstance(e, Atom):
        return (e.f,)
    return ()


# ---------------------------------------------------------- translations

def natural(t: Struct) -> Formula:
    if isinstance(t, Atom):
        return t.f
    if isinstance(t, Eps):
        return One()
    if isinstance(t, Comma):
        return Prod(natural(t.l), natural(t.r))
    if isinstance(t, Cap):
        return Meet(natural(t.l), natural(t.r))
    if isinstance(t, Angle):
        return Dia(natural(t.arg))
    raise TypeError(f"not a structural term: {t!r}")


def sharp(s: Sequent) -> Inequation:
    return Inequation(natural(s.ant), s.succ)


def flat(e: Equation | Inequation) -> list[Sequent]:
    """Sequent translation; an equation gives both directions, deduplicated."""
    if isinstance(e, Inequation):
        return [Sequent(Atom(e.lhs), e.rhs)]
    out = [Sequent(Atom(e.lhs), e.rhs)]
    if e.lhs != e.rhs:
        out.append(Sequent(Atom(e.rhs), e.lhs))
    return out


# ------------------------------------------------------------- positions

def struct_children(t: Struct) -> tuple:
    if isinstance(t, (Comma, Cap)):
        return (t.l, t.r)
    if isinstance(t, Angle):
        return (t.arg,)
    return ()


def subterm_at(t: Struct, pos: Iterable[int]) -> Struct:
    for k, i in enumerate(pos):
        kids = struct_children(t)
        if not 0 <= i < len(kids):
            raise IndexError(f"position {tuple(pos)} invalid at step {k} in {render(t)}")
        t = kids[i]
    return t


def is_valid_position(t: Struct, pos) -> bool:
    try:
        subterm_at(t, pos)
        return True
    except IndexError:
        return False


def _with_child(t: Struct, i: int, new: Struct) -> Struct:
    if isinstance(t, Angle):
        return Angle(new)
    if i == 0:
        return type(t)(new, t.r)
    return type(t)(t.l, new)


def positions(t: Struct, prefix=()) -> Iterator[Position]:
    """All node positions in preorder."""
    for p, _ in walk(t, prefix):
        yield p


def walk(t: Struct, prefix=()) -> Iterator[tuple[Position, Struct]]:
    """(position, subterm) pairs in preorder, in one pass."""
    yield prefix, t
    if isinstance(t, (Comma, Cap)):
        yield from walk(t.l, prefix + (0,))
        yield from walk(t.r, prefix + (1,))
    elif isinstance(t, Angle):
        yield from walk(t.arg, prefix + (0,))


def occurrences_of(t: Struct, f: Formula) -> list[Position]:
    target = Atom(f)
    return [p for p, sub in walk(t) if sub == target]


def atom_positions(t: Struct) -> list[Position]:
    return [p for p, sub in walk(t) if isinstance(sub, Atom)]


def _overlapping(ps) -> bool:
    ps = sorted(ps)
    return any(ps[i + 1][: len(ps[i])] == ps[i] for i in range(len(ps) - 1))


def replace_at(t: Struct, ps: Iterable, r: Struct) -> Struct:
    """Simultaneously replace the subterms at every position in ps by r."""
    ps = [tuple(p) for p in ps]
    if _overlapping(ps):
        raise ValueError(f"overlapping positions {ps}")
    for p in ps:
        if not is_valid_position(t, p):
            raise ValueError(f"invalid position {p} in {render(t)}")
    return _replace(t, ps, r, ())


def _replace(t, ps, r, here):
    if here in ps:
        return r
    if not any(p[: len(here)] == here for p in ps):
        return t
    kids = struct_children(t)
    for i in range(len(kids)):
        t = _with_child(t, i, _replace(kids[i], ps, r, here + (i,)))
    return t


def plug(t: Struct, pos, r: Struct) -> Struct:
    return replace_at(t, [pos], r)
