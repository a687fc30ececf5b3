"""Finite closure ℓ-monoids as powerset algebras.

Every bundled model is the powerset of a finite set of points carrying a
(possibly partial) multiplication and a preorder.  Elements are bitmasks over
the points.  ◇P is the down-closure of P along the preorder and ◻P the set of
points whose whole down-set lies in P.  Truncated language models use words
as points, truncated concatenation and the prefix order.

When the carrier is small the operations are tabulated with numpy, which
lets exhaustive checks evaluate a formula on every assignment at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import algebra
from .calculus import RuleApp, apply_rule
from .syntax import (
    Angle, Atom, BBox, Bot, Cap, Comma, Dia, Eps, Equation, Inequation, Join, Meet, One,
    Prod, Sequent, Top, Var, natural, parse_inequation, replace_at, sharp, variables, walk,
)

TABLE_LIMIT = 10          # tabulate when there are at most this many points
MAX_POINTS = 20
EXHAUSTIVE_BUDGET = 4_000_000


class ModelError(ValueError):
    pass


class UnboundVariable(KeyError):
    pass


@dataclass(eq=False)
class Model:
    name: str
    points: tuple                 # display label of each point
    mul: tuple                    # mul[i][j] = index of i·j, or None if dropped
    unit: int
    below: tuple                  # below[b] = bitmask of points a with a ≼ b
    tables: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.points) > MAX_POINTS:
            raise ModelError(f"{len(self.points)} points exceed the limit of {MAX_POINTS}")
        if self.tables is None and len(self.points) <= TABLE_LIMIT:
            self.tables = _tabulate(self)

    # carrier ---------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def elements(self) -> range:
        return range(self.size)

    @property
    def bot(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return self.size - 1

    @property
    def one(self) -> int:
        return 1 << self.unit

    # operations; numpy arrays are accepted when tabulated -------------------
    def prod(self, a, b):
        if self.tables is not None:
            return self.tables["prod"][a, b]
        out = 0
        for i in _bits(a):
            for j in _bits(b):
                k = self.mul[i][j]
                if k is not None:
                    out |= 1 << k
        return out

    def dia(self, a):
        if self.tables is not None:
            return self.tables["dia"][a]
        out = 0
        for b in _bits(a):
            out |= self.below[b]
        return out

    def box(self, a):
        if self.tables is not None:
            return self.tables["box"][a]
        return sum(1 << b for b in range(self.n) if self.below[b] & ~a == 0)

    @staticmethod
    def meet(a, b):
        return a & b

    @staticmethod
    def join(a, b):
        return a | b

    @staticmethod
    def leq(a, b):
        return (a & ~b) == 0

    def corrupted(self, name: str, **tables) -> "Model":
        """Copy with some operation tables replaced; used to plant defects."""
        if self.tables is None:
            raise ModelError("only tabulated models can be corrupted")
        new = dict(self.tables)
        for k, v in tables.items():
            new[k] = np.asarray(v, dtype=new[k].dtype)
        return Model(name, self.points, self.mul, self.unit, self.below, new)

    def show(self, a: int) -> str:
        return "{" + ",".join(self.points[i] for i in _bits(int(a))) + "}"

    def parse_element(self, text: str) -> int:
        """Inverse of show; ``e`` and ``eps`` also name the empty word."""
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"expected {{p,q,...}}, got {text!r}")
        out = 0
        for tok in filter(None, (t.strip() for t in body[1:-1].split(","))):
            tok = "ε" if tok in ("e", "eps") and "ε" in self.points else tok
            if tok not in self.points:
                raise ValueError(f"{tok!r} is not a point of {self.name}")
            out |= 1 << self.points.index(tok)
        return out

    @property
    def monoid(self) -> "algebra.FiniteMonoid | None":
        """The underlying monoid, or None when the product drops words."""
        if any(k is None for row in self.mul for k in row):
            return None
        return algebra.FiniteMonoid(self.points, self.mul, self.unit)

    def __str__(self):
        return f"{self.name} ({self.n} points, {self.size} elements)"

    def describe(self) -> str:
        lines = [f"model {self.name}", "points: " + " ".join(self.points),
                 f"unit: {self.points[self.unit]}"]
        if self.n <= 8:
            lines.append("product:")
            for i in range(self.n):
                row = [self.points[k] if k is not None else "-" for k in self.mul[i]]
                lines.append("  " + self.points[i] + ": " + " ".join(row))
            lines.append("preorder (a ≼ b):")
            for b in range(self.n):
                lines.append("  " + " ".join(self.points[a] for a in _bits(self.below[b]))
                             + " ≼ " + self.points[b])
        return "\n".join(lines)


def _bits(a: int):
    i = 0
    while a:
        if a & 1:
            yield i
        a >>= 1
        i += 1


def _tabulate(m: Model) -> dict:
    size, ar = m.size, np.arange(m.size)
    dtype = np.int32
    left = np.zeros((m.n, size), dtype=dtype)   # left[i][Q] = {i}·Q
    for i in range(m.n):
        for j in range(m.n):
            k = m.mul[i][j]
            if k is not None:
                left[i] |= np.where(ar >> j & 1, 1 << k, 0).astype(dtype)
    prod = np.zeros((size, size), dtype=dtype)
    dia = np.zeros(size, dtype=dtype)
    box = np.zeros(size, dtype=dtype)
    for i in range(m.n):
        has = (ar >> i & 1).astype(bool)
        prod[has] |= left[i]
        dia[has] |= m.below[i]
        box |= np.where((m.below[i] & ~ar) == 0, 1 << i, 0).astype(dtype)
    return {"prod": prod, "dia": dia, "box": box}


# --------------------------------------------------------------- builders

def words_upto(alphabet: str, max_len: int) -> list[str]:
    out = [""]
    for n in range(1, max_len + 1):
        out += ["".join(p) for p in itertools.product(alphabet, repeat=n)]
    return out


def build_truncated_model(alphabet: str, max_len: int) -> Model:
    """Subsets of Σ^≤L with concatenation dropping words longer than L."""
    if not alphabet or max_len < 0:
        raise ModelError("need a nonempty alphabet and L >= 0")
    words = words_upto(alphabet, max_len)
    if len(words) > MAX_POINTS:
        raise ModelError(f"|Σ^≤L| = {len(words)} exceeds the limit of {MAX_POINTS}")
    idx = {w: i for i, w in enumerate(words)}
    mul = tuple(tuple(idx.get(u + v) for v in words) for u in words)
    below = tuple(sum(1 << idx[w[:k]] for k in range(len(w) + 1)) for w in words)
    labels = tuple(w or "ε" for w in words)
    return Model(f"truncated(Σ={alphabet},L={max_len})", labels, mul, 0, below)


def build_preorder_model(monoid, unit: int | None = None, preorder=None, name=None) -> Model:
    """Powerset model of a finite monoid with a preorder satisfying the RDP.

    ``monoid`` is a FiniteMonoid or a square table (with ``unit``);
    ``preorder[a][b]`` is true when a ≼ b and defaults to equality.
    """
    if not isinstance(monoid, algebra.FiniteMonoid):
        table = [list(r) for r in monoid]
        try:
            monoid = algebra.FiniteMonoid([str(i) for i in range(len(table))], table,
                                          0 if unit is None else unit)
        except algebra.MonoidError as e:
            raise ModelError(f"monoid laws: {e}")
    n = monoid.size
    rel = preorder if preorder is not None else [[a == b for b in range(n)] for a in range(n)]
    rel = [[bool(v) for v in row] for row in rel]
    if len(rel) != n or any(len(r) != n for r in rel):
        raise ModelError("preorder matrix has the wrong shape")
    problem = algebra.preorder_failure(rel)
    if problem:
        raise ModelError(f"preorder: {problem}")
    witness = algebra.check_rdp(monoid, rel)
    if witness:
        a1, a2, b = (monoid.names[i] for i in witness)
        raise ModelError(f"RDP fails: {b} ≼ {a1}·{a2} has no decomposition")
    below = tuple(sum(1 << a for a in range(n) if rel[a][b]) for b in range(n))
    return Model(name or "preorder-model", monoid.names, monoid.table, monoid.unit, below)


def z2_total() -> Model:
    return build_preorder_model(algebra.z2(), preorder=[[1, 1], [1, 1]], name="Z2-total")


def z2_discrete() -> Model:
    return build_preorder_model(algebra.z2(), name="Z2-discrete")


def bundled_models() -> list[Model]:
    return [build_truncated_model("a", L) for L in range(4)] + \
           [build_truncated_model("ab", L) for L in range(3)] + [z2_total(), z2_discrete()]


BUILTIN = {"z2-total": z2_total, "z2-discrete": z2_discrete}


def parse_model(text: str) -> Model:
    """Read a model description.

    Either a single ``truncated alphabet=<syms> L=<n>`` line, a builtin name
    (``z2-total``, ``z2-discrete``), or ``key: values`` lines::

        elements: 1 a
        unit: 1
        table: 1 a a 1          # row-major products
        preorder: 1 1 1 1       # row-major 0/1 matrix, row a col b means a ≼ b
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) == 1 and lines[0].lower() in BUILTIN:
        return BUILTIN[lines[0].lower()]()
    if lines and lines[0].startswith("truncated"):
        opts = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
        try:
            return build_truncated_model(opts["alphabet"], int(opts["L"]))
        except (KeyError, ValueError) as e:
            raise ModelError(f"bad truncated model line: {e}")
    fields = {}
    for ln in lines:
        key, _, rest = ln.partition(":")
        fields[key.strip()] = rest.split()
    try:
        names = fields["elements"]
        idx = {e: i for i, e in enumerate(names)}
        n = len(names)
        flat_table = [idx[v] for v in fields["table"]]
        unit = idx[fields.get("unit", [names[0]])[0]]
    except KeyError as e:
        raise ModelError(f"missing or unknown entry {e}")
    if len(flat_table) != n * n:
        raise ModelError(f"table needs {n * n} entries, got {len(flat_table)}")
    table = [flat_table[i * n:(i + 1) * n] for i in range(n)]
    pre = None
    if "preorder" in fields:
        bits = [int(v) for v in fields["preorder"]]
        if len(bits) != n * n:
            raise ModelError(f"preorder needs {n * n} entries, got {len(bits)}")
        pre = [bits[i * n:(i + 1) * n] for i in range(n)]
    try:
        monoid = algebra.FiniteMonoid(names, table, unit)
    except algebra.MonoidError as e:
        raise ModelError(f"monoid laws: {e}")
    return build_preorder_model(monoid, preorder=pre, name=fields.get("name", ["file-model"])[0])


# ------------------------------------------------------------- evaluation

def eval_formula(m: Model, assignment: dict, f):
    """Value of f; assignment values may be ints or (for tabulated models)
    equally shaped numpy arrays, in which case evaluation is pointwise."""
    if isinstance(f, Var):
        try:
            return assignment[f.name]
        except KeyError:
            raise UnboundVariable(f.name)
    if isinstance(f, One):
        return m.one
    if isinstance(f, Bot):
        return m.bot
    if isinstance(f, Top):
        return m.top
    if isinstance(f, Prod):
        return m.prod(eval_formula(m, assignment, f.l), eval_formula(m, assignment, f.r))
    if isinstance(f, Meet):
        return eval_formula(m, assignment, f.l) & eval_formula(m, assignment, f.r)
    if isinstance(f, Join):
        return eval_formula(m, assignment, f.l) | eval_formula(m, assignment, f.r)
    if isinstance(f, Dia):
        return m.dia(eval_formula(m, assignment, f.arg))
    if isinstance(f, BBox):
        return m.box(eval_formula(m, assignment, f.arg))
    raise TypeError(f"not a formula: {f!r}")


def eval_struct(m: Model, assignment: dict, t):
    return eval_formula(m, assignment, natural(t))


@dataclass
class Counterexample:
    assignment: dict
    lhs: int
    rhs: int
    ineq: Inequation

    def show(self, m: Model) -> str:
        asg = ", ".join(f"{k} ↦ {m.show(v)}" for k, v in sorted(self.assignment.items()))
        return (f"{self.ineq} fails at [{asg}]: "
                f"lhs = {m.show(self.lhs)}, rhs = {m.show(self.rhs)}")


def _inequations(e) -> list[Inequation]:
    if isinstance(e, str):
        e = parse_inequation(e)
    if isinstance(e, Sequent):
        e = sharp(e)
    if isinstance(e, Equation):
        return [Inequation(e.lhs, e.rhs), Inequation(e.rhs, e.lhs)]
    return [e]


def _grid(size: int, k: int) -> list[np.ndarray]:
    """All k-tuples over range(size), first coordinate most significant."""
    if k == 0:
        return []
    return [a.ravel() for a in np.meshgrid(*[np.arange(size)] * k, indexing="ij")]


def check_inequation(m: Model, e, strategy: str = "exhaustive", samples: int = 1000,
                     seed: int = 0, budget: int = EXHAUSTIVE_BUDGET) -> Counterexample | None:
    """First falsifying assignment (canonical order, or sampling order), or None.

    ``e`` may be an Inequation, an Equation (both directions), a Sequent or
    text accepted by parse_inequation.
    """
    for ineq in _inequations(e):
        names = sorted(variables(ineq.lhs) | variables(ineq.rhs))
        cex = _check_one(m, ineq, names, strategy, samples, seed, budget)
        if cex is not None:
            return cex
    return None


def _check_one(m, ineq, names, strategy, samples, seed, budget):
    k = len(names)
    if strategy == "exhaustive":
        if m.size ** k > budget:
            raise ModelError(f"{m.size}^{k} assignments exceed the exhaustive budget {budget}")
        if m.tables is None:
            for vals in itertools.product(m.elements, repeat=k):
                asg = dict(zip(names, vals))
                lhs, rhs = eval_formula(m, asg, ineq.lhs), eval_formula(m, asg, ineq.rhs)
                if lhs & ~rhs:
                    return Counterexample(asg, lhs, rhs, ineq)
            return None
        cols = _grid(m.size, k)
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        cols = [rng.integers(0, m.size, samples) for _ in names]
        if m.tables is None:
            for row in zip(*cols) if cols else [()] * samples:
                asg = dict(zip(names, (int(v) for v in row)))
                lhs, rhs = eval_formula(m, asg, ineq.lhs), eval_formula(m, asg, ineq.rhs)
                if lhs & ~rhs:
                    return Counterexample(asg, lhs, rhs, ineq)
            return None
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    asg = dict(zip(names, cols))
    lhs = np.broadcast_to(eval_formula(m, asg, ineq.lhs), cols[0].shape if cols else ())
    rhs = np.broadcast_to(eval_formula(m, asg, ineq.rhs), cols[0].shape if cols else ())
    bad = np.flatnonzero(np.atleast_1d(lhs & ~rhs))
    if bad.size == 0:
        return None
    i = int(bad[0])
    pick = (lambda a: int(np.atleast_1d(a)[i]))
    return Counterexample({n: pick(c) for n, c in asg.items()}, pick(lhs), pick(rhs), ineq)


# --------------------------------------------------------------- batteries

LATTICE_LAWS = {
    "meet-assoc": "((x & y) & z) = (x & (y & z))",
    "join-assoc": "((x | y) | z) = (x | (y | z))",
    "meet-comm": "(x & y) = (y & x)",
    "join-comm": "(x | y) = (y | x)",
    "absorb-1": "(x & (x | y)) = x",
    "absorb-2": "(x | (x & y)) = x",
    "distrib": "(x & (y | z)) = ((x & y) | (x & z))",
    "bot": "bot <= x",
    "top": "x <= top",
}

MONOID_LAWS = {
    "prod-assoc": "((x * y) * z) = (x * (y * z))",
    "unit-left": "(1 * x) = x",
    "unit-right": "(x * 1) = x",
    "prod-join-left": "(x * (y | z)) = ((x * y) | (x * z))",
    "prod-join-right": "((y | z) * x) = ((y * x) | (z * x))",
    "bot-absorb-left": "(bot * x) = bot",
    "bot-absorb-right": "(x * bot) = bot",
}

AXIOMS = {
    "1": "x <= dia x",
    "2": "dia dia x = dia x",
    "3": "dia (x | y) = (dia x | dia y)",
    "4": "box (x & y) = (box x & box y)",
    "5": "dia (x * y) <= (dia x * dia y)",
    "6": "dia box x <= x",
    "7": "x <= box dia x",
}

DERIVED_LAWS = {
    "i": "box x <= x",
    "ii": "box box x = box x",
    "iii": "box (box x * box y) = (box x * box y)",
    "iv": "dia box x = box x",
    "v": "dia bot = bot",
    "vi": "dia top = top",
    "vii": "box bot = bot",
    "viii": "box top = top",
    "ix": "dia (x & y) <= (dia x & dia y)",
    "x": "(box x | box y) <= box (x | y)",
    "xi": "box dia x = dia x",
    "xii": "dia (dia x * dia y) = (dia x * dia y)",
    "xiii": "dia (dia x & dia y) = (dia x & dia y)",
    "xiv": "box (box x | box y) = (box x | box y)",
    "xv": "(box x * box y) <= box (x * y)",
}

DISTRIBUTIVITY = {
    "dist-1": "(x & (y | z)) <= ((x & y) | (x & z))",
    "dist-2": "((x | y) & (x | z)) <= (x | (y & z))",
}

BATTERIES = {"lattice": LATTICE_LAWS, "monoid": MONOID_LAWS, "axioms": AXIOMS,
             "derived": DERIVED_LAWS}


@dataclass
class LawResult:
    group: str
    name: str
    law: str
    counterexample: Counterexample | None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


@dataclass
class AxiomReport:
    model: Model
    results: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.ok]

    def __str__(self):
        lines = [f"{self.model}: {'all laws hold' if self.ok else 'FAILURES'}"]
        for r in self.results:
            mark = "pass" if r.ok else "FAIL  " + r.counterexample.show(self.model)
            lines.append(f"  [{r.group} {r.name}] {r.law}: {mark}")
        return "\n".join(lines)


def verify_axioms(m: Model, groups=tuple(BATTERIES)) -> AxiomReport:
    results = []
    for g in groups:
        for name, law in BATTERIES[g].items():
            results.append(LawResult(g, name, law, check_inequation(m, law)))
    return AxiomReport(m, results)


def residuation_failure(m: Model) -> tuple[int, int] | None:
    """First (a, b) with ◇a ≤ b disagreeing with a ≤ ◻b."""
    for a in m.elements:
        da = int(m.dia(a))
        for b in m.elements:
            if m.leq(da, b) != m.leq(a, int(m.box(b))):
                return a, b
    return None


# ------------------------------------------------------ rule soundness

HOLE = Var("_hole")
_WRAPS = ("o_r", "o_l", "n_r", "n_l", "angle")


def _wrap(kind: str, inner, side: Atom):
    return {"o_r": lambda: Comma(inner, side), "o_l": lambda: Comma(side, inner),
            "n_r": lambda: Cap(inner, side), "n_l": lambda: Cap(side, inner),
            "angle": lambda: Angle(inner)}[kind]()


def context_shapes(depth: int = 2) -> list:
    """Contexts with one hole (Atom(HOLE)) up to the given wrapping depth.

    The innermost wrapper uses side variable c1, the next c2, and so on;
    depth 2 gives 1 + 5 + 25 = 31 shapes.
    """
    shapes = [Atom(HOLE)]
    layer = [Atom(HOLE)]
    for d in range(1, depth + 1):
        side = Atom(Var(f"c{d}"))
        layer = [_wrap(k, s, side) for s in layer for k in _WRAPS]
        shapes += layer
    return shapes


def two_hole_shapes() -> list:
    h = Atom(HOLE)
    base = [Comma(h, h), Cap(h, h)]
    side = Atom(Var("c1"))
    return base + [_wrap(k, s, side) for s in base for k in _WRAPS]


def _hole_path(t, prefix=()):
    return [p for p, sub in walk(t, prefix) if sub == Atom(HOLE)]


def _fill(shape, t):
    return replace_at(shape, _hole_path(shape), t)


@dataclass
class RuleInstance:
    rule: str
    premises: tuple
    conclusion: Sequent


def _v(name):
    return Var(name)


def _a(name):
    return Atom(Var(name))


def _context_instances(rule, shapes):
    d1, d2, d3 = _a("d1"), _a("d2"), _a("d3")
    f1, f2 = _v("p1"), _v("p2")
    local = {
        "oA_l2r": [Comma(Comma(d1, d2), d3)], "oA_r2l": [Comma(d1, Comma(d2, d3))],
        "capA_l2r": [Cap(Cap(d1, d2), d3)], "capA_r2l": [Cap(d1, Cap(d2, d3))],
        "oEps": [d1], "epsO": [d1], "capW1": [d1], "capE": [Cap(d1, d2)],
        "capC": [Cap(d1, d1)], "K": [Comma(Angle(d1), Angle(d2))], "T": [Angle(d1)],
        "Four": [Angle(d1)], "prodL": [Comma(Atom(f1), Atom(f2))],
        "meetL": [Cap(Atom(f1), Atom(f2))], "diaL": [Angle(Atom(f1))],
        "bboxL": [Atom(f1)], "oneL": [Eps()],
    }[rule]
    aux = d2 if rule == "capW1" else None
    chi = _v("chi")
    for shape in shapes:
        (ctx,) = _hole_path(shape)
        for sub in local:
            prem = Sequent(_fill(shape, sub), chi)
            yield RuleApp(rule, ctx, aux=aux), (prem,)


def _instances(rule: str, depth: int = 2):
    shapes = context_shapes(depth)
    chi, f1, f2 = _v("chi"), _v("p1"), _v("p2")
    d1, d2 = _a("d1"), _a("d2")
    if rule in ("oA_l2r", "oA_r2l", "capA_l2r", "capA_r2l", "oEps", "epsO", "capW1", "capE",
                "capC", "K", "T", "Four", "prodL", "meetL", "diaL", "bboxL", "oneL"):
        yield from _context_instances(rule, shapes)
    elif rule == "init":
        s = Sequent(Atom(f1), f1)
        yield RuleApp("init", aux=s), ()
    elif rule == "oneR":
        s = Sequent(Eps(), One())
        yield RuleApp("oneR", aux=s), ()
    elif rule == "botL":
        for shape in shapes:
            (ctx,) = _hole_path(shape)
            s = Sequent(_fill(shape, Atom(Bot())), chi)
            yield RuleApp("botL", ctx, aux=s), ()
    elif rule == "topR":
        for shape in shapes:
            s = Sequent(_fill(shape, d1), Top())
            yield RuleApp("topR", aux=s), ()
    elif rule == "joinL":
        for shape in shapes:
            (ctx,) = _hole_path(shape)
            yield RuleApp("joinL", ctx), (Sequent(_fill(shape, Atom(f1)), chi),
                                          Sequent(_fill(shape, Atom(f2)), chi))
    elif rule == "prodR":
        for shape in shapes:
            yield RuleApp("prodR"), (Sequent(_fill(shape, d1), f1), Sequent(d2, f2))
    elif rule == "meetR":
        for shape in shapes:
            g = _fill(shape, d1)
            yield RuleApp("meetR"), (Sequent(g, f1), Sequent(g, f2))
    elif rule in ("joinR1", "joinR2"):
        for shape in shapes:
            yield RuleApp(rule, aux=f2), (Sequent(_fill(shape, d1), f1),)
    elif rule in ("diaR", "prodOne", "oneProd"):
        for shape in shapes:
            yield RuleApp(rule), (Sequent(_fill(shape, d1), f1),)
    elif rule == "bboxR":
        for shape in shapes:
            yield RuleApp(rule), (Sequent(Angle(_fill(shape, d1)), f1),)
    elif rule == "cut":
        for shape in shapes:
            (ctx,) = _hole_path(shape)
            yield RuleApp("cut", occ=(ctx,)), (Sequent(d1, f1), Sequent(_fill(shape, Atom(f1)), chi))
    elif rule == "mix":
        for shape in shapes + two_hole_shapes():
            holes = _hole_path(shape)
            right = Sequent(_fill(shape, Atom(f1)), chi)
            for k in range(0, len(holes) + 1):
                for occ in itertools.combinations(holes, k):
                    yield RuleApp("mix", occ=occ), (Sequent(d1, f1), right)
    else:
        raise ValueError(f"unknown rule {rule!r}")


def rule_instances(rule: str, depth: int = 2, invert: bool = False) -> list[RuleInstance]:
    """Schema instances with metavariables as fresh variables.

    ``invert`` swaps premise and conclusion of one-premise rules, a planted
    defect the soundness harness must catch.
    """
    out = []
    for app, prems in _instances(rule, depth):
        concl = apply_rule(app, prems)
        if invert:
            if len(prems) != 1:
                raise ValueError(f"can only invert one-premise rules, not {rule}")
            prems, concl = (concl,), prems[0]
        out.append(RuleInstance(rule, tuple(prems), concl))
    return out


@dataclass
class SoundnessReport:
    model: Model
    rule: str
    instances: int = 0
    assignments: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self):
        head = (f"{self.rule} on {self.model.name}: {self.instances} instances, "
                f"{self.assignments} assignments, {len(self.failures)} failures")
        return "\n".join([head] + [f"  {f}" for f in self.failures[:5]])


def _sequent_holds(m, asg, s: Sequent):
    return m.leq(eval_struct(m, asg, s.ant), eval_formula(m, asg, s.succ))


def check_rule_soundness(m: Model, rule: str, strategy: str = "exhaustive", samples: int = 1000,
                         seed: int = 0, depth: int = 2, invert: bool = False,
                         budget: int = EXHAUSTIVE_BUDGET) -> SoundnessReport:
    """Check premises ⊨ conclusion pointwise on every sampled assignment.

    Random sampling would make premises mostly false, so each premise's
    succedent variable is first enlarged by the value of its antecedent
    (premises in order), which makes every premise true while leaving the
    conclusion a real test.
    """
    if m.tables is None:
        raise ModelError("soundness sweeps need a tabulated model")
    report = SoundnessReport(m, rule)
    rng = np.random.default_rng(seed)
    for inst in rule_instances(rule, depth, invert):
        report.instances += 1
        names = sorted(set().union(*(variables(natural(s.ant)) | variables(s.succ)
                                     for s in inst.premises + (inst.conclusion,))))
        if strategy == "exhaustive":
            if m.size ** len(names) > budget:
                raise ModelError(f"{m.size}^{len(names)} assignments exceed budget")
            asg = dict(zip(names, _grid(m.size, len(names))))
        elif strategy == "random":
            asg = {n: rng.integers(0, m.size, samples) for n in names}
            for p in inst.premises:
                if isinstance(p.succ, Var) and p.succ.name not in variables(natural(p.ant)):
                    asg[p.succ.name] = asg[p.succ.name] | eval_struct(m, asg, p.ant)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        count = len(next(iter(asg.values()))) if asg else 1
        report.assignments += count
        ok = np.ones(count, dtype=bool)
        for p in inst.premises:
            ok &= np.broadcast_to(_sequent_holds(m, asg, p), ok.shape)
        bad = ok & ~np.broadcast_to(_sequent_holds(m, asg, inst.conclusion), ok.shape)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            where = ", ".join(f"{k} ↦ {m.show(int(np.atleast_1d(v)[i]))}" for k, v in asg.items())
            prem = "; ".join(str(p) for p in inst.premises)
            report.failures.append(f"{prem}  /  {inst.conclusion}  at [{where}]")
    return report


# ---------------------------------------------------------- countermodels

def enumerate_monoids(n: int, dedup: bool | None = None):
    """All monoid tables on {0..n-1} with unit 0, tables in lexicographic order.

    Isomorphic copies are skipped for n <= 3 (or when ``dedup`` is set).
    """
    if dedup is None:
        dedup = n <= 3
    seen = set()
    free = [(i, j) for i in range(1, n) for j in range(1, n)]
    for vals in itertools.product(range(n), repeat=len(free)):
        table = [[j if i == 0 else (i if j == 0 else 0) for j in range(n)] for i in range(n)]
        for (i, j), v in zip(free, vals):
            table[i][j] = v
        if algebra.monoid_law_failure(table, 0):
            continue
        if dedup:
            key = min(_relabel(table, (0,) + p) for p in itertools.permutations(range(1, n)))
            if key in seen:
                continue
            seen.add(key)
        yield table


def _relabel(table, perm):
    n = len(table)
    inv = [0] * n
    for new, old in enumerate(perm):
        inv[old] = new
    return tuple(tuple(inv[table[perm[i]][perm[j]]] for j in range(n)) for i in range(n))


def enumerate_preorders(n: int):
    """Reflexive transitive relations, off-diagonal pairs read as a bitmask."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    for mask in range(1 << len(pairs)):
        rel = [[a == b for b in range(n)] for a in range(n)]
        for k, (a, b) in enumerate(pairs):
            if mask >> k & 1:
                rel[a][b] = True
        if algebra.preorder_failure(rel) is None:
            yield rel


def _preorder_name(table, rel) -> str:
    n = len(table)
    z2 = [list(r) for r in algebra.z2().table]
    if [list(r) for r in table] == z2:
        if all(all(r) for r in rel):
            return "Z2-total"
        if all(rel[a][b] == (a == b) for a in range(n) for b in range(n)):
            return "Z2-discrete"
    rows = ";".join("".join(str(v) for v in r) for r in table)
    order = ";".join("".join("1" if v else "0" for v in r) for r in rel)
    return f"monoid[{rows}] preorder[{order}]"


@dataclass
class Refutation:
    model: Model
    counterexample: Counterexample
    tried: int

    def __str__(self):
        return (f"counterexample in {self.model.name} after {self.tried} models\n"
                f"{self.counterexample.show(self.model)}\n{self.model.describe()}")


@dataclass
class SearchExhausted:
    tried: int

    def __bool__(self):
        return False

    def __str__(self):
        return f"no countermodel among {self.tried} models (this does not prove validity)"


def candidate_models(max_monoid_size: int = 3, max_L: int = 2, alphabets=("a", "ab")):
    for alpha in alphabets:
        for L in range(max_L + 1):
            if len(words_upto(alpha, L)) <= TABLE_LIMIT:
                yield build_truncated_model(alpha, L)
    for n in range(1, max_monoid_size + 1):
        for table in enumerate_monoids(n):
            monoid = algebra.FiniteMonoid([str(i) for i in range(n)] if n != 2 else ["1", "a"],
                                          table)
            for rel in enumerate_preorders(n):
                if algebra.check_rdp(monoid, rel) is not None:
                    continue
                yield build_preorder_model(monoid, preorder=rel, name=_preorder_name(table, rel))


def countermodel_search(e, max_monoid_size: int = 3, max_L: int = 2) -> Refutation | SearchExhausted:
    tried = 0
    for m in candidate_models(max_monoid_size, max_L):
        tried += 1
        try:
            cex = check_inequation(m, e)
        except ModelError:
            continue
        if cex is not None:
            return Refutation(m, cex, tried)
    return SearchExhausted(tried)
