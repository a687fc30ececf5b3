"""Finite monoids: divisibility, the Riesz decomposition property, cancellation
and conicity checks, and the integer-endomorphism witnesses used to refute
◇(x·y) ≤ ◇x ∨ (x·◇y)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class MonoidError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteMonoid:
    """Elements are indices 0..n-1; ``names`` are only for display."""
    names: tuple
    table: tuple          # table[a][b] = a·b
    unit: int = 0

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "table", tuple(tuple(int(v) for v in row) for row in self.table))
        problem = monoid_law_failure(self.table, self.unit)
        if problem:
            raise MonoidError(problem)

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def elements(self) -> range:
        return range(self.size)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def index(self, name) -> int:
        return self.names.index(name)


def monoid_law_failure(table, unit: int) -> str | None:
    """Describe the first violated monoid law, or None."""
    n = len(table)
    if any(len(row) != n for row in table):
        return "table is not square"
    if not 0 <= unit < n:
        return f"unit {unit} out of range"
    for a in range(n):
        if not all(0 <= v < n for v in table[a]):
            return f"row {a} has entries outside the carrier"
        if table[unit][a] != a or table[a][unit] != a:
            return f"unit law fails at {a}"
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            return f"associativity fails at ({a}, {b}, {c})"
    return None


def cyclic_group(n: int) -> FiniteMonoid:
    names = ["1"] + [f"g{i}" for i in range(1, n)] if n > 2 else ["1", "a"][:n]
    return FiniteMonoid(names, [[(i + j) % n for j in range(n)] for i in range(n)])


def z2() -> FiniteMonoid:
    return cyclic_group(2)


def semilattice2() -> FiniteMonoid:
    """{0, a} under join; 0 is the unit and a absorbs."""
    return FiniteMonoid(["0", "a"], [[0, 1], [1, 1]])


def trivial_monoid() -> FiniteMonoid:
    return FiniteMonoid(["1"], [[0]])


def truncated_free_monoid(alphabet: str, max_len: int) -> FiniteMonoid:
    """Words of length <= max_len plus an absorbing overflow element "#"."""
    words = [""]
    for n in range(1, max_len + 1):
        words += ["".join(p) for p in itertools.product(alphabet, repeat=n)]
    idx = {w: i for i, w in enumerate(words)}
    over = len(words)

    def mul(a, b):
        if a == over or b == over:
            return over
        w = words[a] + words[b]
        return idx.get(w, over)

    table = [[mul(a, b) for b in range(over + 1)] for a in range(over + 1)]
    return FiniteMonoid(words + ["#"], table)


# ----------------------------------------------------------- divisibility

def divides(m: FiniteMonoid, side: str, a: int, b: int) -> bool:
    """a |_l b iff b = a·c for some c; a |_r b iff b = c·a."""
    if side == "l":
        return any(m.mul(a, c) == b for c in m.elements)
    if side == "r":
        return any(m.mul(c, a) == b for c in m.elements)
    raise ValueError(f"side must be 'l' or 'r', not {side!r}")


def divisibility_preorder(m: FiniteMonoid, side: str = "l") -> list[list[bool]]:
    return [[divides(m, side, a, b) for b in m.elements] for a in m.elements]


def preorder_failure(rel) -> str | None:
    n = len(rel)
    for a in range(n):
        if not rel[a][a]:
            return f"not reflexive at {a}"
    for a, b, c in itertools.product(range(n), repeat=3):
        if rel[a][b] and rel[b][c] and not rel[a][c]:
            return f"not transitive at ({a}, {b}, {c})"
    return None


def check_rdp(m: FiniteMonoid, rel) -> tuple | None:
    """First (a1, a2, b) with b ≼ a1·a2 but no b = b1·b2 with bi ≼ ai."""
    els = m.elements
    for a1, a2, b in itertools.product(els, repeat=3):
        if not rel[b][m.mul(a1, a2)]:
            continue
        if not any(m.mul(b1, b2) == b and rel[b1][a1] and rel[b2][a2]
                   for b1 in els for b2 in els):
            return a1, a2, b
    return None


def cancellative_conical(m: FiniteMonoid) -> tuple[bool, bool]:
    els = m.elements
    canc = all(b == c for a, b, c in itertools.product(els, repeat=3)
               if m.mul(a, b) == m.mul(a, c) or m.mul(b, a) == m.mul(c, a))
    conical = all(a == m.unit and b == m.unit for a in els for b in els
                  if m.mul(a, b) == m.unit)
    return canc, conical


# ----------------------------------------------------------- words (RDP*)

def rdp_splits(u: str, v: str, w: str) -> list[tuple[str, str]]:
    """Every (u', v') with u' a prefix of u, v' a prefix of v, w = u'v'."""
    return [(w[:k], w[k:]) for k in range(len(w) + 1)
            if u.startswith(w[:k]) and v.startswith(w[k:])]


def rdp_decompose(u: str, v: str, w: str, all_splits: bool = False):
    """Split a prefix w of uv as u'v'; the maximal u' is canonical.

    Returns None when w is not a prefix of uv.
    """
    if not (u + v).startswith(w):
        return [] if all_splits else None
    if all_splits:
        return rdp_splits(u, v, w)
    k = min(len(u), len(w))
    return w[:k], w[k:]


# ------------------------------------------------- integer endomorphisms

@dataclass(frozen=True)
class IntFunction:
    tag: str
    fn: object

    def __call__(self, n: int) -> int:
        return self.fn(n)

    def after(self, other: "IntFunction") -> "IntFunction":
        return IntFunction(f"{self.tag}∘{other.tag}", lambda n: self.fn(other.fn(n)))

    def image(self, interval) -> set[int]:
        return {self.fn(n) for n in interval}


F = IntFunction("f", lambda n: 1 if n <= 0 else 2)
G = IntFunction("g", lambda n: -1)
K = IntFunction("k", lambda n: 0 if n <= 0 else 1)
K_PRIME = IntFunction("k'", lambda n: 2)


@dataclass
class EndzReport:
    interval: tuple[int, int]
    fg_constant_one: bool
    kk_constant_one: bool
    image_f: set
    image_k: set

    @property
    def ranges_disjoint_from_each_other(self) -> bool:
        # k∘h takes values in image(k), f takes values in image(f); f's value 2
        # is outside image(k), so no h gives k∘h = f.  Symmetrically f∘m only
        # takes values in {1,2} and so never equals k, which takes 0.
        return not self.image_f <= self.image_k and not self.image_k <= self.image_f

    @property
    def ok(self) -> bool:
        return (self.fg_constant_one and self.kk_constant_one and self.image_f == {1, 2}
                and self.image_k == {0, 1} and self.ranges_disjoint_from_each_other)

    def __str__(self):
        lo, hi = self.interval
        lines = [f"sample interval [{lo}, {hi}] (sample-level evidence only)",
                 f"f∘g ≡ 1: {self.fg_constant_one}",
                 f"k∘k' ≡ 1: {self.kk_constant_one}",
                 f"image(f) = {sorted(self.image_f)}",
                 f"image(k) = {sorted(self.image_k)}",
                 f"k |_l f∘g, k does not left-divide f, k ≠ f∘m: "
                 f"{self.ranges_disjoint_from_each_other}"]
        return "\n".join(lines)


def endz_witness_check(lo: int = -100, hi: int = 100) -> EndzReport:
    if lo > -100 or hi < 100:
        raise ValueError("interval must contain [-100, 100]")
    sample = range(lo, hi + 1)
    fg, kk = F.after(G), K.after(K_PRIME)
    return EndzReport((lo, hi), fg.image(sample) == {1}, kk.image(sample) == {1},
                      F.image(sample), K.image(sample))
