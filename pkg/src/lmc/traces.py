"""Finite traces of labelled transition systems and their f-properties.

A trace is a tuple of (state, action) pairs.  Properties are explicit finite
sets of traces read against a bounded universe Σ^≤L, so liveness can only be
checked in its bounded form: ◇P covers the whole universe.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

MAX_TRACES = 2_000_000


@dataclass(frozen=True)
class LTS:
    states: tuple
    actions: tuple
    transitions: frozenset        # {(s, a, s')}
    initial: str

    def __post_init__(self):
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        for s, a, t in self.transitions:
            if s not in self.states or t not in self.states or a not in self.actions:
                raise ValueError(f"transition {(s, a, t)} outside S × Act × S")

    @property
    def alphabet(self) -> tuple:
        """Σ_T = S × Act in a fixed order."""
        return tuple(itertools.product(self.states, self.actions))

    def step(self, s, a) -> list:
        return [t for (p, b, t) in sorted(self.transitions) if p == s and b == a]

    def enabled(self, s, a) -> bool:
        return any(p == s and b == a for (p, b, _) in self.transitions)


def running_example() -> LTS:
    """The request-response protocol: connect, send, then ack or nack."""
    trans = [("s0", "conn", "s1"), ("s1", "snd", "s2"), ("s2", "ack", "s4"),
             ("s2", "nack", "s3"), ("s3", "end", "s0"), ("s4", "end", "s0"),
             ("s4", "req", "s1")]
    return LTS(("s0", "s1", "s2", "s3", "s4"), ("conn", "snd", "ack", "nack", "end", "req"),
               frozenset(trans), "s0")


def is_valid(lts: LTS, w, strict: bool = False) -> bool:
    """Every adjacent pair follows a transition.

    The literal reading makes the empty and one-pair traces valid whatever
    they contain.  ``strict`` also requires the last action to be enabled at
    its state.
    """
    ok = all((w[i][0], w[i][1], w[i + 1][0]) in lts.transitions for i in range(len(w) - 1))
    if ok and strict and w:
        ok = lts.enabled(*w[-1])
    return ok


def valid_traces(lts: LTS, max_len: int, rooted: bool = False, strict: bool = False) -> frozenset:
    """All valid traces of length <= max_len, built by extension."""
    alphabet = lts.alphabet
    total = sum(len(alphabet) ** k for k in range(max_len + 1))
    out = {()}
    # a trace is valid iff its one-shorter prefix is valid (literal reading)
    # and the new adjacent pair follows a transition
    layer = [(p,) for p in alphabet if not rooted or p[0] == lts.initial] if max_len >= 1 else []
    while layer:
        if len(out) + len(layer) > MAX_TRACES:
            raise ValueError(f"more than {MAX_TRACES} traces (universe {total})")
        out.update(layer)
        if len(layer[0]) == max_len:
            break
        nxt = []
        for w in layer:
            s, a = w[-1]
            for t in lts.step(s, a):
                nxt.extend(w + ((t, b),) for b in lts.actions)
        layer = nxt
    if strict:
        out = {w for w in out if not w or lts.enabled(*w[-1])}
    return frozenset(out)


def count_valid_paths(lts: LTS, length: int, rooted: bool = True, strict: bool = False) -> int:
    """Number of valid traces of exactly this length, by dynamic programming
    over the state of the last pair; an independent check of valid_traces."""
    if length == 0:
        return 1
    ways = {s: (1 if not rooted or s == lts.initial else 0) for s in lts.states}
    for _ in range(length - 1):
        nxt = dict.fromkeys(lts.states, 0)
        for s, a, t in lts.transitions:
            nxt[t] += ways[s]
        ways = nxt
    if strict:
        return sum(ways[s] * sum(lts.enabled(s, a) for a in lts.actions) for s in lts.states)
    return sum(ways.values()) * len(lts.actions)


def trace_to_path(lts: LTS, w) -> list:
    """The transitions a valid trace walks through (its final action is not part of the path)."""
    if not is_valid(lts, w):
        raise ValueError("not a valid trace")
    return [(w[i][0], w[i][1], w[i + 1][0]) for i in range(len(w) - 1)]


def path_to_traces(lts: LTS, path) -> list:
    """Every trace whose path is ``path``: one per choice of final action."""
    if not path:
        raise ValueError("empty path")
    body = tuple((s, a) for s, a, _ in path)
    return [body + ((path[-1][2], b),) for b in lts.actions]


# ---------------------------------------------------------------- policies

def policy_p1(w) -> bool:
    """Each ack/nack that has a successor pair comes after some snd."""
    acts = [a for _, a in w]
    return all("snd" in acts[:i - 1] for i in range(1, len(w)) if acts[i - 1] in ("ack", "nack"))


def policy_p2(w) -> bool:
    """Each snd that has a successor pair is eventually answered by ack/nack."""
    acts = [a for _, a in w]
    return all(any(b in ("ack", "nack") for b in acts[i:])
               for i in range(1, len(w)) if acts[i - 1] == "snd")


# -------------------------------------------------------------- properties

@dataclass(frozen=True)
class Universe:
    """Σ^≤L.  Words are strings when every symbol is a one-character string,
    tuples of symbols otherwise."""
    alphabet: tuple
    max_len: int
    _as_str: bool = field(init=False, repr=False, compare=False, default=False)
    _symbols: frozenset = field(init=False, repr=False, compare=False, default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "_symbols", frozenset(self.alphabet))
        object.__setattr__(self, "_as_str", all(isinstance(a, str) and len(a) == 1
                                                for a in self.alphabet))

    def words(self):
        for n in range(self.max_len + 1):
            for p in itertools.product(self.alphabet, repeat=n):
                yield "".join(p) if self._as_str else p

    def __len__(self):
        k = len(self.alphabet)
        return sum(k ** n for n in range(self.max_len + 1))

    def __contains__(self, w):
        return len(w) <= self.max_len and self._symbols.issuperset(w)


def prefixes(w):
    return [w[:k] for k in range(len(w) + 1)]


def prefix_closure(p) -> frozenset:
    return frozenset(v for w in p for v in prefixes(w))


def box_interior(p, universe: Universe | None = None) -> frozenset:
    """Members of the universe all of whose prefixes lie in p.

    Such words are themselves in p, so it suffices to walk p by length: a
    word qualifies iff it is in p and its one-shorter prefix qualifies.
    """
    ok = set()
    for w in sorted(p, key=len):
        if universe is not None and w not in universe:
            continue
        if not w or w[:-1] in ok:
            ok.add(w)
    return frozenset(ok)


@dataclass(frozen=True)
class Classification:
    safety: bool
    liveness_bounded: bool

    def __str__(self):
        return f"safety={self.safety} liveness(bounded)={self.liveness_bounded}"


def classify(p, universe: Universe) -> Classification:
    p = frozenset(p)
    if not all(w in universe for w in p):
        raise ValueError("property is not inside the universe")
    closed = prefix_closure(p)
    return Classification(closed == p, len(closed) == len(universe))


def is_safety(p) -> bool:
    return prefix_closure(p) == frozenset(p)


def safety_via_box(p, universe: Universe) -> bool:
    return box_interior(p, universe) == frozenset(p)


def random_subsets(universe: Universe, count: int, seed: int = 0):
    """Half arbitrary subsets, half prefix closures of them.

    Densities are log-uniform between 1e-4 and 1 so that both sparse and
    nearly full sets occur.
    """
    rng = np.random.default_rng(seed)
    words = list(universe.words())
    for i in range(count):
        density = 10.0 ** rng.uniform(-4, 0)
        s = frozenset(words[j] for j in np.flatnonzero(rng.random(len(words)) < density))
        yield prefix_closure(s) if i % 2 else s


# -------------------------------------------------------------------- files

def parse_lts(text: str) -> LTS:
    """Lines ``state <s>``, ``init <s>``, ``trans <s> <a> <s'>`` (and optional
    ``action <a>``); ``#`` starts a comment."""
    states, actions, trans, init = [], [], [], None
    for n, line in enumerate(text.splitlines(), 1):
        toks = line.split("#", 1)[0].split()
        if not toks:
            continue
        kind, args = toks[0], toks[1:]
        if kind == "state" and len(args) == 1:
            states.append(args[0])
        elif kind == "action" and len(args) == 1:
            actions.append(args[0])
        elif kind == "init" and len(args) == 1:
            init = args[0]
        elif kind == "trans" and len(args) == 3:
            trans.append(tuple(args))
            for s in (args[0], args[2]):
                if s not in states:
                    states.append(s)
            if args[1] not in actions:
                actions.append(args[1])
        else:
            raise ValueError(f"line {n}: cannot read {line.strip()!r}")
    if init is None:
        raise ValueError("no init line")
    return LTS(tuple(states), tuple(actions), frozenset(trans), init)


_PAIR = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def parse_trace(text: str) -> tuple:
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ()
    pairs = _PAIR.findall(text)
    if _PAIR.sub("", text).replace(",", "").strip():
        raise ValueError(f"cannot read trace {text!r}")
    return tuple(pairs)


def render_trace(w) -> str:
    return ",".join(f"({s},{a})" for s, a in w) if w else "ε"


def parse_property(text: str) -> frozenset:
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    return frozenset(parse_trace(ln) for ln in lines if ln.strip())
