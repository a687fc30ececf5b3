"""Bounded backward proof search for cut-free LMC.

Iterative deepening on derivation height.  Invertible rules (the left
logical rules and meetR) are applied eagerly without backtracking; the
remaining rules are tried in a fixed order, with T and capC last and
bounded per branch.  No branch revisits a sequent on its own ancestor path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .calculus import Derivation, Limits, apply_rule, all_redexes
from .syntax import Equation, Inequation, Sequent, flat

INVERTIBLE = ("prodL", "meetL", "diaL", "oneL", "joinL", "meetR")
ORDERED = ("prodR", "joinR1", "joinR2", "diaR", "bboxR", "prodOne", "oneProd",
           "bboxL", "capW1", "capE", "K", "Four", "oEps", "epsO",
           "oA_l2r", "oA_r2l", "capA_l2r", "capA_r2l")
ORDER = tuple((n, 0, 0) for n in ORDERED) + (("T", 1, 0), ("capC", 0, 1))
AXIOM_ORDER = ("init", "oneR", "topR", "botL")


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 10
    max_capC_per_branch: int = 1
    max_T_per_branch: int = 3
    t_focus: bool = True
    max_nodes: int = 200_000


@dataclass
class Exhausted:
    """Search gave up; this is not a proof of non-derivability."""
    nodes: int
    depth_reached: int
    reason: str

    def __bool__(self):
        return False

    def __str__(self):
        return f"exhausted ({self.reason}): {self.nodes} nodes, depth {self.depth_reached}"


class _OutOfNodes(Exception):
    pass


@dataclass
class _State:
    budget: SearchBudget
    nodes: int = 0
    failed: dict = field(default_factory=dict)
    max_path: int = 0


def _leaf(s: Sequent, redexes):
    for name in AXIOM_ORDER:
        if name in redexes:
            return Derivation(s, redexes[name][0].app)
    return None


def _search(st: _State, s: Sequent, depth: int, t_used: int, c_used: int, path: frozenset):
    """Return (derivation or None, whether a loop check pruned anything)."""
    st.nodes += 1
    if st.nodes > st.budget.max_nodes:
        raise _OutOfNodes
    st.max_path = max(st.max_path, len(path) + 1)
    limits = Limits(t_focus=st.budget.t_focus,
                    allow_T=t_used < st.budget.max_T_per_branch,
                    allow_capC=c_used < st.budget.max_capC_per_branch)
    redexes = all_redexes(s, limits)
    leaf = _leaf(s, redexes)
    if leaf is not None:
        return leaf, False
    if depth <= 1:
        return None, False
    key = (s, t_used, c_used)
    if st.failed.get(key, 0) >= depth:
        return None, False
    path = path | {s}
    pruned = False

    def attempt(redex, t, c):
        nonlocal pruned
        app, premises = redex.app, redex.build(s)
        if any(p in path for p in premises):
            pruned = True
            return None
        subs = []
        for p in premises:
            d, loop = _search(st, p, depth - 1, t, c, path)
            pruned = pruned or loop
            if d is None:
                return None
            subs.append(d)
        return Derivation(apply_rule(app, premises), app, tuple(subs))

    for name in INVERTIBLE:
        if name in redexes:
            d = attempt(redexes[name][0], t_used, c_used)
            if d is None and not pruned:
                st.failed[key] = max(depth, st.failed.get(key, 0))
            return d, pruned

    for name, t, c in ORDER:
        for redex in redexes.get(name, ()):
            d = attempt(redex, t_used + t, c_used + c)
            if d is not None:
                return d, pruned
    if not pruned:
        st.failed[key] = max(depth, st.failed.get(key, 0))
    return None, pruned


def prove(s: Sequent, budget: SearchBudget | None = None) -> Derivation | Exhausted:
    """Search for a cut-free derivation of ``s`` within ``budget``."""
    budget = budget or SearchBudget()
    st = _State(budget)
    depth = 0
    try:
        for depth in range(1, budget.max_depth + 1):
            d, _ = _search(st, s, depth, 0, 0, frozenset())
            if d is not None:
                return d
    except _OutOfNodes:
        return Exhausted(st.nodes - 1, depth, "node budget")
    return Exhausted(st.nodes, depth, "depth bound")


def prove_equation(e: Equation | Inequation, budget: SearchBudget | None = None) -> dict:
    """Run prove on each sequent of flat(e); keys are the sequents."""
    return {s: prove(s, budget) for s in flat(e)}
