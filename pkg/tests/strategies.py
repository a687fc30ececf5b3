"""Hypothesis strategies for formulas and structural terms."""

from hypothesis import strategies as st

from lmc.syntax import (
    Angle, Atom, BBox, Bot, Cap, Comma, Dia, Eps, Join, Meet, One, Prod, Top, Var,
)

idents = st.from_regex(r"[a-z][a-z0-9_]{0,3}", fullmatch=True).filter(
    lambda s: s not in {"o", "n", "e", "dia", "box", "bot", "top"})

leaf_formulas = st.one_of(idents.map(Var), st.just(One()), st.just(Bot()), st.just(Top()))

formulas = st.recursive(
    leaf_formulas,
    lambda f: st.one_of(
        st.builds(Prod, f, f), st.builds(Meet, f, f), st.builds(Join, f, f),
        st.builds(Dia, f), st.builds(BBox, f)),
    max_leaves=8)

structs = st.recursive(
    st.one_of(formulas.map(Atom), st.just(Eps())),
    lambda s: st.one_of(st.builds(Comma, s, s), st.builds(Cap, s, s), st.builds(Angle, s)),
    max_leaves=8)

small_vars = st.sampled_from([Var("x"), Var("y"), Var("z")])

small_formulas = st.recursive(
    st.one_of(small_vars, st.just(One())),
    lambda f: st.one_of(
        st.builds(Prod, f, f), st.builds(Meet, f, f), st.builds(Join, f, f),
        st.builds(Dia, f), st.builds(BBox, f)),
    max_leaves=4)
