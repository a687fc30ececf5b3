import pytest
from hypothesis import given, settings, strategies as st

from lmc.calculus import PRIMITIVE, check_derivation, init, is_cut_free, rule, top_right
from lmc.corpus import builtin_corpus, generated_mix_corpus
from lmc.models import bundled_models, check_inequation
from lmc.search import prove
from lmc.syntax import Atom, Comma, Join, One, Prod, Sequent, Var, parse_sequent, sharp, walk
from lmc.transform import (
    Rank, UnmatchedCase, cut_as_mix, eliminate_cut, eliminate_mix, mix_as_cuts, rank,
)

x, y, z = Var("x"), Var("y"), Var("z")


@pytest.fixture(scope="module")
def corpus():
    return builtin_corpus()


def test_rank_of_two_inits():
    assert rank(rule("mix", init(x), init(x), occ=((),))) == Rank(0, 1, 2)


def test_rank_with_decomposing_left():
    d1 = rule("joinR1", init(x), aux=y)
    assert rank(rule("mix", d1, init(Join(x, y)), occ=((),))) == Rank(1, 0, 3)


def test_rank_with_t_on_the_left():
    d1 = rule("T", rule("diaR", init(x)))
    assert rank(rule("cut", d1, init(d1.conclusion.succ), occ=((),))) == Rank(1, 1, 4)


def test_rank_rejects_other_nodes():
    with pytest.raises(ValueError):
        rank(init(x))


def test_cut_as_mix_relabels_only(corpus):
    d = rule("cut", corpus["ax2b"], corpus["ax2a"], occ=((),))
    m = cut_as_mix(d)
    assert m.rule == "mix" and m.app.occ == ((),) and m.premises == d.premises
    check_derivation(m)


def test_mix_as_cuts_two_occurrences():
    d2 = rule("prodR", init(x), init(x))
    m = rule("mix", init(x), d2, occ=((0,), (1,)))
    c = mix_as_cuts(m)
    assert c.rule == "cut" and c.premises[1].rule == "cut"
    assert c.height == m.height + 1 and c.conclusion == m.conclusion
    check_derivation(c)


def test_cut_free_unchanged(corpus):
    for d in corpus.values():
        assert cut_as_mix(d) is d
        assert mix_as_cuts(d) is d
        assert eliminate_mix(d) is d


def test_mix_of_identities_is_init():
    out = eliminate_mix(rule("mix", init(x), init(x), occ=((),)))
    assert out == init(x)


def test_top_right_premise_becomes_axiom():
    d2 = top_right(Comma(Atom(x), Atom(y)))
    d1 = rule("diaL", rule("bboxL", init(x)))
    out = eliminate_mix(rule("mix", d1, d2, occ=((0,),)))
    assert out.rule == "topR" and out.height == 1
    assert out.conclusion == parse_sequent("(dia box x o y) |- top")


def test_product_redex_splits_into_two_lower_mixes():
    d1 = rule("prodR", rule("diaR", init(x)), rule("diaR", init(y)))
    d2 = rule("prodL", rule("prodR", init(rule("diaR", init(x)).conclusion.succ),
                            init(rule("diaR", init(y)).conclusion.succ)))
    steps = []
    out = eliminate_mix(rule("mix", d1, d2, occ=((),)), trace=steps)
    assert out.conclusion == parse_sequent("(<x> o <y>) |- (dia x * dia y)")
    reduction = [s for s in steps if s.schema == "C:prodR/prodL"]
    assert [s.after.cp for s in reduction] == [1, 1]
    assert all(s.after < s.before for s in steps if s.after is not None)


def test_cut_on_join():
    d1 = rule("joinR1", init(x), aux=y)
    out = eliminate_cut(rule("cut", d1, init(Join(x, y)), occ=((),)))
    assert out == d1


def test_glue_ax1_into_contexts(corpus):
    ax1 = corpus["ax1"]
    dx = ax1.conclusion.succ
    base = [corpus["ax2b"],
            rule("prodR", init(y), corpus["ax2b"]),
            rule("capW1", corpus["ax2b"], aux=Comma(Atom(dx), Atom(y))),
            rule("diaR", rule("prodR", init(dx), init(dx))),
            rule("Four", rule("diaR", init(dx)))]
    for d2 in base:
        hits = [p for p, s in _atoms(d2.conclusion.ant) if s.f == dx]
        assert hits
        for p in hits:
            d = rule("cut", ax1, d2, occ=(p,))
            out = eliminate_cut(d)
            assert out.conclusion == d.conclusion and is_cut_free(out)
            check_derivation(out, allow=PRIMITIVE)


def _atoms(t):
    return [(p, s) for p, s in walk(t) if isinstance(s, Atom)]


def test_weakened_occurrence_is_re_weakened(corpus):
    d2 = rule("capW1", init(y), aux=Comma(Atom(x), Atom(x)))
    d = rule("mix", corpus["ax6"], d2, occ=((1, 0), (1, 1)))
    out = eliminate_mix(d)
    assert out.rule == "capW1" and out.height == 2
    assert out.conclusion == parse_sequent("(y n (dia box x o dia box x)) |- y")


def test_contraction_mixes_both_copies(corpus):
    d2 = rule("capC", rule("capW1", init(x), aux=Atom(x)))
    out = eliminate_mix(rule("mix", corpus["ax6"], d2, occ=((),)))
    assert out.conclusion == corpus["ax6"].conclusion
    check_derivation(out, allow=PRIMITIVE)


def test_unit_product_pair_is_unmatched():
    # x |- x*(1|y) holds in every model and follows by cut from x |- x*1,
    # but no cut-free derivation exists: nothing removes the e left by prodOne
    d1 = rule("prodOne", init(x))
    d2 = rule("prodL", rule("prodR", init(x), rule("joinR1", init(One()), aux=y)))
    d = rule("cut", d1, d2, occ=((),))
    assert d.conclusion == Sequent(Atom(x), Prod(x, Join(One(), y)))
    with pytest.raises(UnmatchedCase) as err:
        eliminate_cut(d)
    assert err.value.pair == ("prodOne", "prodL")
    assert not prove(d.conclusion)
    for m in bundled_models():
        assert check_inequation(m, sharp(d.conclusion), "random", 300) is None


def test_outputs_keep_validity_in_models():
    items = generated_mix_corpus(15, seed=7)
    models = [m for m in bundled_models() if m.tables is not None][:3]
    for it in items:
        out = eliminate_cut(it.derivation)
        for m in models:
            assert check_inequation(m, sharp(out.conclusion), "random", 200, seed=3) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_derivations_eliminate(seed):
    for it in generated_mix_corpus(8, seed):
        d = it.derivation
        check_derivation(d)
        steps = []
        out = eliminate_cut(d, trace=steps)
        assert out.conclusion == d.conclusion
        assert is_cut_free(out)
        check_derivation(out, allow=PRIMITIVE)
        assert all(s.after < s.before for s in steps if s.after is not None)
        assert eliminate_mix(out) is out


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_cut_mix_interchange_on_generated(seed):
    for it in generated_mix_corpus(6, seed):
        m = cut_as_mix(it.derivation)
        c = mix_as_cuts(m)
        for d in (m, c):
            check_derivation(d)
            assert d.conclusion == it.derivation.conclusion
        assert "mix" not in c.rules_used()
