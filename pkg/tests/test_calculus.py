import json

import pytest
from hypothesis import given, settings

from lmc.calculus import (
    PRIMITIVE, DerivationError, Derivation, Limits, RuleApp, RuleError, apply_rule,
    backward_instances, check_derivation, dumps, init, is_cut_free, is_valid, loads, rule,
)
from lmc.corpus import (
    CORPUS_CONCLUSIONS, MACROS, builtin_corpus, cap_w2, join_iso, meet_iso, meet_l1, meet_l2,
    prod_iso,
)
from lmc.models import bundled_models, check_inequation
from lmc.syntax import (
    Angle, Atom, Cap, Comma, Dia, Join, Meet, Prod, Sequent, Var, parse_sequent, render, sharp,
)
from strategies import small_formulas

x, y = Var("x"), Var("y")


@pytest.fixture(scope="module")
def corpus():
    return builtin_corpus()


def seq(text):
    return parse_sequent(text)


def test_dia_right():
    assert apply_rule(RuleApp("diaR"), [seq("x |- x")]) == seq("<x> |- dia x")


def test_k_at_root():
    prem = seq("(<x> o <y>) |- (dia x * dia y)")
    assert apply_rule(RuleApp("K"), [prem]) == seq("<(x o y)> |- (dia x * dia y)")


def test_box_left_at_root():
    assert apply_rule(RuleApp("bboxL"), [seq("x |- x")]) == seq("<box x> |- x")


def test_shape_mismatch_names_rule_and_position():
    with pytest.raises(RuleError, match=r"K at \[\]"):
        apply_rule(RuleApp("K"), [seq("(x o y) |- x")])
    with pytest.raises(RuleError, match="expected 2 premise"):
        apply_rule(RuleApp("prodR"), [seq("x |- x")])


def test_three_step_derivation_checks():
    d = rule("T", rule("diaR", init(x)))
    assert d.conclusion == seq("x |- dia x")
    check_derivation(d)


def test_tampered_conclusion_fails_at_root():
    d = rule("T", rule("diaR", init(x)))
    bad = Derivation(seq("y |- dia x"), d.app, d.premises)
    with pytest.raises(DerivationError) as err:
        check_derivation(bad)
    assert err.value.path == ()


def test_dia_box_derivation(corpus):
    d = rule("diaL", rule("bboxL", init(x)))
    check_derivation(d)
    assert d == corpus["ax6"]


def test_join_left_rejects_different_contexts():
    a = rule("capW1", init(x), aux=Atom(y))
    b = rule("capW1", init(y), aux=Atom(x))
    with pytest.raises(RuleError, match="contexts differ"):
        rule("joinL", rule("joinR1", a, aux=y), rule("joinR2", b, aux=x), ctx=(0,))


def test_heights():
    assert init(x).height == 1
    assert rule("T", rule("diaR", init(x))).height == 3


def test_backward_dia_left_unique():
    inst = backward_instances(seq("dia x |- dia x"), "diaL")
    assert inst == [(RuleApp("diaL"), [seq("<x> |- dia x")])]


def test_backward_t_focused_wraps_only_the_atom():
    s = seq("x |- dia x")
    focused = backward_instances(s, "T")
    assert [prems for _, prems in focused] == [[seq("<x> |- dia x")]]
    s2 = seq("(x o y) |- dia x")
    assert len(backward_instances(s2, "T", Limits(t_focus=False))) == 3


def test_backward_one_right_is_a_leaf():
    [(app, prems)] = backward_instances(seq("e |- 1"), "oneR")
    assert app.rule == "oneR" and prems == []


@pytest.mark.parametrize("text", ["((x o y) o <z>) |- dia (x * y)", "(<(x n x)> o e) |- box x",
                                  "((x | y) n <box z>) |- (x & y)", "(e o <<x>>) |- top"])
def test_backward_instances_invert_apply_rule(text):
    s = seq(text)
    for name in PRIMITIVE:
        for app, prems in backward_instances(s, name, Limits(t_focus=False)):
            assert apply_rule(app, prems) == s, (name, app)


def test_corpus_conclusions_and_validity(corpus):
    assert set(corpus) == set(CORPUS_CONCLUSIONS)
    for key, d in corpus.items():
        check_derivation(d, allow=PRIMITIVE)
        assert render(d.conclusion) == CORPUS_CONCLUSIONS[key]
        assert is_cut_free(d)


def test_corpus_sound_in_bundled_models(corpus):
    for m in bundled_models():
        for key, d in corpus.items():
            strategy = "exhaustive" if m.size ** 3 <= 4_000_000 else "random"
            assert check_inequation(m, sharp(d.conclusion), strategy, seed=1) is None, (m.name, key)


@settings(max_examples=40, deadline=None)
@given(small_formulas, small_formulas, small_formulas)
def test_macros_expand_to_primitive_steps(a, b, c):
    ds = [
        cap_w2(init(a), (), Atom(b)),
        meet_l1(init(a), (), b),
        meet_l2(init(a), (), b),
        prod_iso(init(a), init(b)),
        meet_iso(init(a), init(b)),
        join_iso(init(a), init(b)),
        cap_w2(rule("diaR", init(a)), (0,), Atom(c)),
    ]
    for d in ds:
        check_derivation(d, allow=PRIMITIVE)
    assert ds[0].conclusion == Sequent(Cap(Atom(b), Atom(a)), a)
    assert ds[3].conclusion == Sequent(Atom(Prod(a, b)), Prod(a, b))
    assert ds[4].conclusion == Sequent(Atom(Meet(a, b)), Meet(a, b))
    assert ds[5].conclusion == Sequent(Atom(Join(a, b)), Join(a, b))
    assert ds[6].conclusion == Sequent(Angle(Cap(Atom(c), Atom(a))), Dia(a))
    assert set(MACROS) == {"capW2", "meetL1", "meetL2", "prodIso", "meetIso", "joinIso"}


def test_file_round_trip(corpus):
    for d in corpus.values():
        assert loads(dumps(d)) == d


def test_tampered_file_is_rejected(corpus):
    rec = json.loads(dumps(corpus["ax5"]))
    rec["premises"][0]["ctx"] = []
    assert not is_valid(loads(json.dumps(rec)))


def test_cut_needs_matching_occurrence(corpus):
    with pytest.raises(RuleError, match="expected dia x"):
        rule("cut", corpus["ax1"], corpus["ax1"], occ=((),))
    d = rule("cut", corpus["ax1"], rule("diaL", rule("diaR", init(x))), occ=((),))
    assert d.conclusion == seq("x |- dia x")
    assert not is_cut_free(d)


def test_mix_with_no_occurrences_keeps_right_premise(corpus):
    d = rule("mix", corpus["ax1"], init(y), occ=())
    assert d.conclusion == init(y).conclusion
    check_derivation(d)
    with pytest.raises(DerivationError):
        check_derivation(d, allow=PRIMITIVE)


def test_comma_positions_are_explicit():
    d = rule("capE", rule("capW1", init(x), aux=Comma(Atom(y), Atom(y))))
    assert d.conclusion == seq("((y o y) n x) |- x")
