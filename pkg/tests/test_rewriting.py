import random

import pytest
from hypothesis import given, settings

from autostack.automata import dfa as fa
from autostack.catalog import SHIPPED, load_entry
from autostack.core import Alphabet, words_up_to
from autostack.rewriting import (
    BudgetExhausted,
    PrefixRewritingSystem,
    RewritingError,
    StringRewritingSystem,
    certify_processed,
    check_local_confluence,
    lift_srs,
    process,
    prl,
)

import brute
from brute import word_strategy

F2 = Alphabet.free(["a", "b"])
FREE_RULES = [(("a", "A"), ()), (("A", "a"), ()), (("b", "B"), ()), (("B", "b"), ())]


def z2():
    return load_entry("z2")


def junk_system():
    """The rank-two abelian rules plus (bBa -> a), whose lhs has a reducible proper prefix."""
    e = z2()
    base = lift_srs(e.srs)
    junk = (fa.singleton(F2.letters, ()), ("b", "B", "a"), ("a",))
    return PrefixRewritingSystem(F2, list(base.families) + [junk])


def duplicate_system():
    """Two rules with lhs ba: (ba -> ab) and (ba -> aBb)."""
    e = z2()
    base = lift_srs(e.srs)
    extra = (fa.universal(F2.letters), ("b", "a"), ("a", "B", "b"))
    return PrefixRewritingSystem(F2, list(base.families) + [extra])


# -- redex choice and reduction --------------------------------------------------


def test_find_redex_examples():
    free = PrefixRewritingSystem.from_rules(F2, FREE_RULES)
    assert free.find_redex(()) is None
    r = PrefixRewritingSystem.from_rules(F2, [(("b", "B"), ()), (("b", "a"), ("a", "b"))])
    assert r.find_redex(("b", "B", "a", "b")) == (("b", "B"), ())
    assert lift_srs(z2().srs).find_redex(("b", "a")) == (("b", "a"), ("a", "b"))


def test_reduce_examples():
    r = lift_srs(z2().srs)
    t = r.reduce(("b", "a"))
    assert t.final == ("a", "b") and len(t) == 1
    t = r.reduce(("a", "b"))
    assert len(t) == 0 and t.final == ("a", "b")
    assert t.words() == [("a", "b")]


def test_step_budget_is_reported_with_trace():
    al = Alphabet.from_pairs(["a", "b"])
    loop = PrefixRewritingSystem.from_rules(al, [(("a",), ("b",)), (("b",), ("a",))])
    with pytest.raises(BudgetExhausted) as info:
        loop.reduce(("a",), step_limit=5)
    assert len(info.value.trace.steps) == 5


def test_irreducible_examples():
    free = PrefixRewritingSystem.from_rules(F2, FREE_RULES)
    irr = lift_srs(StringRewritingSystem(F2, FREE_RULES)).irreducible
    assert not irr.accepts_word(("a", "A")) and irr.accepts_word(("a", "b"))
    assert free.irreducible.accepts_word(("b", "a", "A"))  # rules only at the front
    one = Alphabet.from_pairs(["a"])
    assert brute.language(PrefixRewritingSystem.from_rules(one, [(("a",), ())]).irreducible, ("a",), 4) == {()}


def test_irreducible_matches_brute_force_on_z2():
    r = lift_srs(z2().srs)
    irr = r.irreducible
    for w in words_up_to(F2.letters, 7):
        assert irr.accepts_word(w) == (r.find_redex(w) is None)
        assert irr.accepts_word(w) == z2().srs.is_irreducible(w)


def test_boundedness_examples():
    assert PrefixRewritingSystem.from_rules(F2, [(("a", "A"), ())]).bound == 2
    al = Alphabet.from_pairs(["a", "b", "c"])
    r = PrefixRewritingSystem.from_rules(al, [(("c", "b", "a"), ("c", "a", "b"))])
    assert r.bound == 2
    assert r.families[0].prefixes.accepts_word(("c",))
    assert lift_srs(z2().srs).bound == 2


def test_declared_bound_below_rules_is_rejected():
    with pytest.raises(RewritingError):
        PrefixRewritingSystem.from_rules(F2, [(("a", "A"), ())], bound=1)


# -- confluence ------------------------------------------------------------------------


def test_confluence_examples():
    assert check_local_confluence(StringRewritingSystem(F2, FREE_RULES)).ok
    assert check_local_confluence(load_entry("s3").srs).ok
    al = Alphabet.from_pairs(["a", "b"])
    report = check_local_confluence(StringRewritingSystem(al, [(("a", "b"), ("b", "a"))]))
    assert not report.ok
    with pytest.raises(RewritingError):
        report.require()


def test_non_joinable_pair_is_reported():
    al = Alphabet.from_pairs(["a", "b", "c"])
    s = StringRewritingSystem(al, [(("c", "b"), ("a",)), (("b", "a"), ("b",))])
    report = check_local_confluence(s)
    assert report.failures
    word, left, right, ln, rn = report.failures[0]
    assert ln != rn


# -- lifting string systems ---------------------------------------------------------------


def test_lift_single_rule():
    al = Alphabet.from_pairs(["a", "b"])
    r = lift_srs(StringRewritingSystem(al, [(("a", "a"), ())]))
    t = r.reduce(("b", "a", "a"))
    assert t.final == ("b",) and len(t) == 1
    assert t.steps[0].lhs == ("b", "a", "a")


@pytest.mark.parametrize("name", SHIPPED)
def test_lift_matches_string_rewriting(name):
    e = load_entry(name)
    r = e.prefix_system
    letters = e.alphabet.letters
    for w in words_up_to(letters, 6 if len(letters) > 2 else 7):
        assert r.is_irreducible(w) == e.srs.is_irreducible(w)
    rng = random.Random(7)
    for _ in range(200):
        w = tuple(rng.choice(letters) for _ in range(rng.randint(0, 10)))
        assert r.normal_form(w) == brute.rewrite_anywhere(e.srs.rules, w)


@pytest.mark.parametrize("name", SHIPPED)
def test_reduction_steps_preserve_the_group_element(name):
    e = load_entry(name)
    rng = random.Random(11)
    for _ in range(500):
        w = tuple(rng.choice(e.alphabet.letters) for _ in range(rng.randint(0, 12)))
        for step in e.prefix_system.reduce(w).steps:
            assert e.oracle.equal(step.before, step.after)


@pytest.mark.parametrize("name", SHIPPED)
def test_equal_elements_share_normal_forms(name):
    e = load_entry(name)
    seen = {}
    for w in words_up_to(e.alphabet.letters, 6):
        g = e.oracle.eval(w)
        nf = e.srs.reduce(w)
        assert seen.setdefault(g, nf) == nf


@pytest.mark.parametrize("name", SHIPPED)
def test_irreducible_words_are_prefix_closed(name):
    e = load_entry(name)
    irr = e.prefix_system.irreducible
    assert fa.is_prefix_closed(irr)
    for w in fa.enumerate_words(irr, 8):
        assert all(irr.accepts_word(w[:i]) for i in range(len(w)))


# -- processing ----------------------------------------------------------------------------


def test_free_group_processing_keeps_irreducibles():
    r = lift_srs(StringRewritingSystem(F2, FREE_RULES))
    q = process(r)
    assert fa.equivalent(q.irreducible, r.irreducible)
    assert {f.lhs for f in q.families} == {f.lhs for f in r.families}


def test_junk_rule_is_dropped():
    r = junk_system()
    assert r.find_redex(("b", "B", "a")) is not None
    q = process(r, oracle=z2().oracle)
    rel = q.relation()
    assert not rel.contains([("b", "B", "a"), ("a",)])
    assert all(u != ("b", "B", "a") for u, _ in q.rules(3))
    assert fa.equivalent(q.irreducible, r.irreducible)


def test_duplicate_lhs_keeps_least_suffix_pair():
    r = duplicate_system()
    q = process(r, oracle=z2().oracle)
    rules = dict(q.rules(5))
    for u, v in q.rules(5):
        if u[-2:] == ("b", "a"):
            assert v == u[:-2] + ("a", "b")
    assert rules[("b", "a")] == ("a", "b")
    assert certify_processed(q).ok


def test_missing_inverses_get_rules():
    # the monoid {a} with a^3 = 1: A is not a base letter
    al = Alphabet.free(["a"])
    r = PrefixRewritingSystem(al, [(fa.universal(al.letters), ("a", "a", "a"), ())], base=["a"])

    class Cyclic3:
        def eval(self, w):
            return sum(1 if x == "a" else -1 for x in w) % 3

        def identity(self):
            return 0

        def multiply(self, g, h):
            return (g + h) % 3

    q = process(r, oracle=Cyclic3())
    assert q.normal_form(("A",)) == ("a", "a")
    assert q.normal_form(("a", "A")) == ()
    assert q.bound >= 2
    for w in words_up_to(al.letters, 6):
        assert Cyclic3().eval(q.normal_form(w)) == Cyclic3().eval(w)
    with pytest.raises(RewritingError):
        process(r)


@pytest.mark.parametrize("name", SHIPPED)
def test_processed_catalog_systems(name):
    e = load_entry(name)
    q = e.processed
    assert fa.equivalent(q.irreducible, e.prefix_system.irreducible)
    cert = certify_processed(q, 8, e.oracle)
    assert cert.ok, cert.witnesses[:3]


def test_prl_examples():
    q = z2().processed
    assert prl(q, ("a", "b")) == 0
    t = q.reduce(("b", "a", "B", "a"))
    for i, w in enumerate(t.words()):
        assert prl(q, w) == len(t) - i


@settings(max_examples=40)
@given(word_strategy(F2.letters, 10))
def test_processed_normal_forms_agree_with_string_rewriting(w):
    e = z2()
    assert e.processed.normal_form(w) == e.srs.reduce(w)
