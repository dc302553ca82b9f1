from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from autostack.automata import dfa as fa
from autostack.automata.asynchronous import (
    AsyncAutomaton,
    async_project_first,
    async_run,
    k_automaton,
    minimize_async,
    second_coordinates,
    shuffle_blocks,
    sync_to_async,
)
from autostack.automata.dfa import AutomatonError, Dfa
from autostack.automata.padded import (
    SyncRelation,
    cartesian_product,
    diagonal,
    diagonal_times,
    pad_tuple,
    padded_symbols,
    relation_from_tuples,
    unpad,
    well_formed,
)
from autostack.core import END, PAD

from brute import dfas, language, word_strategy, words

AB = ("a", "b")


def star_of(word, letters=AB):
    return fa.star(fa.singleton(letters, word))


def contains_aa():
    return fa.from_partial(AB, {(0, "a"): 1, (0, "b"): 0, (1, "a"): 2, (1, "b"): 0, (2, "a"): 2, (2, "b"): 2}, 0, [2])


# -- DFA basics -----------------------------------------------------------------


def test_union_of_singletons():
    u = fa.union(fa.singleton(AB, ("a",)), fa.singleton(AB, ("b",)))
    assert language(u, AB, 4) == {("a",), ("b",)}


def test_double_complement_of_ab_star():
    lang = star_of(("a", "b"))
    assert fa.equivalent(fa.complement(fa.complement(lang)), lang)


def test_intersection_with_complement_against_enumeration():
    d = fa.intersection(fa.universal(AB), fa.complement(contains_aa()))
    expected = {w for w in words(AB, 7) if "aa" not in "".join(w)}
    assert language(d, AB, 7) == expected


def test_partial_transition_table_is_rejected():
    with pytest.raises(AutomatonError):
        Dfa(AB, [[0]], 0, [0])


def test_enumerate_in_shortlex_order():
    d = fa.concat(fa.words_over(AB, ["a"]), fa.singleton(AB, ("b",)))
    assert fa.enumerate_words(d, 3) == [("b",), ("a", "b"), ("a", "a", "b")]
    assert fa.enumerate_words(fa.empty(AB), 3) == []
    assert fa.enumerate_words(fa.singleton(AB, ()), 3) == [()]


@given(dfas(), dfas())
def test_boolean_operations_match_membership(d1, d2):
    for w in words(AB, 5):
        x, y = d1.accepts_word(w), d2.accepts_word(w)
        assert fa.union(d1, d2).accepts_word(w) == (x or y)
        assert fa.intersection(d1, d2).accepts_word(w) == (x and y)
        assert fa.difference(d1, d2).accepts_word(w) == (x and not y)
        assert fa.complement(d1).accepts_word(w) == (not x)


@given(dfas(), dfas())
def test_de_morgan(d1, d2):
    left = fa.complement(fa.union(d1, d2))
    right = fa.intersection(fa.complement(d1), fa.complement(d2))
    assert fa.equivalent(left, right)


@given(dfas())
def test_minimize_is_equivalent_and_canonical(d):
    m = fa.minimize(d)
    assert fa.equivalent(m, d)
    assert m.n_states <= d.n_states
    assert fa.minimize(m) == m
    # a relabelled copy minimizes to the very same automaton
    perm = list(reversed(range(d.n_states)))
    rows = [None] * d.n_states
    for q in range(d.n_states):
        rows[perm[q]] = [perm[r] for r in d.delta[q]]
    copy = Dfa(AB, rows, perm[d.start], [perm[q] for q in d.accepts])
    assert fa.minimize(copy) == m


@given(dfas(max_states=3), dfas(max_states=3))
def test_concat_against_enumeration(d1, d2):
    c = fa.concat(d1, d2)
    l1, l2 = language(d1, AB, 5), language(d2, AB, 5)
    expected = {u + v for u in l1 for v in l2 if len(u + v) <= 5}
    assert language(c, AB, 5) == expected


@given(dfas(max_states=3))
def test_star_against_enumeration(d):
    base = {w for w in language(d, AB, 5) if w}
    expected = {()}
    frontier = {()}
    while frontier:
        frontier = {u + v for u in frontier for v in base if len(u + v) <= 5} - expected
        expected |= frontier
    assert language(fa.star(d), AB, 5) == expected


@given(dfas(), word_strategy(AB, 3))
def test_quotient_membership(d, w):
    q = fa.quotient_by_word(d, w)
    for x in words(AB, 7 - len(w)):
        assert q.accepts_word(x) == d.accepts_word(x + w)


def test_quotient_examples():
    lang = fa.finite_language(AB, [("a", "b"), ("b",)])
    assert language(fa.quotient_by_word(lang, ("b",)), AB, 3) == {("a",), ()}
    assert fa.equivalent(fa.quotient_by_word(lang, ()), lang)
    ab = star_of(("a", "b"))
    q = fa.quotient_by_word(ab, ("a", "b"))
    assert fa.equivalent(q, ab)
    brute = {x for x in words(AB, 8) if ab.accepts_word(x + ("a", "b"))}
    assert language(q, AB, 8) == brute


def test_hom_identity_and_erasing():
    lang = star_of(("a", "b"))
    assert fa.equivalent(fa.hom_image(lang, lambda x: (x,), AB), lang)
    assert fa.equivalent(fa.hom_image(lang, lambda x: (), AB), fa.singleton(AB, ()))
    assert fa.is_empty(fa.hom_image(fa.empty(AB), lambda x: (), AB))


@given(dfas(max_states=3))
def test_hom_image_and_preimage_against_enumeration(d):
    h = {"a": ("b", "a"), "b": ()}
    img = fa.hom_image(d, h, AB)
    expected = set()
    for w in language(d, AB, 6):
        v = tuple(y for x in w for y in h[x])
        if len(v) <= 4:
            expected.add(v)
    got = language(img, AB, 4)
    assert expected <= got
    # every image word up to length 4 comes from a source word up to length 6
    # once b-runs are bounded; check the converse by search with longer sources
    for v in got:
        assert any(
            tuple(y for x in w for y in h[x]) == v for w in language(d, AB, 8)
        ) or _image_by_search(d, h, v)
    pre = fa.hom_preimage(d, h, AB)
    for w in words(AB, 5):
        assert pre.accepts_word(w) == d.accepts_word(tuple(y for x in w for y in h[x]))


def _image_by_search(d, h, v):
    # states reachable while producing a prefix of v; 'b' loops are free
    frontier = {(d.start, 0)}
    seen = set(frontier)
    while frontier:
        nxt = set()
        for q, i in frontier:
            if i == len(v) and q in d.accepts:
                return True
            for x in AB:
                img = h[x]
                if v[i : i + len(img)] == img:
                    s = (d.step(q, x), i + len(img))
                    if s not in seen:
                        seen.add(s)
                        nxt.add(s)
        frontier = nxt
    return False


def test_prefix_closure_and_finiteness():
    lang = fa.concat(fa.words_over(AB, ["a"]), fa.singleton(AB, ("b",)))
    assert not fa.is_prefix_closed(lang)
    assert fa.is_prefix_closed(fa.prefixes(lang))
    assert not fa.is_finite(lang)
    assert fa.is_finite(fa.finite_language(AB, [("a",), ("a", "b", "b")]))


def test_dot_export_is_stable():
    d = star_of(("a", "b"))
    text = d.to_dot()
    assert text == d.to_dot()
    assert text.count("->") == d.n_states * 2 + 1


# -- padded alphabets and relations ------------------------------------------------


def test_pad_examples():
    assert pad_tuple([("a", "b"), ("b",)]) == (("a", "b"), ("b", PAD))
    assert pad_tuple([(), ()]) == ()


@given(st.lists(word_strategy(AB, 10), min_size=3, max_size=3))
def test_pad_round_trip(ws):
    assert unpad(pad_tuple(ws), 3) == tuple(tuple(w) for w in ws)


@pytest.mark.parametrize(
    "bad",
    [
        ((PAD, "a"), ("b", "b")),  # pad followed by a letter in coordinate 0
        (("a", PAD), (PAD, PAD)),  # all-pad symbol
    ],
)
def test_unpad_rejects_malformed(bad):
    with pytest.raises(AutomatonError):
        unpad(bad, 2)


def test_padded_alphabet_excludes_all_pad():
    symbols = padded_symbols(AB, 2)
    assert (PAD, PAD) not in symbols
    assert len(symbols) == 3 * 3 - 1


def test_diagonal_examples():
    a = fa.singleton(AB, ("a",))
    assert diagonal(a).enumerate(3) == [(("a",), ("a",))]
    assert diagonal(fa.empty(AB)).is_empty()
    astar_b = fa.concat(fa.words_over(AB, ["a"]), fa.singleton(AB, ("b",)))
    rel = diagonal(astar_b)
    assert rel.contains([("a", "a", "b"), ("a", "a", "b")])
    assert not rel.contains([("a", "a", "b"), ("a", "b", "b")])


@given(dfas())
def test_diagonal_against_enumeration(d):
    rel = diagonal(d)
    for u in words(AB, 4):
        for v in words(AB, 4):
            assert rel.contains([u, v]) == (u == v and d.accepts_word(u))


def test_cartesian_product_examples():
    rel = cartesian_product([fa.singleton(AB, ("a",)), fa.singleton(AB, ("b", "b"))])
    assert rel.enumerate(4) == [(("a",), ("b", "b"))]
    assert rel.dfa.accepts_word((("a", "b"), (PAD, "b")))
    assert cartesian_product([fa.empty(AB), fa.universal(AB)]).is_empty()


def test_cartesian_product_against_pairing():
    a_star = fa.words_over(AB, ["a"])
    b_star = fa.words_over(AB, ["b"])
    rel = cartesian_product([a_star, b_star])
    symbols = padded_symbols(AB, 2)
    for n in range(7):
        for p in product(symbols, repeat=n):
            try:
                u, v = unpad(p, 2)
            except AutomatonError:
                assert not rel.dfa.accepts_word(p)
                continue
            assert rel.dfa.accepts_word(p) == (set(u) <= {"a"} and set(v) <= {"b"})


@given(dfas(max_states=3), dfas(max_states=3), dfas(max_states=3))
def test_ternary_product_membership(d1, d2, d3):
    rel = cartesian_product([d1, d2, d3])
    for u, v, w in product(list(words(AB, 2)), repeat=3):
        assert rel.contains([u, v, w]) == (d1.accepts_word(u) and d2.accepts_word(v) and d3.accepts_word(w))


def test_relations_reject_injected_pad_violations():
    rel = cartesian_product([fa.universal(AB), fa.universal(AB)])
    assert not rel.dfa.accepts_word(((PAD, "a"), ("a", "a")))
    assert rel.dfa.accepts_word((("a", "a"), (PAD, "a")))
    # a raw DFA accepting malformed words is cut down to well-formed ones
    raw = fa.universal(padded_symbols(AB, 2))
    cut = SyncRelation(AB, 2, raw)
    assert fa.equivalent(cut.dfa, well_formed(AB, 2))


def test_diagonal_times():
    rel = diagonal_times(fa.words_over(AB, ["a"]), [("b",), ()])
    assert rel.contains([("a", "b"), ("a",)])
    assert not rel.contains([("a", "b"), ("a", "b")])
    assert rel.enumerate(2) == [(("b",), ()), (("a", "b"), ("a",))]


def test_relation_set_operations():
    r1 = relation_from_tuples(AB, 2, [(("a",), ()), (("b",), ("b",))])
    r2 = relation_from_tuples(AB, 2, [(("b",), ("b",))])
    assert r1.difference(r2).enumerate(3) == [(("a",), ())]
    assert r1.intersection(r2).equivalent(r2)
    assert r1.union(r2).equivalent(r1)
    assert fa.equivalent(r1.project(0), fa.finite_language(AB, [("a",), ("b",)]))


def test_first_projection_of_padded_pairs():
    rel = cartesian_product([fa.words_over(AB, ["a"]), fa.singleton(AB, ("b", "b"))])
    img = fa.hom_image(rel.dfa, lambda s: () if s[0] == PAD else (s[0],), AB)
    expected = {u for u, _ in rel.enumerate(6) if len(u) <= 6}
    assert language(img, AB, 6) == expected


# -- two-tape machines ----------------------------------------------------------------


def anbn():
    """Accepts (a^n, b^n) reading tapes alternately."""
    return AsyncAutomaton.build(
        AB,
        {"p": "Q1", "r": "Q2", "s": "Q2#", "f": "qf"},
        "p",
        {("p", "a"): "r", ("r", "b"): "p", ("p", END): "s", ("s", END): "f"},
    )


def test_anbn_runs():
    m = anbn()
    shuffle, ok = async_run(m, ("a", "a"), ("b", "b"))
    assert ok and shuffle == ("a", "b", "a", "b", END, END)
    shuffle, ok = async_run(m, ("a", "a"), ("b",))
    assert not ok and shuffle[-1] == "F"
    assert async_run(m, ("a",), ("b",)) == async_run(m, ("a",), ("b",))


def test_start_on_exhausted_tape_rejects():
    m = AsyncAutomaton.build(AB, {"p": "Q2", "f": "qf", "w": "Q1#"}, "p", {("p", END): "w", ("w", END): "f"})
    assert async_run(m, (), ())[1]
    assert not async_run(m, ("a",), ())[1]


def test_typing_violation_is_rejected():
    with pytest.raises(AutomatonError):
        AsyncAutomaton.build(AB, {"p": "Q1", "f": "qf"}, "p", {("p", "a"): "f"})


def test_failure_state_is_absorbing():
    m = anbn()
    assert all(r == m.fail for r in m.delta[m.fail])


def brute_projection(m, max_u, max_v):
    return {u for u in words(AB, max_u) for v in words(AB, max_v) if async_run(m, u, v)[1]}


def test_projection_of_anbn():
    m = anbn()
    proj = async_project_first(m)
    assert fa.equivalent(proj, fa.words_over(AB, ["a"]))
    assert language(proj, AB, 6) == brute_projection(m, 6, 6)


def test_projection_of_empty_machine():
    m = AsyncAutomaton.build(AB, {"p": "Q1", "f": "qf"}, "p", {})
    assert fa.is_empty(async_project_first(m))


def test_projection_of_diagonal_machine():
    m = sync_to_async(diagonal(fa.words_over(AB, ["a"])))
    assert fa.equivalent(async_project_first(m), fa.words_over(AB, ["a"]))
    assert language(async_project_first(m), AB, 6) == brute_projection(m, 6, 6)


@given(dfas(max_states=3), dfas(max_states=3))
def test_sync_to_async_accepts_the_same_pairs(d1, d2):
    rel = cartesian_product([d1, d2])
    m = sync_to_async(rel)
    for u in words(AB, 3):
        for v in words(AB, 3):
            assert async_run(m, u, v)[1] == rel.contains([u, v])
    # blocks alternate between tapes until one of them runs out
    for u, v in rel.enumerate(3):
        assert max(n for _, n in shuffle_blocks(m, u, v)) <= max(2, abs(len(u) - len(v)) + 2)
    # projection agrees with brute force; v is searched up to 6 * C with C = 1
    assert language(async_project_first(m), AB, 3) == brute_projection(m, 3, 6)


def test_minimize_async_keeps_pairs():
    m = sync_to_async(cartesian_product([fa.words_over(AB, ["a"]), fa.words_over(AB, ["b"])]))
    small = minimize_async(m)
    assert small.n_states <= m.n_states
    for u in words(AB, 3):
        for v in words(AB, 3):
            assert async_run(small, u, v)[1] == async_run(m, u, v)[1]


def test_second_coordinates():
    m = anbn()
    assert second_coordinates(m, ("a", "a"), 5) == [("b", "b")]
    assert second_coordinates(m, ("b",), 5) == []


def test_k_automaton_reaches_state():
    m = anbn()
    p = m.names.index("p")
    k = k_automaton(m, p)
    # (a^n, b^n) stops in p after using all letters; (a, ()) stops in r
    assert async_run(k, ("a", "a"), ("b", "b"))[1]
    assert not async_run(k, ("a",), ())[1]
