import pytest

from autostack.automata import dfa as fa
from autostack.automata.padded import cartesian_product
from autostack.catalog import (
    CATALOG_ENV,
    SHIPPED,
    CatalogError,
    ParseError,
    entry_names,
    load_entry,
)
from autostack.catalog import formats
from autostack.catalog.formats import RulesFile
from autostack.core import Alphabet, Presentation, words_up_to
from autostack.stacking import stacking_presentation

from brute import language


# -- shipped entries -----------------------------------------------------------------


def test_examples():
    free2 = load_entry("free2")
    assert free2.srs.reduce(free2.parse("aBbA")) == ()
    assert free2.oracle.is_identity(free2.parse("aBbA"))
    assert load_entry("z2").srs.reduce(("b", "a")) == ("a", "b")
    s3 = load_entry("s3")
    assert s3.srs.reduce(s3.parse("ababab")) == ()
    assert s3.oracle.is_identity(s3.parse("ababab"))
    assert not s3.oracle.is_identity(s3.parse("abab"))


@pytest.mark.parametrize("name", SHIPPED)
def test_rules_are_shortlex_reducing(name):
    e = load_entry(name)
    for u, v in e.srs.rules:
        assert e.alphabet.key(v) < e.alphabet.key(u)


def _affine_klein(w):
    # a: (x, y) -> (x + 1, y); b: (x, y) -> (-x, y + 1); words act left to right
    def act(x, y, letter):
        if letter == "a":
            return x + 1, y
        if letter == "A":
            return x - 1, y
        if letter == "b":
            return -x, y + 1
        return -x, y - 1

    pts = []
    for p in ((0, 0), (1, 0), (0, 1)):
        x, y = p
        for letter in reversed(w):
            x, y = act(x, y, letter)
        pts.append((x, y))
    return tuple(pts)


def test_klein_oracle_against_affine_action():
    e = load_entry("klein")
    ws = list(words_up_to(e.alphabet.letters, 4))
    for u in ws[:60]:
        for v in ws:
            assert e.oracle.equal(u, v) == (_affine_klein(u) == _affine_klein(v))


def test_z2_sphere_sizes():
    n = load_entry("z2").stacking.normal_forms
    counts = [fa.count_words(n, k) for k in range(7)]
    points = [
        len({(m, q) for m in range(-k, k + 1) for q in range(-k, k + 1) if abs(m) + abs(q) == k}) for k in range(7)
    ]
    assert counts == points == [1] + [4 * k for k in range(1, 7)]


def test_s3_sizes():
    e = load_entry("s3")
    nfs = fa.enumerate_words(e.stacking.normal_forms, 8)
    assert [sum(1 for w in nfs if len(w) == k) for k in range(5)] == [1, 2, 2, 1, 0]
    assert len({e.oracle.eval(w) for w in nfs}) == 6


def test_unknown_entry():
    with pytest.raises(CatalogError):
        load_entry("bs12")


# -- user catalogs ------------------------------------------------------------------------


def test_user_catalog(tmp_path, monkeypatch):
    (tmp_path / "z3.rules").write_text("LETTERS: a A\nINV: a A\nRULES:\naA -> 1\nAa -> 1\naa -> A\nAA -> a\n")
    monkeypatch.setenv(CATALOG_ENV, str(tmp_path))
    assert "z3" in entry_names()
    e = load_entry("z3")
    assert e.srs.reduce(("a", "a", "a")) == ()
    assert len(fa.enumerate_words(e.stacking.normal_forms, 5)) == 3


def test_failing_user_entry_refuses_to_load(tmp_path, monkeypatch):
    (tmp_path / "broken.rules").write_text("LETTERS: c b a\nRULES:\ncb -> a\nba -> b\n")
    monkeypatch.setenv(CATALOG_ENV, str(tmp_path))
    with pytest.raises(CatalogError, match="does not join"):
        load_entry("broken")
    (tmp_path / "unordered.rules").write_text("LETTERS: a b\nRULES:\nab -> ba\n")
    with pytest.raises(CatalogError, match="shortlex"):
        load_entry("unordered")


# -- formats ------------------------------------------------------------------------------


@pytest.mark.parametrize("name", SHIPPED)
def test_round_trips(name):
    e = load_entry(name)
    rf = RulesFile(e.alphabet, e.srs.rules)
    text = formats.write_rules(rf)
    assert formats.read_rules(text).string_system() == e.srs
    assert formats.write_rules(formats.read_rules(text)) == text
    q = e.processed
    text = formats.write_prs(q)
    assert formats.read_prs(text) == q
    assert formats.write_prs(formats.read_prs(text)) == text
    s = e.stacking
    text = formats.write_stacking(s)
    back = formats.read_stacking(text)
    assert formats.write_stacking(back) == text
    for y in fa.enumerate_words(s.normal_forms, 3):
        for a in e.alphabet.letters:
            assert back.phi_eval(y, a) == s.phi_eval(y, a)
    p = stacking_presentation(s)
    assert formats.read_presentation(formats.write_presentation(p)) == p
    d = s.normal_forms
    assert formats.read_dfa(formats.write_dfa(d)) == d


@pytest.mark.parametrize("name", ["free2", "z2"])
def test_async_round_trips(name):
    st = load_entry(name).async_structure
    text = formats.write_async_structure(st)
    back = formats.read_async_structure(text)
    assert formats.write_async_structure(back) == text
    for a in st.alphabet.letters:
        assert back.multipliers[a] == st.multipliers[a]
        m = st.multipliers[a]
        assert formats.read_async(formats.write_async(m)) == m
    s = load_entry(name).async_stacking
    text = formats.write_stacking(s)
    assert formats.document_kind(text) == "stacking-async"
    again = formats.read_stacking(text)
    y = ("b",) * 40
    assert again.phi_eval(y, "a") == s.phi_eval(y, "a")


def test_relation_round_trip():
    letters = ("a", "b")
    rel = cartesian_product([fa.words_over(letters, ["a"]), fa.singleton(letters, ("b",))])
    text = formats.write_relation(rel)
    assert "(a,_)" in text or "(_,b)" in text
    back = formats.read_relation(text)
    assert back.equivalent(rel)
    assert formats.write_relation(back) == text


def test_comments_are_skipped():
    text = "# a comment\nLETTERS: a A\n# another\nINV: a A\nRULES:\naA -> 1\n"
    assert formats.read_rules(text).rules == ((("a", "A"), ()),)


def test_presentation_document():
    al = Alphabet.free(["a", "b"])
    p = Presentation(al, [al.parse("abAB")])
    text = formats.write_presentation(p)
    assert formats.document_kind(text) == "presentation"
    assert formats.read_presentation(text) == p


@pytest.mark.parametrize(
    "text, line",
    [
        ("LETTERS: a $\nRULES:\n", 1),
        ("LETTERS: a A\nINV: a A\nRULES:\naA 1\n", 4),
        ("LETTERS: a A\nINV: a A\nRULES:\naX -> 1\n", 4),
        ("LETTERS: a A\nINV: a B\nRULES:\n", 2),
        ("RULES:\n", 1),
    ],
)
def test_rule_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        formats.read_rules(text)
    assert info.value.line == line


def test_partial_dfa_is_rejected():
    text = "DFA\nalphabet a b\nstates 2\nstart 0\naccept 1\n0 a 1\n0 b 0\n1 a 1\nEND\n"
    with pytest.raises(ParseError, match="missing transition for state 1 on b"):
        formats.read_dfa(text)


def test_dfa_text_is_canonical():
    d = fa.minimize(fa.words_over(("a", "b"), ["a"]))
    text = formats.write_dfa(d)
    assert text == formats.write_dfa(formats.read_dfa(text))
    assert language(formats.read_dfa(text), ("a", "b"), 4) == language(d, ("a", "b"), 4)


def test_document_kinds():
    e = load_entry("z2")
    assert formats.document_kind(formats.write_rules(RulesFile(e.alphabet, e.srs.rules))) == "rules"
    assert formats.document_kind(formats.write_prs(e.processed)) == "prefix"
    assert formats.document_kind(formats.write_stacking(e.stacking)) == "stacking"
    assert formats.document_kind(formats.write_async_structure(e.async_structure)) == "async"
    assert formats.document_kind(formats.write_dfa(e.stacking.normal_forms)) == "dfa"
