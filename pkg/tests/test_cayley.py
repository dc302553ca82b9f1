import json

import pytest

from autostack.automata import dfa as fa
from autostack.cayley import (
    build_ball,
    check_descent_prl,
    check_wellfounded,
    descent_arcs,
    fellow_traveler,
    flow_from_stacking,
    verify_stacking,
)
from autostack.catalog import SHIPPED, load_entry
from autostack.core import words_up_to
from autostack.stacking import ComponentPhi, PhiComponent, StackingStructure


def test_radius_zero():
    ball = build_ball(load_entry("z2").stacking, 0)
    assert ball.vertices == ((),)
    assert ball.internal_edges() == []


def test_free_group_radius_two():
    ball = build_ball(load_entry("free2").stacking, 2)
    assert len(ball.vertices) == 17
    assert len(ball.sphere()) == 12
    assert ball.recursive_edges() == []
    assert ball.check_tree() == []


def test_z2_radius_two_matches_oracle():
    e = load_entry("z2")
    ball = build_ball(e.stacking, 2)
    points = {(m, n) for m in range(-2, 3) for n in range(-2, 3) if abs(m) + abs(n) <= 2}
    assert {e.oracle.eval(y) for y in ball.vertices} == points
    assert len(ball.vertices) == len(points)


@pytest.mark.parametrize("name", SHIPPED)
def test_ball_structure(name):
    e = load_entry(name)
    ball = build_ball(e.stacking, 4)
    assert set(ball.vertices) == set(fa.enumerate_words(e.stacking.normal_forms, 4))
    for y in ball.vertices:
        assert y[:-1] in ball
        for a in e.alphabet.letters:
            edge = ball.edge(y, a)
            assert e.oracle.equal(edge.target, y + (a,))
            if not edge.dangling:
                back = ball.edge(edge.target, e.alphabet.inv(a))
                assert back.target == y
                assert back.degenerate == edge.degenerate
                assert ball.undirected_key(back) == ball.undirected_key(edge)
    assert ball.check_tree() == []
    # tree edges are the prefix edges, counted once per direction
    assert len(ball.tree_edges()) == 2 * (len(ball.vertices) - 1)


def test_ball_from_rewriting_system_agrees():
    e = load_entry("klein")
    a = build_ball(e.stacking, 3)
    b = build_ball(e.processed, 3)
    assert a.vertices == b.vertices
    assert a.edges == b.edges


def test_flow_path_of_z2_edge():
    s = load_entry("z2").stacking
    ball = build_ball(s, 3)
    flow = flow_from_stacking(s, ball)
    p = flow.paths[(("b",), "a")]
    assert p.word == ("B", "a", "b") and p.verified
    assert p.steps == ((("b",), "B"), ((), "a"), (("a",), "b"))
    assert flow.path_of(((), "a")) == (((), "a"),)
    assert flow.violations == []


@pytest.mark.parametrize("name", SHIPPED)
def test_flow_endpoints(name):
    s = load_entry(name).stacking
    ball = build_ball(s, 4)
    flow = flow_from_stacking(s, ball)
    for key, p in flow.paths.items():
        if not p.verified:
            continue
        edge = ball.edge(*key)
        assert p.steps[0][0] == edge.source
        last = ball.edge(*p.steps[-1])
        assert last.target == edge.target
        assert len(p.steps) <= s.bound


def test_free_group_descent_is_empty():
    s = load_entry("free2").stacking
    ball = build_ball(s, 3)
    report = check_wellfounded(flow_from_stacking(s, ball))
    assert report.acyclic and report.nodes == 0 and report.depth == 0


@pytest.mark.parametrize("name", SHIPPED)
def test_descent_is_acyclic_and_decreases_prl(name):
    e = load_entry(name)
    s = e.stacking
    ball = build_ball(s, 5 if name != "free2" else 3)
    flow = flow_from_stacking(s, ball)
    report = check_wellfounded(flow)
    assert report.acyclic and report.cycle == ()
    q = e.processed
    assert check_descent_prl(flow, q) == []
    for small, big in descent_arcs(flow):
        assert flow.paths[small].verified and flow.paths[big].verified


def _looping_z2():
    """The rank-two abelian structure with phi(b^n, a) = a B b, a path through the edge itself."""
    s = load_entry("z2").stacking
    comps = []
    for c in s.phi.components():
        value = ("a", "B", "b") if c.value == ("B", "a", "b") else c.value
        comps.append(PhiComponent(c.domain, c.letter, value))
    return StackingStructure(s.alphabet, s.normal_forms, ComponentPhi(s.alphabet, comps), s.bound)


def test_self_routing_structure_reports_cycle():
    good = load_entry("z2").stacking
    bad = _looping_z2()
    ball = build_ball(good, 3)
    flow = flow_from_stacking(bad, ball)
    assert flow.violations == []  # endpoints are still right
    report = check_wellfounded(flow)
    assert not report.acyclic
    assert report.cycle
    arcs = set(report.arcs)
    cyc = report.cycle
    for i, e in enumerate(cyc):
        assert (e, cyc[(i + 1) % len(cyc)]) in arcs
    data = json.loads(report.to_json(good.alphabet))
    assert data["acyclic"] is False and data["cycle"]


@pytest.mark.parametrize("name", SHIPPED)
def test_verify_catalog_structures(name):
    e = load_entry(name)
    report = verify_stacking(e.stacking, 4, e.oracle)
    assert report.ok, report.lines(e.alphabet)
    assert report.lines(e.alphabet)[-1] == "result ok"


def test_verify_flags_wrong_values():
    # tree edges with a non-letter value
    s = load_entry("z2").stacking
    comps = [PhiComponent(c.domain, c.letter, ("a", "a", "A")) if c.value == ("a",) else c for c in s.phi.components()]
    wrong = StackingStructure(s.alphabet, s.normal_forms, ComponentPhi(s.alphabet, comps), s.bound)
    ball_report = verify_stacking(wrong, 2, load_entry("z2").oracle)
    assert ball_report.degenerate
    assert not ball_report.ok
    assert ball_report.lines(s.alphabet)[-1].startswith("result FAIL")


def test_verify_reports_cycle_without_other_failures():
    bad = _looping_z2()
    # the looping structure cannot reduce ba, so check it on the good ball
    good = load_entry("z2").stacking
    flow = flow_from_stacking(bad, build_ball(good, 2))
    assert not check_wellfounded(flow).acyclic


def test_fellow_traveller_constants():
    s = load_entry("free2").stacking
    ball = build_ball(s, 5)
    assert fellow_traveler(s.normal_forms, ball).constant == 1
    assert fellow_traveler(s.normal_forms, ball, pairs=[(("a",), ("a",))]).constant == 0
    z = load_entry("z2").stacking
    zb = build_ball(z, 5)
    report = fellow_traveler(z.normal_forms, zb)
    assert 1 <= report.constant <= 4


def test_distances_match_breadth_first_search_on_oracle():
    e = load_entry("z2")
    ball = build_ball(e.stacking, 4)
    d = ball.distances_from(())
    for y in ball.vertices:
        if len(y) <= 2:
            m, n = e.oracle.eval(y)
            assert d[y] == abs(m) + abs(n)


def test_stats_keys():
    ball = build_ball(load_entry("s3").stacking, 3)
    stats = ball.stats()
    assert stats["vertices"] == 6
    assert set(stats) == {"radius", "vertices", "sphere", "directed_edges", "dangling_edges", "tree_edges", "recursive_edges"}
    assert len(list(words_up_to(("a", "b"), 3))) >= stats["vertices"]
