import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph
from oracles import adjacency, automorphism_count, components, dominates as dom_oracle
from raagkit.errors import CapabilityError, ConstructionError, InputError, ParseError
from raagkit.graph import (asymmetric_tree, build_focused, classify_focused, diameter, dominates,
                           format_graph, graph_automorphism_group, is_austere, is_connected, link,
                           parse_graph, star, star_complement_components)


def test_link_and_star(path3):
    assert link(path3, "b") == {"a", "c"}
    assert star(path3, "b") == {"a", "b", "c"}
    edgeless = graph("ab", [])
    assert link(edgeless, "a") == set()
    assert star(edgeless, "a") == {"a"}
    k3 = graph("abc", ["ab", "bc", "ac"])
    assert all(star(k3, v) == {"a", "b", "c"} for v in "abc")


def test_unknown_vertex_is_an_input_error(path3):
    with pytest.raises(InputError):
        link(path3, "z")
    with pytest.raises(InputError):
        dominates(path3, "a", "z")


def test_domination_examples(path3):
    assert dominates(path3, "b", "a")
    c4 = graph("abcd", ["ab", "bc", "cd", "da"])
    assert dominates(c4, "a", "c")
    assert not dominates(c4, "a", "b")
    edgeless = graph("ab", [])
    assert dominates(edgeless, "a", "b") and dominates(edgeless, "b", "a")
    assert dominates(path3, "a", "a")


def random_graph(rng, n, p):
    vs = [f"v{i}" for i in range(n)]
    es = [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return vs, es


@given(st.integers(1, 7), st.floats(0, 1), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_domination_and_components_match_oracle(n, p, seed):
    vs, es = random_graph(random.Random(seed), n, p)
    g = graph(vs, es)
    adj = adjacency(vs, es)
    for u in vs:
        for v in vs:
            assert dominates(g, u, v) == dom_oracle(adj, u, v)
        comps = star_complement_components(g, u)
        expected = components(adj, set(vs) - adj[u] - {u})
        assert set(comps) == set(expected)
        covered = set().union(*comps) if comps else set()
        assert covered | star(g, u) == set(vs)
        assert sum(len(c) for c in comps) == len(covered)


def test_component_order(path5):
    assert star_complement_components(path5, "c") == [{"a"}, {"e"}]
    assert star_complement_components(graph("abc", ["ab", "bc"]), "b") == []
    g = graph("abcdef", ["ab", "bc", "ce", "ef", "fd"])
    # singletons first, then by least vertex
    comps = star_complement_components(g, "c")
    assert [sorted(c) for c in comps] == [["a"], ["d", "f"]]


def test_automorphism_counts():
    assert len(graph_automorphism_group(graph("abc", ["ab", "bc"]))) == 2
    k3 = graph("abc", ["ab", "bc", "ac"])
    group = graph_automorphism_group(k3)
    assert len(group) == 6
    assert all(group[0][v] == v for v in "abc")


@pytest.mark.parametrize("seed", range(8))
def test_automorphism_count_matches_permutation_search(seed):
    vs, es = random_graph(random.Random(seed), 6, 0.45)
    g = graph(vs, es)
    assert len(graph_automorphism_group(g)) == automorphism_count(vs, es)


def test_automorphism_group_bound():
    g = graph([f"v{i}" for i in range(11)], [])
    with pytest.raises(CapabilityError):
        graph_automorphism_group(g)


def test_claw_is_not_focused(claw):
    d = classify_focused(claw)
    assert not d
    assert d.condition == "domination"
    assert "mutual domination" in d.message


def test_single_vertex_is_not_focused():
    d = classify_focused(graph("a", []))
    assert not d and d.condition == "degenerate"


def test_star_disconnection_is_reported(path5):
    d = classify_focused(path5)
    assert not d


def test_asymmetric_tree():
    t = asymmetric_tree()
    assert t.n == 7 and is_connected(t)
    assert len(graph_automorphism_group(t)) == 1


@pytest.mark.parametrize("l, m, shapes", [(1, 1, 1), (0, 1, 2), (2, 4, 1), (0, 0, 2)])
def test_build_focused_shapes(l, m, shapes):
    trees = [asymmetric_tree(f"t{i}_") for i in range(shapes)]
    g = build_focused(l, m, trees)
    d = classify_focused(g)
    assert d and d.c == "c"
    assert (d.l, d.m, d.k) == (l, m, l + shapes)
    assert d.trivial_aut
    assert len(graph_automorphism_group(g, bound=g.n)) == 1 if g.n <= 10 else True
    adj = adjacency(g.vertices, [tuple(e) for e in g.edges])
    for u in g.vertices:
        for v in g.vertices:
            if u != v and dom_oracle(adj, u, v):
                assert u == "c"


def test_build_focused_wide_shape(wide_focused):
    d = classify_focused(wide_focused)
    assert (d.l, d.m, d.k) == (4, 7, 7)
    assert d.rank == 13
    assert d.trivial_aut
    assert [len(P) for P in d.Q[:4]] == [1, 1, 1, 1]
    assert [next(iter(P)) for P in d.Q[:4]] == list(d.L)


def test_build_focused_refuses_k_one():
    with pytest.raises(ConstructionError):
        build_focused(1, 1, [])
    with pytest.raises(InputError):
        build_focused(2, 1, [])


def test_focused_decomposition_invariants(wide_focused):
    d = classify_focused(wide_focused)
    g = wide_focused
    for x in d.L:
        assert dominates(g, "c", x) and not g.adjacent("c", x)
    for x in d.S:
        assert dominates(g, "c", x) and g.adjacent("c", x)
    assert set(d.Q) == set(star_complement_components(g, "c"))
    for v in g.vertices:
        if v != "c":
            assert len(star_complement_components(g, v)) <= 1


def test_classification_is_stable_under_relabeling(wide_focused):
    g = wide_focused
    rng = random.Random(3)
    names = list(g.vertices)
    rng.shuffle(names)
    mapping = {v: f"w{i}" for i, v in enumerate(names)}
    h = graph([mapping[v] for v in g.vertices], [tuple(mapping[x] for x in e) for e in g.edges])
    d, e = classify_focused(g), classify_focused(h)
    assert mapping[d.c] == e.c
    assert tuple(mapping[x] for x in d.L) == e.L
    assert {frozenset(mapping[x] for x in P) for P in d.Q} == set(e.Q)


def test_austere_refusals():
    c5 = graph("abcde", ["ab", "bc", "cd", "de", "ea"])
    r = is_austere(c5)
    assert not r and r.condition == "automorphism"
    r2 = is_austere(graph("ab", []))
    assert not r2


def test_austere_certificate(catalog8):
    austere = catalog8.of_class("austere")
    assert austere
    for rec in austere:
        cert = is_austere(rec.graph)
        assert cert
        assert cert.maxDegree <= rec.n - 2
        assert cert.diameter >= 2


def test_diameter():
    assert diameter(graph("abc", ["ab", "bc"])) == 2
    assert diameter(graph("ab", [])) is None


def test_text_round_trip(wide_focused):
    text = format_graph(wide_focused)
    assert parse_graph(text) == wide_focused


@pytest.mark.parametrize("text, line", [
    ("graph g\nvertex a\nvertex b\nedge a b\nedge b a\n", 5),
    ("graph g\nvertex a\nedge a z\n", 3),
    ("graph g\nvertex a\nvertex a\n", 3),
    ("vertex a\n", 1),
    ("graph g\nvertex a\nfrob a\n", 3),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_graph(text)
    assert exc.value.line == line


def test_comments_are_ignored():
    g = parse_graph("# header\ngraph g  # name\nvertex a\nvertex b # second\nedge a b\n")
    assert g.vertices == ("a", "b") and g.adjacent("a", "b")
