import random

import pytest

from conftest import graph
from raagkit.autos import (abelianization_matrix, autos_equal, compose, conjugation, graph_permutation,
                           identity, inversion, is_identity, parse_automorphism, partial_conjugation,
                           transvection)
from raagkit.errors import ConstructionError, ParseError
from raagkit.graph import star_complement_components
from raagkit.matalg import IntMatrix, det
from raagkit.words import GroupWord, words_equal


def random_word(g, rng, length):
    return GroupWord(g, tuple(rng.choice([1, -1]) * rng.randint(1, g.n) for _ in range(length)))


def generators(g):
    out = [inversion(g, v) for v in g.vertices]
    for u in g.vertices:
        for v in g.vertices:
            try:
                out.append(transvection(g, u, v))
            except ConstructionError:
                pass
    for v in g.vertices:
        for P in star_complement_components(g, v):
            out.append(partial_conjugation(g, v, P))
    return out


def test_transvection_requires_domination(path3, path5):
    t = transvection(path3, "b", "a")
    assert words_equal(t.image("a"), GroupWord.parse(path3, "b a"))
    with pytest.raises(ConstructionError) as exc:
        transvection(path5, "a", "c")
    assert "does not dominate" in str(exc.value)


def test_partial_conjugation_requires_component(path5):
    f = partial_conjugation(path5, "c", {"a"})
    assert str(f.image("a")) == "c a c^-1"
    assert str(f.image("e")) == "e"
    with pytest.raises(ConstructionError):
        partial_conjugation(path5, "c", {"a", "e"})


def test_graph_permutation(path3):
    f = graph_permutation(path3, {"a": "c", "c": "a"})
    assert str(f.image("a")) == "c"
    with pytest.raises(ConstructionError):
        graph_permutation(path3, {"a": "b", "b": "a"})


@pytest.mark.parametrize("name", ["path3", "path5", "claw"])
def test_generators_are_automorphisms(name, request):
    g = request.getfixturevalue(name)
    rng = random.Random(1)
    for f in generators(g):
        f.check_relations()
        assert is_identity(compose(f, f.inverse()))
        assert is_identity(compose(f.inverse(), f))
        for _ in range(20):
            u, v = random_word(g, rng, 5), random_word(g, rng, 5)
            assert words_equal(f(u * v), f(u) * f(v))
        assert det(abelianization_matrix(f)) in (1, -1)


def test_composition_order(path5):
    f = transvection(path5, "b", "a")
    h = inversion(path5, "b")
    fh = compose(f, h)
    w = GroupWord.parse(path5, "a b")
    assert fh(w) == f(h(w))
    assert abelianization_matrix(fh) == abelianization_matrix(f) @ abelianization_matrix(h)


def test_inner_automorphisms(path5):
    rng = random.Random(2)
    for _ in range(10):
        p = random_word(path5, rng, 4)
        c = conjugation(path5, p)
        assert abelianization_matrix(c).is_identity()
        w = random_word(path5, rng, 6)
        assert words_equal(c(w), p * w * GroupWord(path5, tuple(-x for x in reversed(p.letters))))


def test_power_and_equality(path3):
    t = transvection(path3, "b", "a")
    assert words_equal((t ** 3).image("a"), GroupWord.parse(path3, "b b b a"))
    assert abelianization_matrix(t ** 3) == IntMatrix.elementary(3, 1, 0, 3)
    assert autos_equal(t ** -2, (t.inverse()) ** 2)
    assert is_identity(t ** 0)
    assert inversion(path3, "a") ** 2 == identity(path3)


def test_text_syntax(path5):
    f = parse_automorphism(path5, "inv a; tv b a; pc c {a}")
    h = compose(partial_conjugation(path5, "c", {"a"}),
                compose(transvection(path5, "b", "a"), inversion(path5, "a")))
    assert f == h
    assert parse_automorphism(path5, "perm (a e)(b d)") == graph_permutation(
        path5, {"a": "e", "e": "a", "b": "d", "d": "b"})
    assert parse_automorphism(path5, "conj c") == conjugation(path5, GroupWord.parse(path5, "c"))


@pytest.mark.parametrize("text", ["frob a", "pc c a", "tv a", "inv zz"])
def test_text_syntax_errors(path5, text):
    with pytest.raises((ParseError, ConstructionError, ValueError)):
        parse_automorphism(path5, text)


def test_automorphisms_of_different_graphs(path3, path5):
    with pytest.raises(ValueError):
        compose(identity(path3), identity(path5))
    with pytest.raises(ValueError):
        identity(path3)(GroupWord.parse(path5, "e"))


def test_inversion_examples(path3):
    f = inversion(path3, "b")
    assert str(f(GroupWord.parse(path3, "b b"))) == "b^-1 b^-1"
    assert str(f(GroupWord.parse(path3, "a"))) == "a"
    assert is_identity(compose(f, f))


def test_transvection_refused_without_domination(path3):
    with pytest.raises(ConstructionError):
        transvection(path3, "a", "b")


def test_free_group_nielsen_moves():
    g = graph("abc", [])
    for u in "abc":
        for v in "abc":
            if u != v:
                transvection(g, u, v)
    t, i = transvection(g, "a", "b"), inversion(g, "b")
    assert compose(t, i) != compose(i, t)


def test_partial_conjugations_multiply_to_conjugation(path5):
    for v in path5.vertices:
        f = identity(path5)
        for P in star_complement_components(path5, v):
            f = compose(partial_conjugation(path5, v, P), f)
        assert f == conjugation(path5, GroupWord.parse(path5, v))


def test_abelianization_examples(path5):
    assert abelianization_matrix(inversion(path5, "c")) == IntMatrix.diag([1, 1, -1, 1, 1])
    u, v = path5.index("b"), path5.index("a")
    assert abelianization_matrix(transvection(path5, "b", "a")) == IntMatrix.elementary(5, u, v, 1)
    assert abelianization_matrix(partial_conjugation(path5, "c", {"a"})).is_identity()
