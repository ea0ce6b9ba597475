import random
from itertools import product

import pytest

from conftest import graph
from raagkit.autos import compose, conjugation, inversion, transvection
from raagkit.errors import InputError, NotInPCTError
from raagkit.focused_out import (ConjugatorSearch, ExponentVector, InversionVector, OutElement, PCTBasis,
                                 alpha_image, alpha_matrix, bits_for, closed_form_alpha, expected_alpha_order,
                                 exponent_vector, model, out_conjugate, out_identity, out_inverse,
                                 out_multiply, out_rank, pct_inner_test, relation_family, report_lines,
                                 verify_inversion_relations, word_ball)
from raagkit.graph import asymmetric_tree, build_focused, classify_focused
from raagkit.matalg import IntMatrix


@pytest.fixture(scope="module")
def small():
    """l = 1, m = 2, k = 2."""
    g = build_focused(1, 2, [asymmetric_tree("t")])
    return classify_focused(g)


@pytest.fixture(scope="module")
def three():
    """l = 0, m = 1, k = 3."""
    g = build_focused(0, 1, [asymmetric_tree(p) for p in ("p", "q", "r")])
    return classify_focused(g)


def small_atlas(catalog8, max_rank):
    out = []
    for rec in catalog8.of_class("focused"):
        d = classify_focused(rec.graph)
        if d.trivial_aut and d.rank <= max_rank:
            out.append(d)
    return out


@pytest.mark.parametrize("shape, labels", [
    ((2, 3, 4), "chi1 tau1 chi2 tau2 tau3 chi3"),
    ((2, 2, 2), "chi1 tau1 tau2"),
    ((0, 1, 3), "tau1 chi1 chi2"),
    ((1, 1, 1), "tau1"),
])
def test_basis_order(shape, labels):
    b = PCTBasis(*shape)
    assert " ".join(b.label_str(p) for p in range(b.dim)) == labels
    assert b.dim == shape[2] + shape[1] - 1


def test_last_chi_is_minus_the_sum():
    b = PCTBasis(2, 2, 2)
    assert b.chi_coords(2) == (-1,)
    b3 = PCTBasis(0, 1, 3)
    assert b3.chi_vector(3) == (0, -1, -1)


def test_invalid_shape():
    with pytest.raises(InputError):
        PCTBasis(2, 1, 3)
    with pytest.raises(InputError):
        ExponentVector((1, 2), PCTBasis(1, 2, 2))


def test_rank(small, three):
    assert out_rank(small) == 3
    assert out_rank(three) == 3


@pytest.mark.parametrize("name", ["small", "three"])
def test_realize_and_read_back(name, request):
    d = request.getfixturevalue(name)
    M = model(d)
    rng = random.Random(4)
    for _ in range(25):
        coords = tuple(rng.randint(-2, 2) for _ in range(M.basis.dim))
        f = M.realize(coords)
        assert exponent_vector(f, d).coords == coords
        p = tuple(rng.choice([1, -1]) * rng.randint(1, d.graph.n) for _ in range(3))
        assert exponent_vector(compose(conjugation(d.graph, p), f), d).coords == coords


def test_basis_elements_are_unit_vectors(small):
    M = model(small)
    for p in range(M.basis.dim):
        v = exponent_vector(M.basis_automorphism(p), small).coords
        assert v == tuple(int(t == p) for t in range(M.basis.dim))


def test_exponent_vector_rejects_outside_automorphisms(small):
    with pytest.raises(NotInPCTError):
        exponent_vector(inversion(small.graph, small.c), small)


def test_inner_automorphisms_have_zero_vector(small):
    f = conjugation(small.graph, (1, 2, -3))
    assert pct_inner_test(exponent_vector(f, small))


@pytest.mark.parametrize("name", ["small", "three"])
def test_alpha_from_words_matches_closed_form(name, request):
    d = request.getfixturevalue(name)
    b = PCTBasis(d.l, d.m, d.k)
    assert alpha_matrix(d.c, d) == IntMatrix.diag([-1] * b.dim)
    for i, x in enumerate(d.dominated, start=1):
        assert alpha_matrix(x, d) == closed_form_alpha(b, i)
    others = set(d.graph.vertices) - {d.c} - set(d.dominated)
    for v in others:
        assert alpha_matrix(v, d).is_identity()


@pytest.mark.parametrize("name", ["small", "three"])
def test_relations_pass(name, request):
    d = request.getfixturevalue(name)
    rep = verify_inversion_relations(d)
    assert rep.ok
    assert all(line.split()[2] == "PASS" for line in rep.lines())


def test_corrupted_relation_fails_its_family(small):
    M = model(small)
    alpha = {v: M.alpha_closed_form(v) for v in small.graph.vertices}
    x = small.x(1)
    alpha[x] = IntMatrix.identity(M.basis.dim)
    rep = verify_inversion_relations(small, alpha=alpha)
    assert not rep.ok
    assert rep.failed[5] and not rep.failed[1]
    assert any(line.startswith("RELATION 5 FAIL") for line in rep.lines())


def test_relation_family_labels(small):
    assert relation_family(small, small.c, ("chi", 1)) == 1
    assert relation_family(small, small.c, ("tau", 1)) == 2
    assert relation_family(small, small.x(1), ("chi", 1)) == 3
    assert relation_family(small, small.x(1), ("tau", 2)) == 4
    assert relation_family(small, small.x(1), ("tau", 1)) == 5
    assert relation_family(small, small.x(2), ("tau", 2)) == 6


@pytest.mark.parametrize("name", ["small", "three"])
def test_alpha_image_order(name, request):
    d = request.getfixturevalue(name)
    img = alpha_image(d)
    assert img.order == expected_alpha_order(d) == 2 ** (d.m + 1)
    assert any(line.startswith("NOTE") for line in report_lines(d))


def test_symmetric_graphs_need_opt_out(catalog8):
    d = next(classify_focused(r.graph) for r in catalog8.of_class("focused")
             if not classify_focused(r.graph).trivial_aut)
    with pytest.raises(InputError):
        alpha_image(d)


def test_semidirect_product_laws(small):
    b = PCTBasis(small.l, small.m, small.k)
    rng = random.Random(9)
    n = small.graph.n

    def rand():
        v = ExponentVector(tuple(rng.randint(-3, 3) for _ in range(b.dim)), b)
        bits = InversionVector(tuple(rng.randint(0, 1) for _ in range(n)))
        return OutElement(v, bits)

    e = out_identity(small)
    for _ in range(30):
        x, y, z = rand(), rand(), rand()
        assert out_multiply(out_multiply(x, y, small), z, small) == out_multiply(x, out_multiply(y, z, small), small)
        assert out_multiply(x, out_inverse(x, small), small) == e
        assert out_multiply(e, x, small) == x
        out_conjugate(x, y.translation, small)


def test_semidirect_product_matches_words(small):
    # the twist by inversions acts on translations as conjugation does on automorphisms
    M = model(small)
    rng = random.Random(11)
    for _ in range(10):
        coords = tuple(rng.randint(-2, 2) for _ in range(M.basis.dim))
        vs = rng.sample(small.graph.vertices, 2)
        inv = compose(inversion(small.graph, vs[0]), inversion(small.graph, vs[1]))
        f = compose(inv, compose(M.realize(coords), inv))
        beta = OutElement(ExponentVector((0,) * M.basis.dim, M.basis), bits_for(small, vs))
        assert exponent_vector(f, small) == out_conjugate(beta, ExponentVector(coords, M.basis), small)


def test_word_ball_sizes():
    free2 = graph("ab", [])
    assert [len(word_ball(free2, r)) for r in range(3)] == [1, 5, 17]
    z2 = graph("ab", ["ab"])
    assert len(word_ball(z2, 2)) == 13


def test_search_agrees_with_exponent_test(catalog8):
    graphs = small_atlas(catalog8, 2)[:4]
    assert graphs
    for d in graphs:
        M = model(d)
        search = ConjugatorSearch(d.graph, 4)
        for coords in product(range(-1, 2), repeat=M.basis.dim):
            f = M.realize(coords)
            q = search.search(f)
            inner = pct_inner_test(exponent_vector(f, d))
            assert (q is not None) == inner
            if q is not None:
                assert conjugation(d.graph, q) == f


def test_search_finds_known_conjugator(small):
    g = small.graph
    search = ConjugatorSearch(g, 3)
    p = (1, -2, 3)
    q = search.search(conjugation(g, p))
    assert q is not None and conjugation(g, q) == conjugation(g, p)
    assert search.search(transvection(g, small.c, small.x(1))) is None


def test_last_partial_conjugation_vector(three):
    M = model(three)
    v = exponent_vector(M.chi[-1], three).coords
    b = M.basis
    assert all(v[b.chi_index(j)] == -1 for j in range(1, three.k))
    assert all(v[b.tau_index(i)] == 0 for i in range(1, three.m + 1))


def test_conjugation_by_focus_is_trivial(small):
    f = conjugation(small.graph, (small.graph.index(small.c) + 1,))
    assert exponent_vector(f, small).is_zero()


def test_non_inner_vectors(small, three):
    b = model(small).basis
    assert not pct_inner_test(ExponentVector(b.tau_vector(1), b))
    b3 = model(three).basis
    w = ExponentVector(b3.chi_vector(1), b3)
    assert not pct_inner_test(w)
    assert ConjugatorSearch(three.graph, 4).search(model(three).realize(w)) is None


def test_conjugation_examples(small):
    b = model(small).basis
    w = ExponentVector((1, -2, 3), b)
    zero = InversionVector((0,) * small.graph.n)
    assert out_conjugate(OutElement(w, bits_for(small, [small.c])), w, small) == -w
    assert out_conjugate(OutElement(ExponentVector((5, 0, 1), b), zero), w, small) == w
    tau1 = ExponentVector(b.tau_vector(1), b)
    got = out_conjugate(OutElement(w, bits_for(small, [small.x(1)])), tau1, small)
    assert got.coords == tuple(c - t for c, t in zip(b.chi_vector(1), b.tau_vector(1)))


def test_order_four_for_the_smallest_shape():
    d = classify_focused(build_focused(1, 1, [asymmetric_tree("t")]))
    assert (d.l, d.m, d.k) == (1, 1, 2)
    img = alpha_image(d)
    assert img.order == 4
    assert all((A @ A).is_identity() for A in img.elements)


def test_order_for_the_wide_shape(wide_focused):
    assert alpha_image(classify_focused(wide_focused)).order == 2 ** 8
