"""Laurence-Servatius generators of Aut(A_G), their action on words, composition.

An automorphism is stored as the tuple of normal-form images of the
generators (in canonical vertex order) together with the images under its
inverse, so that inverses never require solving word equations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ConstructionError, InputError, ParseError
from .graph import SimplicialGraph, dominates, link, star, star_complement_components
from .matalg import IntMatrix
from .words import GroupWord, Letters, invert_letters, nf_letters, parse_letters


def substitute(adj, images: Sequence[Letters], letters: Sequence[int]) -> Letters:
    out: list[int] = []
    for x in letters:
        img = images[abs(x) - 1]
        out.extend(img if x > 0 else invert_letters(img))
    return nf_letters(adj, out)


@dataclass(frozen=True, eq=False)
class RaagAutomorphism:
    graph: SimplicialGraph
    images: tuple[Letters, ...]
    inverse_images: tuple[Letters, ...]
    tag: str = "composite"

    def __post_init__(self):
        n = self.graph.n
        if len(self.images) != n or len(self.inverse_images) != n:
            raise ConstructionError("an automorphism needs one image per generator")

    def check_relations(self) -> None:
        """Raise unless the images (and inverse images) of adjacent generators commute."""
        n = self.graph.n
        adj = self.graph.adjacency_masks()
        for imgs in (self.images, self.inverse_images):
            for i in range(n):
                m = adj[i]
                for j in range(i + 1, n):
                    if m >> j & 1:
                        a, b = imgs[i], imgs[j]
                        if nf_letters(adj, a + b) != nf_letters(adj, b + a):
                            raise ConstructionError(
                                f"images of adjacent generators {self.graph.vertices[i]} and "
                                f"{self.graph.vertices[j]} do not commute")

    def __call__(self, w: GroupWord) -> GroupWord:
        return apply(self, w)

    def __matmul__(self, other: "RaagAutomorphism") -> "RaagAutomorphism":
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, RaagAutomorphism):
            return NotImplemented
        return autos_equal(self, other)

    def __hash__(self):
        return hash((self.graph, self.images))

    def image(self, v: str) -> GroupWord:
        return GroupWord(self.graph, self.images[self.graph.index(v)])

    def inverse(self) -> "RaagAutomorphism":
        return RaagAutomorphism(self.graph, self.inverse_images, self.images, f"({self.tag})^-1")

    def __pow__(self, e: int) -> "RaagAutomorphism":
        base = self if e >= 0 else self.inverse()
        result = identity(self.graph)
        for _ in range(abs(e)):
            result = compose(base, result)
        return result

    def __str__(self):
        g = self.graph
        parts = [f"{v} -> {GroupWord(g, img)}" for v, img in zip(g.vertices, self.images)
                 if img != ((g.index(v) + 1),)]
        return f"[{self.tag}] " + (", ".join(parts) if parts else "identity")


def _from_images(g: SimplicialGraph, images: dict, inverse_images: dict, tag: str) -> RaagAutomorphism:
    """Build from partial image dicts (vertex -> letters); unspecified generators are fixed."""
    adj = g.adjacency_masks()
    imgs = []
    invs = []
    for i, v in enumerate(g.vertices):
        imgs.append(nf_letters(adj, images.get(v, (i + 1,))))
        invs.append(nf_letters(adj, inverse_images.get(v, (i + 1,))))
    f = RaagAutomorphism(g, tuple(imgs), tuple(invs), tag)
    f.check_relations()
    if not is_identity(compose(f, f.inverse())):
        raise ConstructionError(f"{tag}: claimed inverse is not an inverse")
    return f


def identity(g: SimplicialGraph) -> RaagAutomorphism:
    gens = tuple((i + 1,) for i in range(g.n))
    return RaagAutomorphism(g, gens, gens, "id")


def inversion(g: SimplicialGraph, v: str) -> RaagAutomorphism:
    x = g.index(v) + 1
    return _from_images(g, {v: (-x,)}, {v: (-x,)}, f"inv {v}")


def transvection(g: SimplicialGraph, u: str, v: str) -> RaagAutomorphism:
    """v -> u v, everything else fixed.  Requires v <= u."""
    if u == v:
        raise ConstructionError("transvection needs distinct vertices")
    if not dominates(g, u, v):
        witness = sorted(link(g, v) - star(g, u), key=g.index)
        raise ConstructionError(
            f"{u} does not dominate {v}: lk({v}) \\ st({u}) = {{{', '.join(witness)}}}")
    a, b = g.index(u) + 1, g.index(v) + 1
    kind = "adjacent" if g.adjacent(u, v) else "non-adjacent"
    return _from_images(g, {v: (a, b)}, {v: (-a, b)}, f"tv {u} {v} ({kind})")


def partial_conjugation(g: SimplicialGraph, v: str, P) -> RaagAutomorphism:
    """u -> v u v^-1 for u in P, where P is one component of G minus st(v)."""
    P = frozenset(P)
    if P not in star_complement_components(g, v):
        raise ConstructionError(
            f"{{{', '.join(sorted(P, key=g.index))}}} is not a component of the complement of st({v})")
    a = g.index(v) + 1
    imgs = {u: (a, g.index(u) + 1, -a) for u in P}
    invs = {u: (-a, g.index(u) + 1, a) for u in P}
    return _from_images(g, imgs, invs, f"pc {v} {{{','.join(sorted(P, key=g.index))}}}")


def conjugation(g: SimplicialGraph, p: Sequence[int] | GroupWord) -> RaagAutomorphism:
    """Inner automorphism x -> p x p^-1."""
    letters = tuple(p.letters if isinstance(p, GroupWord) else p)
    pinv = invert_letters(letters)
    imgs = {v: letters + (i + 1,) + pinv for i, v in enumerate(g.vertices)}
    invs = {v: pinv + (i + 1,) + letters for i, v in enumerate(g.vertices)}
    return _from_images(g, imgs, invs, f"conj {GroupWord(g, nf_letters(g.adjacency_masks(), letters))}")


def graph_permutation(g: SimplicialGraph, sigma: dict) -> RaagAutomorphism:
    for v in g.vertices:
        sigma.setdefault(v, v)
    if sorted(sigma.values()) != sorted(g.vertices):
        raise ConstructionError("not a permutation of the vertex set")
    for u, v in g.edge_list():
        if not g.adjacent(sigma[u], sigma[v]):
            raise ConstructionError(f"permutation does not preserve edge {u}-{v}")
    inv = {b: a for a, b in sigma.items()}
    imgs = {v: (g.index(sigma[v]) + 1,) for v in g.vertices}
    invs = {v: (g.index(inv[v]) + 1,) for v in g.vertices}
    moved = [v for v in g.vertices if sigma[v] != v]
    return _from_images(g, imgs, invs, "perm " + (" ".join(f"{v}->{sigma[v]}" for v in moved) or "id"))


def _check_same(f: RaagAutomorphism, h: RaagAutomorphism):
    if f.graph is not h.graph and f.graph != h.graph:
        raise InputError("automorphisms of different groups")


def apply(f: RaagAutomorphism, w: GroupWord) -> GroupWord:
    if w.graph is not f.graph and w.graph != f.graph:
        raise InputError("word and automorphism live over different graphs")
    return GroupWord(f.graph, substitute(f.graph.adjacency_masks(), f.images, w.letters))


def compose(f: RaagAutomorphism, h: RaagAutomorphism) -> RaagAutomorphism:
    """The automorphism w -> f(h(w))."""
    _check_same(f, h)
    adj = f.graph.adjacency_masks()
    imgs = tuple(substitute(adj, f.images, img) for img in h.images)
    invs = tuple(substitute(adj, h.inverse_images, img) for img in f.inverse_images)
    return RaagAutomorphism(f.graph, imgs, invs, f"{f.tag} . {h.tag}")


def autos_equal(f: RaagAutomorphism, h: RaagAutomorphism) -> bool:
    _check_same(f, h)
    return f.images == h.images


def is_identity(f: RaagAutomorphism) -> bool:
    return all(img == (i + 1,) for i, img in enumerate(f.images))


def abelianization_matrix(f: RaagAutomorphism) -> IntMatrix:
    """Entry (u, v) is the exponent sum of generator u in f(v)."""
    n = f.graph.n
    rows = [[0] * n for _ in range(n)]
    for col, img in enumerate(f.images):
        for x in img:
            rows[abs(x) - 1][col] += 1 if x > 0 else -1
    return IntMatrix(rows)


# ---------------------------------------------------------------------------
# Text syntax: "inv v", "tv u v", "pc v {a,b}", "perm (a b)(c d)", joined by ";"
# and applied left to right.

_PC = re.compile(r"^pc\s+(\S+)\s*\{([^}]*)\}$")


def parse_automorphism(g: SimplicialGraph, text: str) -> RaagAutomorphism:
    result = identity(g)
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        step = _parse_one(g, chunk)
        result = compose(step, result)
    return result


def _parse_one(g: SimplicialGraph, chunk: str) -> RaagAutomorphism:
    parts = chunk.split()
    try:
        if parts[0] == "inv" and len(parts) == 2:
            return inversion(g, parts[1])
        if parts[0] == "tv" and len(parts) == 3:
            return transvection(g, parts[1], parts[2])
        if parts[0] == "pc":
            mt = _PC.match(chunk)
            if not mt:
                raise ParseError(f"expected 'pc v {{a,b,...}}', got {chunk!r}")
            P = [x.strip() for x in mt.group(2).split(",") if x.strip()]
            for x in P + [mt.group(1)]:
                g.index(x)
            return partial_conjugation(g, mt.group(1), P)
        if parts[0] == "conj":
            return conjugation(g, parse_letters(g, " ".join(parts[1:])))
        if parts[0] == "perm":
            sigma = {}
            for cyc in re.findall(r"\(([^)]*)\)", chunk[4:]):
                vs = cyc.split()
                for a, b in zip(vs, vs[1:] + vs[:1]):
                    g.index(a)
                    sigma[a] = b
            return graph_permutation(g, sigma)
    except IndexError:
        pass
    raise ParseError(f"cannot parse automorphism {chunk!r}")
