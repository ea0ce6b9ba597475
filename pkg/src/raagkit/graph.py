"""Simplicial graphs: local structure, domination, focused/austere classification.

Vertices are opaque string tokens.  The order in which they are given at
construction is the canonical order used for every tie-break downstream
(component ordering, normal forms, matrix row/column order).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import CapabilityError, ConstructionError, InputError, ParseError

DEFAULT_AUT_BOUND = 10


@dataclass(frozen=True)
class SimplicialGraph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]
    name: str = "G"
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _adj: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        object.__setattr__(self, "vertices", vertices)
        index = {}
        for i, v in enumerate(vertices):
            if not isinstance(v, str) or not v or any(ch.isspace() for ch in v):
                raise InputError(f"invalid vertex identifier {v!r}")
            if v in index:
                raise InputError(f"duplicate vertex {v!r}")
            index[v] = i
        adj = [0] * len(vertices)
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise InputError(f"self-loop or malformed edge {sorted(e)}")
            u, v = tuple(e)
            if u not in index or v not in index:
                raise InputError(f"edge {sorted(e)} mentions an unknown vertex")
            adj[index[u]] |= 1 << index[v]
            adj[index[v]] |= 1 << index[u]
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_adj", tuple(adj))

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[Sequence[str]], name: str = "G"):
        return cls(tuple(vertices), frozenset(frozenset(e) for e in edges), name)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise InputError(f"unknown vertex {v!r}") from None

    def __contains__(self, v) -> bool:
        return v in self._index

    def adjacent(self, u: str, v: str) -> bool:
        return bool(self._adj[self.index(u)] >> self.index(v) & 1)

    def adjacency_masks(self) -> tuple[int, ...]:
        """Neighbour bitmask per vertex index."""
        return self._adj

    def degree(self, v: str) -> int:
        return bin(self._adj[self.index(v)]).count("1")

    def sort_vertices(self, vs: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(vs, key=self.index))

    def edge_list(self) -> list[tuple[str, str]]:
        """Edges as (u, v) pairs with u before v, sorted canonically."""
        out = []
        for e in self.edges:
            u, v = sorted(e, key=self.index)
            out.append((u, v))
        out.sort(key=lambda p: (self.index(p[0]), self.index(p[1])))
        return out

    def induced(self, vs: Iterable[str]) -> "SimplicialGraph":
        keep = set(vs)
        verts = tuple(v for v in self.vertices if v in keep)
        return SimplicialGraph(verts, frozenset(e for e in self.edges if e <= keep), self.name)

    def relabel(self, mapping: dict, order: Sequence[str] | None = None) -> "SimplicialGraph":
        verts = tuple(order) if order is not None else tuple(mapping[v] for v in self.vertices)
        return SimplicialGraph(
            verts, frozenset(frozenset(mapping[x] for x in e) for e in self.edges), self.name)

    def _mask_to_set(self, mask: int) -> frozenset[str]:
        return frozenset(self.vertices[i] for i in range(self.n) if mask >> i & 1)

    def _components_of_mask(self, mask: int) -> list[int]:
        comps = []
        remaining = mask
        while remaining:
            low = remaining & -remaining
            comp = frontier = low
            while frontier:
                nxt = 0
                m = frontier
                while m:
                    b = m & -m
                    nxt |= self._adj[b.bit_length() - 1]
                    m ^= b
                nxt &= mask & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            remaining &= ~comp
        return comps


def link(g: SimplicialGraph, v: str) -> frozenset[str]:
    return g._mask_to_set(g._adj[g.index(v)])


def star(g: SimplicialGraph, v: str) -> frozenset[str]:
    return link(g, v) | {v}


def dominates(g: SimplicialGraph, u: str, v: str) -> bool:
    """True iff lk(v) is contained in st(u).  Every vertex dominates itself."""
    iu, iv = g.index(u), g.index(v)
    star_u = g._adj[iu] | (1 << iu)
    return g._adj[iv] & ~star_u == 0


def dominating_pairs(g: SimplicialGraph) -> list[tuple[str, str]]:
    """All ordered pairs (u, v), u != v, with v <= u."""
    return [(u, v) for u in g.vertices for v in g.vertices if u != v and dominates(g, u, v)]


def _component_sort_key(g: SimplicialGraph, comp: frozenset[str]):
    return (len(comp) > 1, min(g.index(x) for x in comp))


def star_complement_components(g: SimplicialGraph, v: str) -> list[frozenset[str]]:
    """Connected components of the graph with st(v) removed.

    Singletons come first, then larger components, each group ordered by its
    least vertex.
    """
    i = g.index(v)
    full = (1 << g.n) - 1
    mask = full & ~(g._adj[i] | (1 << i))
    comps = [g._mask_to_set(c) for c in g._components_of_mask(mask)]
    return sorted(comps, key=lambda c: _component_sort_key(g, c))


def is_connected(g: SimplicialGraph) -> bool:
    if g.n == 0:
        return True
    return len(g._components_of_mask((1 << g.n) - 1)) == 1


def diameter(g: SimplicialGraph) -> int | None:
    """Graph diameter, or None when disconnected."""
    best = 0
    for s in range(g.n):
        seen = 1 << s
        frontier = seen
        depth = 0
        while True:
            nxt = 0
            m = frontier
            while m:
                b = m & -m
                nxt |= g._adj[b.bit_length() - 1]
                m ^= b
            nxt &= ~seen
            if not nxt:
                break
            depth += 1
            seen |= nxt
            frontier = nxt
        if seen != (1 << g.n) - 1:
            return None
        best = max(best, depth)
    return best


# ---------------------------------------------------------------------------
# Graph automorphisms

def _refine_colors(g: SimplicialGraph, colors: list[int]) -> list[int]:
    """Colour refinement to a stable partition; colours are renumbered canonically."""
    n = g.n
    while True:
        sigs = []
        for i in range(n):
            m = g._adj[i]
            neigh = sorted(colors[j] for j in range(n) if m >> j & 1)
            sigs.append((colors[i], tuple(neigh)))
        ranking = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _automorphisms(g: SimplicialGraph) -> Iterator[tuple[int, ...]]:
    """Yield automorphisms as index permutations (image of vertex i at slot i), identity first."""
    n = g.n
    if n == 0:
        yield ()
        return
    colors = _refine_colors(g, [0] * n)
    adj = g._adj
    order = sorted(range(n), key=lambda i: (sum(1 for c in colors if c == colors[i]), i))
    image = [-1] * n
    used = [False] * n

    def extend(pos: int):
        if pos == n:
            yield tuple(image)
            return
        v = order[pos]
        # identity candidate first, so the identity is the first permutation yielded
        cands = [v] + [u for u in range(n) if u != v]
        for u in cands:
            if used[u] or colors[u] != colors[v]:
                continue
            ok = True
            for q in range(pos):
                w = order[q]
                if bool(adj[v] >> w & 1) != bool(adj[u] >> image[w] & 1):
                    ok = False
                    break
            if not ok:
                continue
            image[v] = u
            used[u] = True
            yield from extend(pos + 1)
            used[u] = False
            image[v] = -1

    yield from extend(0)


def graph_automorphism_group(g: SimplicialGraph, bound: int = DEFAULT_AUT_BOUND) -> list[dict[str, str]]:
    """All adjacency-preserving vertex permutations, identity first."""
    if g.n > bound:
        raise CapabilityError(
            f"graph has {g.n} vertices, above the enumeration bound {bound}; use a smaller graph")
    return [{g.vertices[i]: g.vertices[p[i]] for i in range(g.n)} for p in _automorphisms(g)]


def nontrivial_automorphism(g: SimplicialGraph) -> dict[str, str] | None:
    """Some non-identity automorphism, or None if Aut(g) is trivial.  No size bound."""
    it = _automorphisms(g)
    next(it)
    for p in it:
        return {g.vertices[i]: g.vertices[p[i]] for i in range(g.n)}
    return None


def has_trivial_automorphism_group(g: SimplicialGraph) -> bool:
    return nontrivial_automorphism(g) is None


# ---------------------------------------------------------------------------
# Classification

@dataclass(frozen=True)
class Refusal:
    """A negative classification: which condition failed and on what witness."""
    condition: str
    message: str
    witness: tuple = ()

    def __bool__(self):
        return False

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class FocusedDecomposition:
    graph: SimplicialGraph
    c: str
    L: tuple[str, ...]
    S: tuple[str, ...]
    Q: tuple[frozenset[str], ...]
    trivial_aut: bool
    candidates: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def l(self) -> int:
        return len(self.L)

    @property
    def m(self) -> int:
        return len(self.L) + len(self.S)

    @property
    def k(self) -> int:
        return len(self.Q)

    @property
    def rank(self) -> int:
        return self.k + self.m - 1

    @property
    def dominated(self) -> tuple[str, ...]:
        """x_1, ..., x_m in order."""
        return self.L + self.S

    def x(self, i: int) -> str:
        """1-based access to x_i."""
        return self.dominated[i - 1]

    def P(self, j: int) -> frozenset[str]:
        """1-based access to the component P_j."""
        return self.Q[j - 1]

    def __bool__(self):
        return True


def classify_focused(g: SimplicialGraph) -> FocusedDecomposition | Refusal:
    if g.n == 0:
        raise InputError("empty graph")
    pairs = dominating_pairs(g)
    dominators = sorted({u for u, _ in pairs}, key=g.index)
    if len(dominators) > 1:
        mutual = [(u, v) for u, v in pairs if (v, u) in set(pairs)]
        if mutual:
            u, v = mutual[0]
            return Refusal("domination", f"not focused: mutual domination {u}<->{v}", (u, v))
        u1, u2 = dominators[:2]
        w1 = next(v for u, v in pairs if u == u1)
        w2 = next(v for u, v in pairs if u == u2)
        return Refusal("domination",
                       f"not focused: two distinct dominators ({w1}<={u1}, {w2}<={u2})",
                       ((u1, w1), (u2, w2)))
    candidates = dominators if dominators else list(g.vertices)
    disconnecting = {v: star_complement_components(g, v) for v in g.vertices}
    valid = []
    failure = None
    for c in candidates:
        bad = [v for v in g.vertices if v != c and len(disconnecting[v]) > 1]
        if bad:
            failure = failure or Refusal(
                "star", f"not focused at {c}: star of {bad[0]} disconnects the graph",
                (c, bad[0]))
            continue
        if not disconnecting[c]:
            failure = failure or Refusal(
                "degenerate", f"not focused at {c}: degenerate (k = 0, {c} is adjacent to every vertex)",
                (c,))
            continue
        valid.append(c)
    if not valid:
        return failure
    c = valid[0]
    dominated = [v for u, v in pairs if u == c]
    L = g.sort_vertices(v for v in dominated if not g.adjacent(c, v))
    S = g.sort_vertices(v for v in dominated if g.adjacent(c, v))
    Q = tuple(disconnecting[c])
    notes = []
    if len(valid) > 1:
        notes.append(f"{len(valid)} candidate foci: {' '.join(valid)}")
    if len(Q) == 1:
        notes.append("k = 1: the star of the focus does not disconnect the graph")
    singletons = [next(iter(P)) for P in Q if len(P) == 1]
    if tuple(singletons) != L:
        raise AssertionError("singleton components must coincide with L")
    return FocusedDecomposition(
        graph=g, c=c, L=L, S=S, Q=Q,
        trivial_aut=has_trivial_automorphism_group(g),
        candidates=tuple(valid), notes=tuple(notes))


@dataclass(frozen=True)
class AustereCertificate:
    graph: SimplicialGraph
    maxDegree: int
    diameter: int | None

    def __bool__(self):
        return True


def is_austere(g: SimplicialGraph) -> AustereCertificate | Refusal:
    if g.n == 0:
        raise InputError("empty graph")
    sigma = nontrivial_automorphism(g)
    if sigma is not None:
        moved = {v: w for v, w in sigma.items() if v != w}
        desc = " ".join(f"{v}->{w}" for v, w in moved.items())
        return Refusal("automorphism", f"not austere: automorphism ({desc})", (sigma,))
    pairs = dominating_pairs(g)
    if pairs:
        u, v = pairs[0]
        return Refusal("domination", f"not austere: {v} is dominated by {u}", (u, v))
    for v in g.vertices:
        comps = star_complement_components(g, v)
        if len(comps) > 1:
            return Refusal("star", f"not austere: star of {v} disconnects the graph", (v, tuple(comps)))
    max_deg = max(g.degree(v) for v in g.vertices)
    return AustereCertificate(g, max_deg, diameter(g))


# ---------------------------------------------------------------------------
# Construction of focused test graphs

def asymmetric_tree(prefix: str = "t") -> SimplicialGraph:
    """The 7-vertex spider with legs of length 1, 2 and 3 (smallest asymmetric tree)."""
    vs = [f"{prefix}{i}" for i in range(7)]
    edges = [(vs[0], vs[1]), (vs[0], vs[2]), (vs[2], vs[3]),
             (vs[0], vs[4]), (vs[4], vs[5]), (vs[5], vs[6])]
    return SimplicialGraph.from_edges(vs, edges, name=prefix)


def build_focused(l: int, m: int, component_shapes: Sequence[SimplicialGraph] = (),
                  seed: int = 0, attempts: int = 400) -> SimplicialGraph:
    """Propose random focused graphs with the requested shape until one verifies.

    The result is focused at vertex ``c`` with ``l`` non-adjacent dominated
    vertices, ``m - l`` adjacent ones, one component per entry of
    ``component_shapes`` and a trivial automorphism group.
    """
    if l < 0 or m < l:
        raise InputError("need 0 <= l <= m")
    shapes = list(component_shapes)
    for s in shapes:
        if s.n < 2 or not is_connected(s):
            raise InputError("component shapes must be connected with at least two vertices")
    k = l + len(shapes)
    if k < 2:
        raise ConstructionError(
            f"requested k = {k}: a symmetry-free focused layout needs k >= 2")
    hubs = max(3, (l + m + len(shapes)).bit_length() + 2)
    for attempt in range(attempts):
        rng = random.Random(seed * 1_000_003 + attempt)
        if attempt % 2 == 0:
            g = _propose_structured(rng, l, m, shapes, hubs + attempt // 200)
        else:
            g = _propose_loose(rng, l, m, shapes, hubs)
        d = classify_focused(g)
        if d and d.c == "c" and (d.l, d.m, d.k) == (l, m, k) and d.trivial_aut:
            return g
    raise ConstructionError(f"no focused graph with l={l} m={m} k={k} found in {attempts} attempts")


def _skeleton(l, m, shapes, hubs):
    L = [f"x{i}" for i in range(1, l + 1)]
    S = [f"x{i}" for i in range(l + 1, m + 1)]
    H = [f"h{i}" for i in range(1, hubs + 1)]
    comps = []
    edges = []
    for j, shape in enumerate(shapes, start=1):
        ren = {v: f"p{j}_{i}" for i, v in enumerate(shape.vertices)}
        comps.append([ren[v] for v in shape.vertices])
        edges.extend(tuple(ren[x] for x in e) for e in shape.edges)
    edges += [("c", v) for v in S + H]
    return L, S, H, comps, edges


def _assemble(l, m, shapes, L, S, H, comps, edges) -> SimplicialGraph:
    verts = ["c"] + L + S + H + [v for comp in comps for v in comp]
    return SimplicialGraph.from_edges(verts, edges, name=f"focused_l{l}_m{m}_k{l + len(shapes)}")


def _propose_structured(rng: random.Random, l: int, m: int, shapes, hubs: int) -> SimplicialGraph:
    """Independent hubs; x_i get distinct equal-size hub sets, component vertices two hubs each."""
    L, S, H, comps, edges = _skeleton(l, m, shapes, hubs)
    # distinct equal-size hub sets keep the links of x_1..x_m an antichain
    hub_sets = rng.sample(list(combinations(H, len(H) // 2)), len(L) + len(S))
    for x, nb in zip(L + S, hub_sets):
        edges += [(x, h) for h in nb]
    for comp in comps:
        for v in comp:
            edges += [(v, h) for h in rng.sample(H, 2)]
    return _assemble(l, m, shapes, L, S, H, comps, edges)


def _propose_loose(rng: random.Random, l: int, m: int, shapes, max_hubs: int) -> SimplicialGraph:
    """Random hub count and densities; finds the small shapes the structured layout misses."""
    L, S, H, comps, edges = _skeleton(l, m, shapes, rng.randint(2, max_hubs))
    p_hub, p_s = rng.random() * 0.6, rng.random() * 0.6
    edges += [(a, b) for a, b in combinations(H, 2) if rng.random() < p_hub]
    edges += [(a, b) for a, b in combinations(S, 2) if rng.random() < p_s]
    edges += [(a, b) for a in S for b in H if rng.random() < 0.4]
    for x in L:
        edges += [(x, h) for h in rng.sample(H, rng.randint(1, len(H)))]
    for comp in comps:
        for v in comp:
            edges += [(v, h) for h in rng.sample(H, rng.randint(0, min(3, len(H))))]
        if not any(a in comp and b in H for a, b in edges):
            edges.append((rng.choice(comp), rng.choice(H)))
    return _assemble(l, m, shapes, L, S, H, comps, edges)


# ---------------------------------------------------------------------------
# Text format

def parse_graph(text: str) -> SimplicialGraph:
    name = None
    vertices: list[str] = []
    seen_edges: set[frozenset[str]] = set()
    vset: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "graph":
            if name is not None:
                raise ParseError("second 'graph' header", lineno)
            if len(parts) != 2:
                raise ParseError("expected 'graph <name>'", lineno)
            name = parts[1]
        elif kw == "vertex":
            if len(parts) != 2:
                raise ParseError("expected 'vertex <id>'", lineno)
            if parts[1] in vset:
                raise ParseError(f"duplicate vertex {parts[1]}", lineno)
            vertices.append(parts[1])
            vset.add(parts[1])
        elif kw == "edge":
            if len(parts) != 3:
                raise ParseError("expected 'edge <id> <id>'", lineno)
            u, v = parts[1], parts[2]
            if u == v:
                raise ParseError(f"self-loop at {u}", lineno)
            for x in (u, v):
                if x not in vset:
                    raise ParseError(f"edge mentions undeclared vertex {x}", lineno)
            e = frozenset((u, v))
            if e in seen_edges:
                raise ParseError(f"duplicate edge {u} {v}", lineno)
            seen_edges.add(e)
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno)
        if name is None:
            raise ParseError("file must start with 'graph <name>'", lineno)
    if name is None:
        raise ParseError("missing 'graph <name>' header")
    return SimplicialGraph(tuple(vertices), frozenset(seen_edges), name)


def format_graph(g: SimplicialGraph) -> str:
    lines = [f"graph {g.name}"]
    lines += [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {u} {v}" for u, v in g.edge_list()]
    return "\n".join(lines) + "\n"


def load_graph(path) -> SimplicialGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())
