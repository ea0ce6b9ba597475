"""Words in the generators of a right-angled Artin group and their normal forms.

A letter is encoded as a nonzero int: ``i + 1`` for the generator with vertex
index ``i`` and ``-(i + 1)`` for its inverse.  The low-level functions work
on tuples of such ints against the graph's adjacency bitmasks; ``GroupWord``
wraps them with the ambient graph.

Normal form: cancel until minimal length, then take the lexicographically
least member of the shuffle class, letters ordered by vertex index with a
generator before its inverse.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, ParseError
from .graph import SimplicialGraph

Letters = tuple[int, ...]


def _commute(adj: Sequence[int], a: int, b: int) -> bool:
    """Distinct generators commute iff adjacent."""
    i, j = abs(a) - 1, abs(b) - 1
    return bool(adj[i] >> j & 1)


def reduce_letters(adj: Sequence[int], letters: Iterable[int]) -> list[int]:
    """Cancel inverse pairs that commutation can bring together; result has minimal length.

    Each incoming letter slides left past commuting letters; it cancels on
    meeting its inverse and stops at the first letter it does not commute
    with.  Reducedness of the prefix is preserved at every step.
    """
    out: list[int] = []
    for x in letters:
        vx = abs(x) - 1
        mask = adj[vx]
        j = len(out) - 1
        cancelled = False
        while j >= 0:
            y = out[j]
            vy = abs(y) - 1
            if vy == vx:
                if y == -x:
                    del out[j]
                    cancelled = True
                break
            if not mask >> vy & 1:
                break
            j -= 1
        if not cancelled:
            out.append(x)
    return out


def _letter_key(x: int) -> tuple[int, int]:
    return (abs(x) - 1, 0 if x > 0 else 1)


def lex_least_shuffle(adj: Sequence[int], letters: Sequence[int]) -> Letters:
    """Lexicographically least word shuffle-equivalent to a reduced word.

    Greedy: the available first letters are those commuting with everything
    before them; always emit the least of them.
    """
    rest = list(letters)
    out = []
    while rest:
        best = None
        best_pos = -1
        blocked = 0  # vertices seen so far that block later letters
        for pos, x in enumerate(rest):
            v = abs(x) - 1
            # x is available iff every earlier letter commutes with it
            if not blocked & ~adj[v] and not blocked >> v & 1:
                if best is None or _letter_key(x) < _letter_key(best):
                    best, best_pos = x, pos
            blocked |= 1 << v
        out.append(best)
        del rest[best_pos]
    return tuple(out)


def nf_letters(adj: Sequence[int], letters: Iterable[int]) -> Letters:
    return lex_least_shuffle(adj, reduce_letters(adj, letters))


def invert_letters(letters: Sequence[int]) -> Letters:
    return tuple(-x for x in reversed(letters))


@dataclass(frozen=True)
class GroupWord:
    graph: SimplicialGraph
    letters: Letters = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        n = self.graph.n
        for x in self.letters:
            if not isinstance(x, int) or x == 0 or abs(x) > n:
                raise InputError(f"letter {x!r} is not a generator of the ambient group")

    @classmethod
    def parse(cls, graph: SimplicialGraph, text: str) -> "GroupWord":
        return cls(graph, parse_letters(graph, text))

    @classmethod
    def generator(cls, graph: SimplicialGraph, v: str, sign: int = 1) -> "GroupWord":
        return cls(graph, ((graph.index(v) + 1) * sign,))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return format_letters(self.graph, self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return concat(self, other)

    def signed_vertices(self) -> list[tuple[str, int]]:
        return [(self.graph.vertices[abs(x) - 1], 1 if x > 0 else -1) for x in self.letters]


def _check_same(w1: GroupWord, w2: GroupWord):
    if w1.graph is not w2.graph and w1.graph != w2.graph:
        raise InputError("words live in different groups")


def normal_form(w: GroupWord) -> GroupWord:
    return GroupWord(w.graph, nf_letters(w.graph.adjacency_masks(), w.letters))


def words_equal(w1: GroupWord, w2: GroupWord) -> bool:
    _check_same(w1, w2)
    adj = w1.graph.adjacency_masks()
    return nf_letters(adj, w1.letters) == nf_letters(adj, w2.letters)


def support(w: GroupWord) -> frozenset[str]:
    adj = w.graph.adjacency_masks()
    return frozenset(w.graph.vertices[abs(x) - 1] for x in reduce_letters(adj, w.letters))


def concat(w1: GroupWord, w2: GroupWord) -> GroupWord:
    _check_same(w1, w2)
    return GroupWord(w1.graph, nf_letters(w1.graph.adjacency_masks(), w1.letters + w2.letters))


def invert(w: GroupWord) -> GroupWord:
    return GroupWord(w.graph, nf_letters(w.graph.adjacency_masks(), invert_letters(w.letters)))


def parse_letters(graph: SimplicialGraph, text: str) -> Letters:
    out = []
    tokens = text.split()
    if tokens == ["1"]:
        return ()
    for tok in tokens:
        sign = 1
        name = tok
        if tok.endswith("^-1"):
            sign, name = -1, tok[:-3]
        if name not in graph:
            raise ParseError(f"unknown generator {name!r} in word {text!r}")
        out.append((graph.index(name) + 1) * sign)
    return tuple(out)


def format_letters(graph: SimplicialGraph, letters: Sequence[int]) -> str:
    if not letters:
        return "1"
    return " ".join(graph.vertices[abs(x) - 1] + ("" if x > 0 else "^-1") for x in letters)
