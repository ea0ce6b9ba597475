"""Exhaustive catalog of small connected graphs, classified focused / austere / other.

Canonical forms come from colour refinement followed by an
individualization search over the remaining ties; the representative is
the vertex order maximizing the upper-triangle adjacency bit string.
Automorphisms found along the way prune branches in the same orbit.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CapabilityError, InputError, ParseError
from .graph import (SimplicialGraph, classify_focused, has_trivial_automorphism_group, is_austere,
                    is_connected)

CANON_MAX_N = 10
DEFAULT_MAX_N = 8
FORMAT_TAG = "atlas v1"


def _refine(masks: Sequence[int], colors: list[int]) -> list[int]:
    n = len(masks)
    ncls = len(set(colors))
    while True:
        sigs = []
        for v in range(n):
            m = masks[v]
            nb = sorted(colors[u] for u in range(n) if m >> u & 1)
            sigs.append((colors[v], tuple(nb)))
        order = sorted(set(sigs))
        rank = {s: i for i, s in enumerate(order)}
        new = [rank[s] for s in sigs]
        if len(order) == ncls:
            return new
        colors, ncls = new, len(order)


def _code(masks: Sequence[int], order: Sequence[int]) -> int:
    """Upper-triangle bits, column by column, for the vertex order ``order``."""
    code = 0
    n = len(order)
    for j in range(1, n):
        mj = masks[order[j]]
        for i in range(j):
            code = (code << 1) | (mj >> order[i] & 1)
    return code


def _orbit_of(x: int, autos: list[list[int]], fixed: Sequence[int], n: int) -> set[int]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in autos:
        if all(p[f] == f for f in fixed):
            for v in range(n):
                a, b = find(v), find(p[v])
                if a != b:
                    parent[a] = b
    r = find(x)
    return {v for v in range(n) if find(v) == r}


def canonical_order(masks: Sequence[int]) -> tuple[list[int], int]:
    """Vertex order with the largest code among the leaves of the refinement search, and that code.

    Leaves are closed under isomorphism, so the result is a canonical form,
    though not necessarily the largest code over all n! orders.
    """
    n = len(masks)
    start = _refine(masks, [bin(m).count("1") for m in masks])
    best: list = [None, -1]
    seen_leaves: dict[int, list[int]] = {}
    autos: list[list[int]] = []

    def leaf(colors):
        order = sorted(range(n), key=lambda v: colors[v])
        code = _code(masks, order)
        prev = seen_leaves.get(code)
        if prev is not None:
            perm = [0] * n
            for a, b in zip(prev, order):
                perm[a] = b
            autos.append(perm)
        else:
            seen_leaves[code] = order
        if code > best[1]:
            best[0], best[1] = order, code

    def search(colors, fixed):
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        if len(counts) == n:
            leaf(colors)
            return
        target = min(c for c, k in counts.items() if k > 1)
        cell = [v for v in range(n) if colors[v] == target]
        done: list[int] = []
        for v in cell:
            if any(v in _orbit_of(w, autos, fixed, n) for w in done):
                continue
            # individualize v: split it off just below the rest of its cell
            new = [2 * c + (0 if (c == target and u == v) else 1) for u, c in enumerate(colors)]
            search(_refine(masks, new), fixed + [v])
            done.append(v)

    search(start, [])
    return best[0], best[1]


def _graph_masks(g: SimplicialGraph) -> tuple[int, ...]:
    return g.adjacency_masks()


def canonical_name(i: int) -> str:
    return f"v{i + 1}"


def graph_from_code(n: int, code: int, name: str = "G") -> SimplicialGraph:
    bits = []
    total = n * (n - 1) // 2
    for t in range(total):
        bits.append(code >> (total - 1 - t) & 1)
    edges = []
    t = 0
    for j in range(1, n):
        for i in range(j):
            if bits[t]:
                edges.append((canonical_name(i), canonical_name(j)))
            t += 1
    return SimplicialGraph.from_edges([canonical_name(i) for i in range(n)], edges, name=name)


def canonical_key(g: SimplicialGraph) -> tuple[int, int]:
    if g.n > CANON_MAX_N:
        raise CapabilityError(f"canonical forms are limited to n <= {CANON_MAX_N}")
    _, code = canonical_order(_graph_masks(g))
    return g.n, code


def canonical_form(g: SimplicialGraph) -> SimplicialGraph:
    n, code = canonical_key(g)
    return graph_from_code(n, code, name=g.name)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogRecord:
    n: int
    code: int
    cls: str
    params: str
    flags: tuple[str, ...]

    @property
    def graph(self) -> SimplicialGraph:
        return graph_from_code(self.n, self.code, name=f"n{self.n}_{self.code}")

    def edge_text(self) -> str:
        return ",".join(f"{u}-{v}" for u, v in self.graph.edge_list())

    def line(self) -> str:
        return (f"n={self.n}; edges={self.edge_text()}; class={self.cls}; "
                f"params={self.params}; flags={','.join(self.flags)}")


@dataclass(frozen=True)
class GraphCatalog:
    records: tuple[CatalogRecord, ...]
    maxN: int

    def of_class(self, cls: str) -> list[CatalogRecord]:
        return [r for r in self.records if r.cls == cls]

    def counts(self) -> dict[int, dict[str, int]]:
        out: dict[int, dict[str, int]] = {}
        for r in self.records:
            row = out.setdefault(r.n, {"focused": 0, "austere": 0, "other": 0})
            row[r.cls] += 1
        return out


def classify_record(g: SimplicialGraph) -> tuple[str, str, tuple[str, ...]]:
    degseq = ",".join(str(d) for d in sorted((g.degree(v) for v in g.vertices), reverse=True))
    if g.n == 1:
        return "other", degseq, ("single-vertex",)
    cert = is_austere(g)
    if cert:
        return "austere", degseq, ("trivial-aut",)
    d = classify_focused(g)
    if d:
        flags = ["trivial-aut" if d.trivial_aut else "nontrivial-aut"]
        if d.k == 1:
            flags.append("k=1")
        if len(d.candidates) > 1:
            flags.append(f"foci={len(d.candidates)}")
        return "focused", f"{d.l},{d.m},{d.k}", tuple(flags)
    return "other", degseq, ("trivial-aut" if has_trivial_automorphism_group(g) else "nontrivial-aut",)


def connected_codes(maxN: int) -> dict[int, list[int]]:
    """Canonical codes of all connected graphs with 1..maxN vertices.

    Every connected graph has a vertex whose removal leaves it connected, so
    extending each connected graph by one vertex with a nonempty neighbour
    set reaches every connected graph on one more vertex.
    """
    out = {1: [0]}
    for n in range(2, maxN + 1):
        found = set()
        for code in out[n - 1]:
            base = graph_from_code(n - 1, code).adjacency_masks()
            for S in range(1, 1 << (n - 1)):
                masks = [m | ((S >> i & 1) << (n - 1)) for i, m in enumerate(base)] + [S]
                found.add(canonical_order(masks)[1])
        out[n] = sorted(found)
    return out


def enumerate_catalog(maxN: int = DEFAULT_MAX_N, guard: int = DEFAULT_MAX_N) -> GraphCatalog:
    if maxN < 1:
        raise InputError("maxN must be positive")
    if maxN > guard:
        raise CapabilityError(f"maxN = {maxN} exceeds the enumeration guard {guard}")
    records = []
    for n, codes in connected_codes(maxN).items():
        for code in codes:
            g = graph_from_code(n, code)
            cls, params, flags = classify_record(g)
            records.append(CatalogRecord(n, code, cls, params, flags))
    return GraphCatalog(tuple(records), maxN)


def format_catalog(c: GraphCatalog) -> str:
    lines = [f"{FORMAT_TAG} maxN={c.maxN}"]
    lines += [r.line() for r in c.records]
    lines.append(f"end records={len(c.records)}")
    return "\n".join(lines) + "\n"


def save_catalog(c: GraphCatalog, path) -> None:
    Path(path).write_text(format_catalog(c), encoding="utf-8")


def _parse_record(line: str, lineno: int) -> CatalogRecord:
    fields = {}
    for part in line.split(";"):
        key, sep, val = part.strip().partition("=")
        if not sep:
            raise ParseError(f"malformed field {part.strip()!r}", lineno)
        fields[key] = val
    missing = {"n", "edges", "class", "params", "flags"} - set(fields)
    if missing:
        raise ParseError(f"missing fields {sorted(missing)}", lineno)
    try:
        n = int(fields["n"])
    except ValueError:
        raise ParseError(f"bad vertex count {fields['n']!r}", lineno) from None
    vs = [canonical_name(i) for i in range(n)]
    edges = []
    for e in filter(None, fields["edges"].split(",")):
        u, sep, v = e.partition("-")
        if not sep or u not in vs or v not in vs:
            raise ParseError(f"bad edge {e!r}", lineno)
        edges.append((u, v))
    if fields["class"] not in ("focused", "austere", "other"):
        raise ParseError(f"unknown class {fields['class']!r}", lineno)
    g = SimplicialGraph.from_edges(vs, edges)
    code = _code(g.adjacency_masks(), list(range(n)))
    flags = tuple(filter(None, fields["flags"].split(",")))
    return CatalogRecord(n, code, fields["class"], fields["params"], flags)


def parse_catalog(text: str) -> GraphCatalog:
    lines = text.split("\n")
    if text.endswith("\n"):
        lines = lines[:-1]
    if not lines or not lines[0].startswith("atlas "):
        raise ParseError("missing atlas header", 1)
    head = lines[0].split()
    if " ".join(head[:2]) != FORMAT_TAG:
        raise InputError(f"unsupported catalog version {' '.join(head[:2])!r}; expected {FORMAT_TAG!r}")
    if len(head) != 3 or not head[2].startswith("maxN="):
        raise ParseError("header must be 'atlas v1 maxN=<n>'", 1)
    maxN = int(head[2][5:])
    records = []
    ended = False
    for lineno, line in enumerate(lines[1:], 2):
        if ended:
            raise ParseError("content after end marker", lineno)
        if line.startswith("end records="):
            if int(line.split("=", 1)[1]) != len(records):
                raise ParseError("record count does not match end marker", lineno)
            ended = True
            continue
        records.append(_parse_record(line, lineno))
    if not ended:
        raise ParseError("truncated catalog: missing end marker", len(lines) + 1)
    return GraphCatalog(tuple(records), maxN)


def load_catalog(path) -> GraphCatalog:
    return parse_catalog(Path(path).read_text(encoding="utf-8"))


def check_catalog(c: GraphCatalog) -> list[str]:
    """Re-run the classifiers on every record; return mismatch descriptions."""
    problems = []
    keys = set()
    for r in c.records:
        g = r.graph
        if not is_connected(g):
            problems.append(f"{r.line()}: disconnected")
        key = canonical_key(g)
        if key in keys:
            problems.append(f"{r.line()}: duplicate isomorphism class")
        keys.add(key)
        if classify_record(g) != (r.cls, r.params, r.flags):
            problems.append(f"{r.line()}: classification changed")
    return problems


def records_iter(c: GraphCatalog, cls: str | None = None, trivial_aut: bool | None = None,
                 max_n: int | None = None) -> Iterable[CatalogRecord]:
    for r in c.records:
        if cls is not None and r.cls != cls:
            continue
        if trivial_aut is not None and (("trivial-aut" in r.flags) != trivial_aut):
            continue
        if max_n is not None and r.n > max_n:
            continue
        yield r
