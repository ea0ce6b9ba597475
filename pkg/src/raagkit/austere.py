"""Aut(A_G) = A_G x| I_G for austere G, and the involutions built from phi.

An element is a pair (w, b): w is a word (the inner part, gamma_v standing
for conjugation by v) and b a bit vector of inversions.  The product is
(w, b)(w', b') = (w . b(w'), b + b'), where b(w') inverts every letter of w'
whose vertex bit is set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterator, Sequence

from .autos import conjugation, partial_conjugation
from .errors import InputError, ParseError, VerificationError
from .graph import (SimplicialGraph, dominating_pairs, has_trivial_automorphism_group, is_austere,
                    star_complement_components)
from .words import GroupWord, Letters, invert_letters, nf_letters

Bits = tuple[int, ...]


def invert_flagged(bits: Bits, letters: Letters) -> Letters:
    return tuple(-x if bits[abs(x) - 1] else x for x in letters)


@dataclass(frozen=True)
class AutElement:
    word: Letters
    bits: Bits

    def __str__(self):
        return f"({' '.join(map(str, self.word)) or '1'} | {''.join(map(str, self.bits))})"


class AustereModel:
    """Multiplication in the semidirect model.  ``act`` can be swapped for fault injection."""

    def __init__(self, g: SimplicialGraph, act: Callable[[Bits, Letters], Letters] = invert_flagged,
                 check: bool = True):
        if check:
            cert = is_austere(g)
            if not cert:
                raise InputError(f"precondition: graph must be austere ({cert})")
        self.g = g
        self.n = g.n
        self.adj = g.adjacency_masks()
        self.act = act

    def element(self, word: Sequence[int] = (), bits: Sequence[int] | None = None) -> AutElement:
        b = tuple(bits) if bits is not None else (0,) * self.n
        if len(b) != self.n:
            raise InputError("bit vector has the wrong length")
        return AutElement(nf_letters(self.adj, word), b)

    def identity(self) -> AutElement:
        return self.element()

    def gamma(self, i: int, sign: int = 1) -> AutElement:
        return self.element(((i + 1) * sign,))

    def iota(self, j: int) -> AutElement:
        return self.element((), tuple(int(t == j) for t in range(self.n)))

    def multiply(self, a: AutElement, b: AutElement) -> AutElement:
        w = nf_letters(self.adj, a.word + self.act(a.bits, b.word))
        return AutElement(w, tuple(x ^ y for x, y in zip(a.bits, b.bits)))

    def product(self, *elems: AutElement) -> AutElement:
        out = self.identity()
        for e in elems:
            out = self.multiply(out, e)
        return out

    def inverse(self, a: AutElement) -> AutElement:
        return AutElement(nf_letters(self.adj, invert_letters(self.act(a.bits, a.word))), a.bits)

    def commutator(self, a: AutElement, b: AutElement) -> AutElement:
        return self.product(a, b, self.inverse(a), self.inverse(b))

    def equal(self, a: AutElement, b: AutElement) -> bool:
        return nf_letters(self.adj, a.word) == nf_letters(self.adj, b.word) and a.bits == b.bits

    def is_identity(self, a: AutElement) -> bool:
        return not a.word and not any(a.bits)


def aut_multiply(model: AustereModel, a: AutElement, b: AutElement) -> AutElement:
    return model.multiply(a, b)


def aut_equal(model: AustereModel, a: AutElement, b: AutElement) -> bool:
    return model.equal(a, b)


# ---------------------------------------------------------------------------
# The five relation families

def relation_instances(g: SimplicialGraph):
    """Yield (family, description, relator as a list of (kind, index, sign))."""
    n = g.n
    V = g.vertices
    for i in range(n):
        for k in range(i + 1, n):
            if g.adjacent(V[i], V[k]):
                yield 7, f"[g_{V[i]}, g_{V[k]}]", [("g", i, 1), ("g", k, 1), ("g", i, -1), ("g", k, -1)]
    for j in range(n):
        for l in range(n):
            yield 8, f"[i_{V[j]}, i_{V[l]}]", [("i", j, 1), ("i", l, 1), ("i", j, 1), ("i", l, 1)]
    for j in range(n):
        yield 9, f"i_{V[j]}^2", [("i", j, 1), ("i", j, 1)]
    for i in range(n):
        for j in range(n):
            if i != j:
                yield 10, f"[g_{V[i]}, i_{V[j]}]", [("g", i, 1), ("i", j, 1), ("g", i, -1), ("i", j, 1)]
    for i in range(n):
        yield 11, f"(g_{V[i]} i_{V[i]})^2", [("g", i, 1), ("i", i, 1), ("g", i, 1), ("i", i, 1)]


@dataclass
class FamilyReport:
    families: tuple[int, ...]
    passed: dict[int, int] = field(default_factory=dict)
    failed: dict[int, int] = field(default_factory=dict)
    witnesses: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        for f in self.families:
            self.passed.setdefault(f, 0)
            self.failed.setdefault(f, 0)

    def record(self, fam: int, ok: bool, witness: str):
        if ok:
            self.passed[fam] += 1
        else:
            self.failed[fam] += 1
            self.witnesses.setdefault(fam, witness)

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def lines(self, prefix: str = "FAMILY") -> list[str]:
        out = []
        for f in self.families:
            if self.failed[f]:
                out.append(f"{prefix} {f} FAIL {self.witnesses[f]}")
            else:
                out.append(f"{prefix} {f} PASS checks={self.passed[f]}")
        return out


def _evaluate(model: AustereModel, relator, images) -> AutElement:
    out = model.identity()
    for kind, idx, sign in relator:
        e = images(kind, idx)
        out = model.multiply(out, e if sign > 0 else model.inverse(e))
    return out


def verify_presentation(g: SimplicialGraph, model: AustereModel | None = None) -> FamilyReport:
    model = model or AustereModel(g)
    rep = FamilyReport((7, 8, 9, 10, 11))
    gens = lambda kind, idx: model.gamma(idx) if kind == "g" else model.iota(idx)
    for fam, desc, rel in relation_instances(g):
        val = _evaluate(model, rel, gens)
        rep.record(fam, model.is_identity(val), f"{desc} = {val}")
    return rep


# ---------------------------------------------------------------------------
# phi and Phi

@dataclass(frozen=True)
class PhiFunction:
    """phi(k) for each vertex index k, as a bit vector over the vertices."""
    assignment: tuple[Bits, ...]

    def violations(self, g: SimplicialGraph) -> list[str]:
        out = []
        V = g.vertices
        for k, bits in enumerate(self.assignment):
            if bits[k]:
                out.append(f"condition (i): bit {V[k]} of phi({V[k]}) is set")
            for j, b in enumerate(bits):
                if b and j != k and g.adjacent(V[k], V[j]):
                    out.append(f"condition (ii): bit {V[j]} of phi({V[k]}) is set but {V[k]}, {V[j]} are adjacent")
        return out

    def is_zero(self) -> bool:
        return not any(any(b) for b in self.assignment)


def free_positions(g: SimplicialGraph) -> list[tuple[int, int]]:
    """(k, j) pairs whose bit phi(k)_j is unconstrained, in lexicographic order."""
    V = g.vertices
    return [(k, j) for k in range(g.n) for j in range(g.n)
            if j != k and not g.adjacent(V[k], V[j])]


def phi_exponent(g: SimplicialGraph) -> int:
    return g.n * (g.n - 1) - 2 * len(g.edges)


def count_phi(g: SimplicialGraph) -> int:
    cert = is_austere(g)
    if not cert:
        raise InputError(f"precondition: graph must be austere ({cert})")
    return 2 ** phi_exponent(g)


def enumerate_phi(g: SimplicialGraph, limit: int | None = None) -> Iterator[PhiFunction]:
    cert = is_austere(g)
    if not cert:
        raise InputError(f"precondition: graph must be austere ({cert})")
    pos = free_positions(g)
    n = g.n
    for t, choice in enumerate(product((0, 1), repeat=len(pos))):
        if limit is not None and t >= limit:
            return
        rows = [[0] * n for _ in range(n)]
        for (k, j), b in zip(pos, choice):
            rows[k][j] = b
        yield PhiFunction(tuple(tuple(r) for r in rows))


def parse_phi(g: SimplicialGraph, text: str) -> PhiFunction:
    """Lines ``phi k : j1 j2 ...`` naming the set bits of phi(k) by vertex."""
    rows = [[0] * g.n for _ in range(g.n)]
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        parts = head.split()
        if not sep or len(parts) != 2 or parts[0] != "phi":
            raise ParseError(f"expected 'phi k : j1 j2 ...', got {raw!r}", lineno)
        try:
            k = g.index(parts[1])
            for v in tail.split():
                rows[k][g.index(v)] = 1
        except InputError as exc:
            raise ParseError(str(exc), lineno) from exc
    return PhiFunction(tuple(tuple(r) for r in rows))


def format_phi(g: SimplicialGraph, phi: PhiFunction) -> str:
    V = g.vertices
    return "\n".join(f"phi {V[k]} : " + " ".join(V[j] for j, b in enumerate(bits) if b)
                     for k, bits in enumerate(phi.assignment)) + "\n"


class PhiAutomorphism:
    """Phi(gamma_k) = (v_k, phi(k)), Phi(iota_k) = iota_k, extended multiplicatively."""

    def __init__(self, model: AustereModel, phi: PhiFunction, check: bool = True):
        self.model = model
        self.phi = phi
        if check:
            bad = phi.violations(model.g)
            if bad:
                raise InputError(bad[0])

    def gen_image(self, kind: str, idx: int) -> AutElement:
        m = self.model
        if kind == "g":
            return AutElement(((idx + 1),), self.phi.assignment[idx])
        return m.iota(idx)

    def __call__(self, a: AutElement) -> AutElement:
        m = self.model
        out = m.identity()
        for x in a.word:
            e = self.gen_image("g", abs(x) - 1)
            out = m.multiply(out, e if x > 0 else m.inverse(e))
        return m.multiply(out, AutElement((), a.bits))

    def relation_report(self) -> FamilyReport:
        m = self.model
        rep = FamilyReport((7, 8, 9, 10, 11))
        for fam, desc, rel in relation_instances(m.g):
            val = _evaluate(m, rel, self.gen_image)
            rep.record(fam, m.is_identity(val), f"Phi{desc} = {val}")
        return rep

    def is_involution(self) -> bool:
        m = self.model
        gens = [m.gamma(i) for i in range(m.n)] + [m.iota(j) for j in range(m.n)]
        return all(m.equal(self(self(x)), x) for x in gens)

    def fingerprint(self) -> tuple[Bits, ...]:
        """I_G-projections of the images of the gamma generators."""
        return tuple(self(self.model.gamma(i)).bits for i in range(self.model.n))


def build_phi_automorphism(model: AustereModel, phi: PhiFunction) -> PhiAutomorphism:
    Phi = PhiAutomorphism(model, phi)
    rep = Phi.relation_report()
    if not rep.ok:
        raise VerificationError("Phi does not preserve the relations: " + "; ".join(rep.lines()))
    if not Phi.is_involution():
        raise VerificationError("Phi is not an involution")
    return Phi


@dataclass
class DistinctReport:
    count: int
    classes: int
    non_inner: bool
    composite_checks: int
    composite_failures: int

    @property
    def ok(self) -> bool:
        return self.classes == self.count and self.non_inner and not self.composite_failures

    def lines(self) -> list[str]:
        status = "PASS" if self.ok else "FAIL"
        return [f"PHI_DISTINCT {status} phis={self.count} classes={self.classes} "
                f"composites={self.composite_checks}"]


def phi_distinct_in_out(model: AustereModel, phis: Sequence[PhiFunction],
                        composite_samples: int = 64) -> DistinctReport:
    """Distinct phi give distinct classes in Out(Aut(A_G)).

    Phi_a Phi_b sends gamma_k to an element with I_G-part phi_a(k) + phi_b(k);
    when that is nonzero for some k the composite moves Inn, so is not inner.
    The fingerprint of each Phi is compared directly, and the composite
    formula is checked on a deterministic sample of pairs.
    """
    Phis = [PhiAutomorphism(model, p) for p in phis]
    prints = [P.fingerprint() for P in Phis]
    non_inner = all(any(any(b) for b in fp) for P, fp in zip(Phis, prints) if not P.phi.is_zero())
    failures = 0
    checks = 0
    N = len(Phis)
    if N > 1:
        step = max(1, (N * N) // composite_samples)
        for t in range(0, N * N, step):
            a, b = divmod(t, N)
            A, B = Phis[a], Phis[b]
            for i in range(model.n):
                img = A(B(model.gamma(i)))
                want = tuple(x ^ y for x, y in zip(A.phi.assignment[i], B.phi.assignment[i]))
                checks += 1
                if img.bits != want:
                    failures += 1
            if a != b and prints[a] == prints[b]:
                failures += 1
    return DistinctReport(len(phis), len(set(prints)), non_inner, checks, failures)


@dataclass
class InventoryReport:
    transvections: int
    proper_partial_conjugations: int
    graph_automorphisms_trivial: bool

    @property
    def ok(self) -> bool:
        return not self.transvections and not self.proper_partial_conjugations \
            and self.graph_automorphisms_trivial


def generator_inventory(g: SimplicialGraph) -> InventoryReport:
    """Count the Laurence-Servatius generators that would survive in Out(A_G)."""
    transvections = len(dominating_pairs(g))
    proper = 0
    for v in g.vertices:
        for P in star_complement_components(g, v):
            if partial_conjugation(g, v, P) != conjugation(g, (g.index(v) + 1,)):
                proper += 1
    return InventoryReport(transvections, proper, has_trivial_automorphism_group(g))


def count_phi_per_index(g: SimplicialGraph) -> int:
    """Exhaustive count: for each k try all 2^n bit vectors against (i)/(ii), then multiply.

    The conditions constrain each phi(k) separately, so the product is the
    number of admissible phi.
    """
    n = g.n
    total = 1
    for k in range(n):
        good = 0
        for mask in range(1 << n):
            bits = [mask >> j & 1 for j in range(n)]
            row = [bits if t == k else [0] * n for t in range(n)]
            if not PhiFunction(tuple(tuple(r) for r in row)).violations(g):
                good += 1
        total *= good
    return total


def sample_phis(g: SimplicialGraph, prefix: int = 256) -> list[PhiFunction]:
    """The first ``prefix`` phi in lexicographic order plus every single-bit phi."""
    out = list(enumerate_phi(g, limit=prefix))
    seen = set(out)
    n = g.n
    for k, j in free_positions(g):
        rows = [[0] * n for _ in range(n)]
        rows[k][j] = 1
        p = PhiFunction(tuple(tuple(r) for r in rows))
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def report_lines(g: SimplicialGraph, enumerate_limit_exponent: int = 20,
                 distinct_limit_exponent: int = 12, sample_prefix: int = 256) -> tuple[list[str], bool]:
    """Full austere verification; returns (lines, all passed)."""
    model = AustereModel(g)
    lines = []
    ok = True
    pres = verify_presentation(g, model)
    lines += pres.lines()
    ok &= pres.ok
    inv = generator_inventory(g)
    lines.append(f"INVENTORY {'PASS' if inv.ok else 'FAIL'} transvections={inv.transvections} "
                 f"proper_partial_conjugations={inv.proper_partial_conjugations}")
    ok &= inv.ok
    e = phi_exponent(g)
    cnt = count_phi(g)
    n = g.n
    maxdeg = max(g.degree(v) for v in g.vertices)
    bound_n = cnt >= 2 ** n
    bound_valence = cnt >= 2 ** (n * (n - maxdeg - 1))
    lines.append(f"COUNT_PHI {cnt} exponent={e}")
    lines.append(f"BOUND 2^n {'PASS' if bound_n else 'FAIL'}")
    lines.append(f"BOUND 2^(n(n-k-1)) {'PASS' if bound_valence else 'FAIL'} k={maxdeg}")
    ok &= bound_n and bound_valence
    if e <= enumerate_limit_exponent:
        enumerated = sum(1 for _ in enumerate_phi(g))
        match = enumerated == cnt
        lines.append(f"ENUMERATION {'PASS' if match else 'FAIL'} {enumerated}")
    else:
        enumerated = count_phi_per_index(g)
        match = enumerated == cnt
        lines.append(f"ENUMERATION_PER_INDEX {'PASS' if match else 'FAIL'} {enumerated}")
    ok &= match
    phis = list(enumerate_phi(g)) if e <= distinct_limit_exponent else sample_phis(g, sample_prefix)
    bad = 0
    for p in phis:
        P = PhiAutomorphism(model, p)
        if not (P.relation_report().ok and P.is_involution()):
            bad += 1
    scope = "all" if e <= distinct_limit_exponent else "sample"
    lines.append(f"PHI_VALID {'PASS' if not bad else 'FAIL'} checked={len(phis)} ({scope})")
    dist = phi_distinct_in_out(model, phis)
    lines += dist.lines()
    ok &= not bad and dist.ok
    return lines, ok
