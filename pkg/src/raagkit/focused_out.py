"""The model Out(A_G) = Z^(k+m-1) x| I_G for a focused graph G.

Translations are exponent vectors over the basis

    (chi_1, tau_1, ..., chi_l, tau_l, tau_{l+1}, ..., tau_m, chi_{l+1}, ..., chi_{k-1})

where tau_i is the image of the transvection x_i -> c x_i and chi_j that of
the partial conjugation by c on the component P_j.  chi_k is dropped using
chi_1 + ... + chi_k = 0 (their product is conjugation by c).  When k = l the
pair for x_l loses its chi and tau_l opens the run of lone taus.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from . import autos
from .autos import RaagAutomorphism, abelianization_matrix, compose, conjugation
from .errors import ConsistencyError, InputError, NotInPCTError, VerificationError
from .graph import FocusedDecomposition
from .matalg import IntMatrix, generate_group
from .words import invert_letters, nf_letters, reduce_letters


@dataclass(frozen=True)
class PCTBasis:
    """Index bookkeeping for the ordered basis; depends only on (l, m, k)."""
    l: int
    m: int
    k: int

    def __post_init__(self):
        if not (0 <= self.l <= self.m and self.k >= max(self.l, 1)):
            raise InputError(f"invalid shape l={self.l} m={self.m} k={self.k}")

    @cached_property
    def labels(self) -> tuple[tuple[str, int], ...]:
        out = []
        for i in range(1, self.l + 1):
            if i < self.k:
                out.append(("chi", i))
            out.append(("tau", i))
        out += [("tau", i) for i in range(self.l + 1, self.m + 1)]
        out += [("chi", j) for j in range(self.l + 1, self.k)]
        return tuple(out)

    @cached_property
    def _pos(self) -> dict:
        return {lab: p for p, lab in enumerate(self.labels)}

    @property
    def dim(self) -> int:
        return self.k + self.m - 1

    def chi_index(self, j: int) -> int:
        return self._pos[("chi", j)]

    def tau_index(self, i: int) -> int:
        return self._pos[("tau", i)]

    def chi_coords(self, j: int) -> tuple[int, ...]:
        """chi_j in the coordinates chi_1..chi_{k-1}."""
        n = self.k - 1
        if j == self.k:
            return (-1,) * n
        return tuple(int(t == j - 1) for t in range(n))

    def chi_vector(self, j: int) -> tuple[int, ...]:
        """chi_j as a full coordinate vector (chi_k = -(chi_1 + ... + chi_{k-1}))."""
        v = [0] * self.dim
        if j == self.k:
            for t in range(1, self.k):
                v[self.chi_index(t)] = -1
        else:
            v[self.chi_index(j)] = 1
        return tuple(v)

    def tau_vector(self, i: int) -> tuple[int, ...]:
        v = [0] * self.dim
        v[self.tau_index(i)] = 1
        return tuple(v)

    def label_str(self, p: int) -> str:
        kind, i = self.labels[p]
        return f"{kind}{i}"


@dataclass(frozen=True)
class ExponentVector:
    coords: tuple[int, ...]
    basis: PCTBasis

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(x) for x in self.coords))
        if len(self.coords) != self.basis.dim:
            raise InputError(f"need {self.basis.dim} coordinates, got {len(self.coords)}")

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        return ExponentVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.basis)

    def __neg__(self):
        return ExponentVector(tuple(-a for a in self.coords), self.basis)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.coords) + ")"


@dataclass(frozen=True)
class InversionVector:
    bits: tuple[int, ...]

    def __add__(self, other: "InversionVector") -> "InversionVector":
        return InversionVector(tuple(a ^ b for a, b in zip(self.bits, other.bits)))


@dataclass(frozen=True)
class OutElement:
    translation: ExponentVector
    twist: InversionVector


@dataclass
class AlphaImage:
    generators: dict[str, IntMatrix]
    elements: frozenset[IntMatrix]

    @property
    def order(self) -> int:
        return len(self.elements)


# ---------------------------------------------------------------------------

def require_trivial_aut(d: FocusedDecomposition, strict: bool = True) -> None:
    """The Out model assumes Aut(G) trivial; ``strict=False`` still allows the PCT-level computations."""
    if strict and not d.trivial_aut:
        raise InputError("the graph has nontrivial automorphisms; the focused model needs Aut(G) trivial")


class FocusedModel:
    """Word-level generators and cached data for one focused decomposition."""

    def __init__(self, d: FocusedDecomposition):
        self.d = d
        self.g = d.graph
        self.basis = PCTBasis(d.l, d.m, d.k)
        self.adj = self.g.adjacency_masks()
        self.ci = self.g.index(d.c)
        self.x_idx = [self.g.index(x) for x in d.dominated]
        self.reps = [min(self.g.index(v) for v in P) for P in d.Q]
        self._alpha_cache: dict[str, IntMatrix] = {}

    # basic automorphisms
    @cached_property
    def tau(self) -> list[RaagAutomorphism]:
        return [autos.transvection(self.g, self.d.c, x) for x in self.d.dominated]

    @cached_property
    def chi(self) -> list[RaagAutomorphism]:
        return [autos.partial_conjugation(self.g, self.d.c, P) for P in self.d.Q]

    @cached_property
    def iota(self) -> dict[str, RaagAutomorphism]:
        return {v: autos.inversion(self.g, v) for v in self.g.vertices}

    def basis_automorphism(self, p: int) -> RaagAutomorphism:
        kind, i = self.basis.labels[p]
        return self.tau[i - 1] if kind == "tau" else self.chi[i - 1]

    def realize(self, w: ExponentVector | Sequence[int]) -> RaagAutomorphism:
        """An automorphism whose class has exponent vector w."""
        coords = w.coords if isinstance(w, ExponentVector) else tuple(w)
        f = autos.identity(self.g)
        for p, e in enumerate(coords):
            if e:
                f = compose(f, self.basis_automorphism(p) ** e)
        return f

    # exponent vectors
    def exponent_vector(self, f: RaagAutomorphism) -> ExponentVector:
        if f.graph is not self.g and f.graph != self.g:
            raise InputError("automorphism of a different graph")
        M = abelianization_matrix(f)
        n = self.g.n
        allowed = set(self.x_idx)
        for i in range(n):
            for j in range(n):
                expected = int(i == j)
                if i == self.ci and j in allowed:
                    continue
                if M[i, j] != expected:
                    raise NotInPCTError(
                        f"abelianization entry ({self.g.vertices[i]},{self.g.vertices[j]}) = {M[i, j]} "
                        "is not that of a product of transvections by the focus and partial conjugations")
        r = [M[self.ci, j] for j in self.x_idx]
        g = f
        for i, ri in enumerate(r):
            if ri:
                g = compose(g, self.tau[i] ** (-ri))
        k = self.d.k
        s = self._chi_differences(g)
        h = g
        for j in range(k - 1):
            if s[j]:
                h = compose(h, self.chi[j] ** (-s[j]))
        self.find_conjugator(h)  # raises if the residual is not inner
        coords = [0] * self.basis.dim
        for i, ri in enumerate(r):
            coords[self.basis.tau_index(i + 1)] = ri
        for j in range(k - 1):
            coords[self.basis.chi_index(j + 1)] = s[j]
        return ExponentVector(tuple(coords), self.basis)

    def _retracted_conjugator(self, word, keep: set[int], y: int) -> tuple[int, ...]:
        """Free-reduce the retraction of ``word`` to the free group on ``keep``; return u with word = u y u^-1."""
        letters = [x for x in word if abs(x) - 1 in keep]
        red: list[int] = []
        for x in letters:
            if red and red[-1] == -x:
                red.pop()
            else:
                red.append(x)
        L = len(red)
        if L % 2 == 0 or red[L // 2] != y + 1:
            raise ConsistencyError("image of a component representative is not a conjugate of it")
        u = tuple(red[:L // 2])
        if tuple(red[L // 2 + 1:]) != invert_letters(u):
            raise ConsistencyError("image of a component representative is not a conjugate of it")
        return u

    def _chi_differences(self, g: RaagAutomorphism) -> list[int]:
        """s_j - s_k for j < k, read off the images of component representatives."""
        k = self.d.k
        yk = self.reps[k - 1]
        out = []
        for j in range(k - 1):
            yj = self.reps[j]
            keep = {self.ci, yj, yk}
            uj = self._retracted_conjugator(g.images[yj], keep, yj)
            uk = self._retracted_conjugator(g.images[yk], keep, yk)
            cj = sum(1 if x > 0 else -1 for x in uj if abs(x) - 1 == self.ci)
            ck = sum(1 if x > 0 else -1 for x in uk if abs(x) - 1 == self.ci)
            out.append(cj - ck)
        return out

    def find_conjugator(self, h: RaagAutomorphism, max_rounds: int = 10_000) -> tuple[int, ...]:
        """Return q with h = conjugation by q, or raise ConsistencyError."""
        adj = self.adj
        q: list[int] = []
        cur = h
        for _ in range(max_rounds):
            moved = [y for y in range(self.g.n) if cur.images[y] != (y + 1,)]
            if not moved:
                break
            y = moved[0]
            W = cur.images[y]
            a = self._peelable(W)
            if a is None:
                raise ConsistencyError(
                    f"residual automorphism is not inner: image of {self.g.vertices[y]} cannot be peeled")
            q.append(a)
            cur = compose(conjugation(self.g, (-a,)), cur)
        else:
            raise ConsistencyError("conjugator search did not terminate")
        qn = nf_letters(adj, q)
        if conjugation(self.g, qn) != h:
            raise ConsistencyError("reconstructed conjugator does not reproduce the residual")
        return qn

    def _peelable(self, W: tuple[int, ...]) -> int | None:
        """A letter a available at the front of W with a^-1 at the back, shortening a^-1 W a."""
        adj = self.adj
        blocked = 0
        fronts = []
        for x in W:
            v = abs(x) - 1
            if not blocked & ~adj[v] and not blocked >> v & 1:
                fronts.append(x)
            blocked |= 1 << v
        for a in sorted(set(fronts), key=lambda x: (abs(x), x < 0)):
            if len(reduce_letters(adj, (-a,) + W + (a,))) == len(W) - 2:
                return a
        return None

    # alpha
    def alpha_closed_form(self, v: str) -> IntMatrix:
        d = self.d
        if v == d.c:
            return closed_form_alpha(self.basis, "c")
        if v in d.dominated:
            return closed_form_alpha(self.basis, d.dominated.index(v) + 1)
        return IntMatrix.identity(self.basis.dim)

    def alpha_matrix(self, v: str) -> IntMatrix:
        """Matrix of conjugation by the inversion of v, computed from words."""
        if v not in self._alpha_cache:
            self.g.index(v)
            iv = self.iota[v]
            cols = []
            for p in range(self.basis.dim):
                f = compose(iv, compose(self.basis_automorphism(p), iv))
                cols.append(self.exponent_vector(f).coords)
            self._alpha_cache[v] = IntMatrix(zip(*cols))
        return self._alpha_cache[v]

    def alpha_of_bits(self, bits: Sequence[int]) -> IntMatrix:
        M = IntMatrix.identity(self.basis.dim)
        for v, bit in zip(self.g.vertices, bits):
            if bit:
                M = M @ self.alpha_matrix(v)
        return M


def closed_form_alpha(b: PCTBasis, which) -> IntMatrix:
    """alpha of the focus inversion (which == "c") or of the inversion of x_i (which == i)."""
    dim = b.dim
    if which == "c":
        return IntMatrix.diag([-1] * dim)
    i = which
    cols = [list(col) for col in IntMatrix.identity(dim).rows]
    t = b.tau_index(i)
    if i <= b.l:
        cols[t] = [a - e for a, e in zip(b.chi_vector(i), b.tau_vector(i))]
    else:
        cols[t][t] = -1
    return IntMatrix(zip(*cols))


def closed_form_generators(b: PCTBasis) -> list[IntMatrix]:
    """The nontrivial alpha generators for a shape, without reference to a graph."""
    return [closed_form_alpha(b, "c")] + [closed_form_alpha(b, i) for i in range(1, b.m + 1)]


_MODELS: dict[int, tuple[FocusedDecomposition, FocusedModel]] = {}


def model(d: FocusedDecomposition) -> FocusedModel:
    hit = _MODELS.get(id(d))
    if hit is not None and hit[0] is d:
        return hit[1]
    m = FocusedModel(d)
    _MODELS[id(d)] = (d, m)
    return m


def out_rank(d: FocusedDecomposition) -> int:
    return PCTBasis(d.l, d.m, d.k).dim


def exponent_vector(f: RaagAutomorphism, d: FocusedDecomposition) -> ExponentVector:
    return model(d).exponent_vector(f)


def alpha_matrix(v: str, d: FocusedDecomposition, strict: bool = True) -> IntMatrix:
    require_trivial_aut(d, strict)
    M = model(d).alpha_matrix(v)
    expected = model(d).alpha_closed_form(v)
    if M != expected:
        raise VerificationError(f"alpha({v}) computed from words differs from the closed form")
    return M


def relation_family(d: FocusedDecomposition, v: str, label: tuple[str, int]) -> int:
    """Which of the six inversion relations governs (inversion of v, basis element)."""
    kind, i = label
    if v == d.c:
        return 1 if kind == "chi" else 2
    if kind == "chi":
        return 3
    if v == d.x(i):
        return 5 if i <= d.l else 6
    return 4


@dataclass
class RelationReport:
    passed: dict[int, int] = field(default_factory=lambda: {f: 0 for f in range(1, 7)})
    failed: dict[int, int] = field(default_factory=lambda: {f: 0 for f in range(1, 7)})
    witnesses: dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def lines(self) -> list[str]:
        out = []
        for f in range(1, 7):
            if self.failed[f]:
                out.append(f"RELATION {f} FAIL {self.witnesses[f]}")
            else:
                out.append(f"RELATION {f} PASS checks={self.passed[f]}")
        return out


def verify_inversion_relations(d: FocusedDecomposition, alpha=None, strict: bool = True) -> RelationReport:
    """Check every instance of the six relation families at the word level.

    ``alpha`` maps vertices to the expected matrices and defaults to the
    closed forms; pass a corrupted map to exercise the failure path.
    """
    require_trivial_aut(d, strict)
    M = model(d)
    b = M.basis
    rep = RelationReport()
    for v in d.graph.vertices:
        expected = alpha[v] if alpha is not None else M.alpha_closed_form(v)
        iv = M.iota[v]
        for p, label in enumerate(b.labels):
            fam = relation_family(d, v, label)
            got = M.exponent_vector(compose(iv, compose(M.basis_automorphism(p), iv))).coords
            want = expected.column(p)
            if got == want:
                rep.passed[fam] += 1
            else:
                rep.failed[fam] += 1
                rep.witnesses.setdefault(
                    fam, f"inv {v} on {b.label_str(p)}: words give {got}, expected {want}")
    return rep


def pct_inner_test(w: ExponentVector) -> bool:
    return w.is_zero()


def alpha_image(d: FocusedDecomposition, strict: bool = True) -> AlphaImage:
    require_trivial_aut(d, strict)
    gens = {v: alpha_matrix(v, d, strict) for v in d.graph.vertices}
    elements = generate_group(list(gens.values()))
    img = AlphaImage(gens, elements)
    check_alpha_shape(d, img)
    return img


def expected_alpha_order(d: FocusedDecomposition) -> int:
    """2^(m+1), or 2^m when k = 1 (then -I is already a product of the dominated inversions)."""
    return 2 ** d.m if d.k == 1 else 2 ** (d.m + 1)


def check_alpha_shape(d: FocusedDecomposition, img: AlphaImage) -> None:
    """Every element is an involution, elements commute, and each is (up to sign) block diagonal."""
    b = PCTBasis(d.l, d.m, d.k)
    pair_end = len([lab for lab in b.labels if lab[0] == "chi" and lab[1] <= d.l]) + d.l
    gens = list(img.generators.values())
    for A in img.elements:
        if not (A @ A).is_identity():
            raise VerificationError(f"alpha element {A} is not an involution")
        for s in (1, -1):
            B = A if s == 1 else -A
            if _block_shape_ok(b, B, pair_end, d.l):
                break
        else:
            raise VerificationError(f"alpha element {A} is not of the block shape")
    for i, A in enumerate(gens):
        for B in gens[i + 1:]:
            if not A.commutes_with(B):
                raise VerificationError("alpha generators do not commute")
    if len(img.elements) & (len(img.elements) - 1):
        raise VerificationError("alpha image order is not a power of two")


def _block_shape_ok(b: PCTBasis, A: IntMatrix, pair_end: int, l: int) -> bool:
    dim = b.dim
    # D1 spans the first pair_end coordinates; everything after is diagonal
    for i in range(dim):
        for j in range(dim):
            if i >= pair_end or j >= pair_end:
                if i != j and A[i, j]:
                    return False
    for i in range(pair_end, dim):
        if A[i, i] not in (1, -1):
            return False
    third = [p for p, lab in enumerate(b.labels) if lab[0] == "chi" and lab[1] > l]
    if third and len({A[p, p] for p in third}) != 1:
        return False
    return True


# semidirect product

def _check_basis(a: OutElement, b: OutElement):
    if a.translation.basis != b.translation.basis or len(a.twist.bits) != len(b.twist.bits):
        raise InputError("elements of different decompositions")


def out_identity(d: FocusedDecomposition) -> OutElement:
    b = PCTBasis(d.l, d.m, d.k)
    return OutElement(ExponentVector((0,) * b.dim, b), InversionVector((0,) * d.graph.n))


def out_multiply(a: OutElement, b: OutElement, d: FocusedDecomposition) -> OutElement:
    """(u, h)(u', h') = (u + alpha(h) u', h + h')."""
    _check_basis(a, b)
    A = model(d).alpha_of_bits(a.twist.bits)
    moved = A.apply(b.translation.coords)
    t = tuple(x + y for x, y in zip(a.translation.coords, moved))
    return OutElement(ExponentVector(t, a.translation.basis), a.twist + b.twist)


def out_inverse(a: OutElement, d: FocusedDecomposition) -> OutElement:
    A = model(d).alpha_of_bits(a.twist.bits)
    t = tuple(-x for x in A.apply(a.translation.coords))
    return OutElement(ExponentVector(t, a.translation.basis), a.twist)


def out_conjugate(beta: OutElement, w: ExponentVector, d: FocusedDecomposition) -> ExponentVector:
    """Translation part of beta w beta^-1; checked against alpha(twist) w."""
    zero = InversionVector((0,) * len(beta.twist.bits))
    r = out_multiply(out_multiply(beta, OutElement(w, zero), d), out_inverse(beta, d), d)
    if any(r.twist.bits):
        raise VerificationError("conjugate of a translation has a twist")
    direct = model(d).alpha_of_bits(beta.twist.bits).apply(w.coords)
    if r.translation.coords != direct:
        raise VerificationError("conjugation depends on the translation part")
    return r.translation


def bits_for(d: FocusedDecomposition, vertices: Sequence[str]) -> InversionVector:
    vs = set(vertices)
    return InversionVector(tuple(int(v in vs) for v in d.graph.vertices))


def report_lines(d: FocusedDecomposition) -> list[str]:
    rep = verify_inversion_relations(d)
    img = alpha_image(d)
    lines = rep.lines()
    lines.append(f"RANK {out_rank(d)}")
    lines.append(f"ALPHA_ORDER {img.order}")
    if img.order != 2 ** d.graph.n:
        lines.append(f"NOTE alpha image has order {img.order}, not 2^n = {2 ** d.graph.n}")
    return lines


# ---------------------------------------------------------------------------
# Bounded conjugator search (an oracle independent of the exponent-vector test)

def word_ball(g, radius: int) -> list[tuple[int, ...]]:
    """Normal forms of all elements of word length <= radius."""
    adj = g.adjacency_masks()
    letters = [s * (i + 1) for i in range(g.n) for s in (1, -1)]
    seen = {()}
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for x in letters:
                u = nf_letters(adj, w + (x,))
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return sorted(seen, key=lambda w: (len(w), w))


class ConjugatorSearch:
    """Find q of length <= max_len with conjugation by q equal to a given automorphism.

    Meet in the middle: q = q1 q2 with |q1| <= ceil(max_len/2) and
    |q2| <= floor(max_len/2).  Conjugations by second halves are stored in a
    trie keyed by the images of v1, v2, ...; for each first half the
    automorphism (conjugation by q1)^-1 . f is looked up one generator at a
    time.  Automorphisms acting nontrivially on the abelianization are
    rejected up front, since no conjugation does that.
    """

    def __init__(self, g, max_len: int):
        self.g = g
        self.adj = g.adjacency_masks()
        self.left = word_ball(g, (max_len + 1) // 2)
        right = self.left if max_len % 2 == 0 else word_ball(g, max_len // 2)
        self.trie: dict = {}
        for q2 in right:
            qi = invert_letters(q2)
            node = self.trie
            for y in range(g.n):
                key = nf_letters(self.adj, q2 + (y + 1,) + qi)
                node = node.setdefault(key, {})
            node.setdefault("q", q2)

    def search(self, f: RaagAutomorphism) -> tuple[int, ...] | None:
        if not abelianization_matrix(f).is_identity():
            return None
        for q1 in self.left:
            qi = invert_letters(q1)
            node = self.trie
            for y in range(self.g.n):
                node = node.get(nf_letters(self.adj, qi + f.images[y] + q1))
                if node is None:
                    break
            else:
                return nf_letters(self.adj, q1 + node["q"])
        return None
