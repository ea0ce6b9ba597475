"""Exact integer matrices, the level-2 congruence machinery and centralizers.

Everything here is exact integer (or Fraction) arithmetic; there is no
floating point anywhere in this module.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Sequence

from .errors import CapabilityError, InputError, ParseError, VerificationError, WorkLimitExceeded

DEFAULT_WORK_LIMIT = 10**9


def work_limit() -> int:
    return int(os.environ.get("RAAGKIT_WORK_LIMIT", DEFAULT_WORK_LIMIT))


class IntMatrix:
    """Immutable square matrix of Python ints."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise InputError("matrix must be square")
        self.rows = rows
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def elementary(cls, n: int, i: int, j: int, t: int = 1) -> "IntMatrix":
        """I + t E_ij (0-based)."""
        rows = [[int(a == b) for b in range(n)] for a in range(n)]
        rows[i][j] += t
        return cls(rows)

    @classmethod
    def block_diag(cls, *blocks: "IntMatrix") -> "IntMatrix":
        n = sum(b.dim for b in blocks)
        rows = [[0] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.dim):
                for j in range(b.dim):
                    rows[off + i][off + j] = b.rows[i][j]
            off += b.dim
        return cls(rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __lt__(self, other):
        return self.rows < other.rows

    def __repr__(self):
        return f"IntMatrix({format_matrix(self)!r})"

    def __str__(self):
        return format_matrix(self)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.dim != other.dim:
            raise InputError("dimension mismatch")
        cols = list(zip(*other.rows))
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def __add__(self, other):
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return IntMatrix([[-a for a in r] for r in self.rows])

    def __pow__(self, e: int) -> "IntMatrix":
        base = self if e >= 0 else inverse_unimodular(self)
        e = abs(e)
        result = IntMatrix.identity(self.dim)
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.rows)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self.rows))

    def max_abs(self) -> int:
        return max((abs(x) for r in self.rows for x in r), default=0)

    def is_identity(self) -> bool:
        return all(x == int(i == j) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def commutes_with(self, other: "IntMatrix") -> bool:
        return self @ other == other @ self


def parse_matrix(text: str) -> IntMatrix:
    try:
        rows = [[int(x) for x in row.split()] for row in text.split(";")]
    except ValueError as exc:
        raise ParseError(f"bad matrix entry in {text!r}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParseError(f"matrix {text!r} is not square")
    return IntMatrix(rows)


def format_matrix(M: IntMatrix) -> str:
    return "; ".join(" ".join(str(x) for x in r) for r in M.rows)


def _bareiss_det(rows: list[list[int]]) -> int:
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det(M: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    return _bareiss_det([list(r) for r in M.rows])


def is_unimodular(M: IntMatrix) -> bool:
    return det(M) in (1, -1)


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    d = det(M)
    if d not in (1, -1):
        raise InputError(f"matrix with determinant {d} has no integer inverse")
    n = M.dim
    if n <= 8:
        # adjugate: inv[j][i] = (-1)^(i+j) det(minor_ij) / det
        inv = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [r[:j] + r[j + 1:] for k, r in enumerate(M.rows) if k != i]
                inv[j][i] = (-1) ** (i + j) * _bareiss_det(minor) * d
        return IntMatrix(inv)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
           for i, r in enumerate(M.rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return IntMatrix([[int(x) for x in r[n:]] for r in aug])


def is_level2(M: IntMatrix) -> bool:
    """Unimodular and congruent to the identity mod 2."""
    if any((x - int(i == j)) % 2 for i, r in enumerate(M.rows) for j, x in enumerate(r)):
        return False
    return is_unimodular(M)


# ---------------------------------------------------------------------------
# The block group of 2x2 involutions and the embeddings of the level-2 group

FLIP = IntMatrix([[1, 1], [0, -1]])


def script_L_element(bits: Sequence[int]) -> IntMatrix:
    """Block-diagonal 2l x 2l matrix with block i equal to FLIP if bits[i] else I_2."""
    return IntMatrix.block_diag(*(FLIP if b else IntMatrix.identity(2) for b in bits))


def in_script_L(M: IntMatrix) -> bool:
    if M.dim % 2:
        return False
    l = M.dim // 2
    bits = []
    for i in range(l):
        block = IntMatrix([M.rows[2 * i][2 * i:2 * i + 2], M.rows[2 * i + 1][2 * i:2 * i + 2]])
        if block == FLIP:
            bits.append(1)
        elif block.is_identity():
            bits.append(0)
        else:
            return False
    return M == script_L_element(bits)


def theta(A: IntMatrix) -> IntMatrix:
    """Embed a level-2 matrix into the centralizer of the block involution group.

    Diagonal block (i, i) is [[a, (a-1)/2], [0, 1]] and off-diagonal block
    (i, j) is [[a, a/2], [0, 0]], where a is the corresponding entry of A.
    """
    l = A.dim
    rows = [[0] * (2 * l) for _ in range(2 * l)]
    for i in range(l):
        for j in range(l):
            a = A[i, j]
            if i == j:
                if a % 2 == 0:
                    raise InputError(f"diagonal entry {a} at ({i + 1},{i + 1}) is even")
                rows[2 * i][2 * j], rows[2 * i][2 * j + 1] = a, (a - 1) // 2
                rows[2 * i + 1][2 * j + 1] = 1
            else:
                if a % 2:
                    raise InputError(f"off-diagonal entry {a} at ({i + 1},{j + 1}) is odd")
                rows[2 * i][2 * j], rows[2 * i][2 * j + 1] = a, a // 2
    return IntMatrix(rows)


def xi(i: int, l: int) -> IntMatrix:
    """Block-diagonal matrix with -I_2 in block i (1-based) and I_2 elsewhere."""
    if not 1 <= i <= l:
        raise InputError(f"index {i} outside 1..{l}")
    return IntMatrix.diag([-1 if (t // 2) == i - 1 else 1 for t in range(2 * l)])


def xi_bits(bits: Sequence[int]) -> IntMatrix:
    l = len(bits)
    return IntMatrix.diag([-1 if bits[t // 2] else 1 for t in range(2 * l)])


def theta_xi_decompose(N: IntMatrix) -> tuple[IntMatrix, tuple[int, ...]]:
    """Write N = theta(A) xi(bits); raise if N is not of that form."""
    if N.dim % 2:
        raise InputError("odd dimension")
    l = N.dim // 2
    bits = tuple(int(N[2 * i + 1, 2 * i + 1] == -1) for i in range(l))
    T = N @ xi_bits(bits)
    A = IntMatrix([[T[2 * i, 2 * j] for j in range(l)] for i in range(l)])
    if not is_level2(A) or theta(A) != T:
        raise InputError("matrix is not in the image of theta x xi")
    return A, bits


# ---------------------------------------------------------------------------
# Finite groups of matrices

def generate_group(generators: Sequence[IntMatrix], limit: int = 1 << 16) -> frozenset[IntMatrix]:
    """Closure of a finite matrix group under multiplication."""
    if not generators:
        raise InputError("need at least one generator")
    n = generators[0].dim
    elems = {IntMatrix.identity(n)}
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            for g in generators:
                b = a @ g
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
                    if len(elems) > limit:
                        raise CapabilityError("group larger than the enumeration limit")
        frontier = nxt
    return frozenset(elems)


def bfs_ball(generators: Sequence[IntMatrix], depth: int) -> set[IntMatrix]:
    """Elements expressible as words of length <= depth in the generators and their inverses."""
    n = generators[0].dim
    gens = list(dict.fromkeys(list(generators) + [inverse_unimodular(g) for g in generators]))
    seen = {IntMatrix.identity(n)}
    frontier = list(seen)
    for _ in range(depth):
        nxt = []
        for a in frontier:
            for g in gens:
                b = a @ g
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def finite_order(M: IntMatrix, max_order: int = 24) -> int | None:
    P = M
    for t in range(1, max_order + 1):
        if P.is_identity():
            return t
        P = P @ M
    return None


def has_infinite_order(M: IntMatrix) -> bool:
    """Certified infinite order: some small power is unipotent and not the identity."""
    if finite_order(M) is not None:
        return False
    n = M.dim
    I = IntMatrix.identity(n)
    for e in (1, 2, 3, 4, 6, 12):
        P = M ** e
        if not P.is_identity() and ((P - I) ** n).max_abs() == 0:
            return True
    raise VerificationError("could not decide whether the matrix has finite order")


# ---------------------------------------------------------------------------
# Brute-force centralizer

def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [r for r in rows if any(r)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def commutant_parametrization(generators: Sequence[IntMatrix]):
    """Solve G X = X G for all generators G over Q.

    Returns (free, dependent) where ``free`` lists free entry indices and
    ``dependent`` maps each remaining entry index to (denominator, {free: coeff})
    with integer coefficients: entry = sum(coeff * x_free) / denominator.
    """
    n = generators[0].dim
    nv = n * n
    eqs = []
    for G in generators:
        for r in range(n):
            for c in range(n):
                row = [Fraction(0)] * nv
                for t in range(n):
                    row[t * n + c] += G[r, t]
                    row[r * n + t] -= G[t, c]
                if any(row):
                    eqs.append(row)
    red, pivots = _rref(eqs, nv)
    pivset = set(pivots)
    free = [v for v in range(nv) if v not in pivset]
    dependent = {}
    for row, p in zip(red, pivots):
        coeffs = {f: -row[f] for f in free if row[f] != 0}
        den = lcm(*(q.denominator for q in coeffs.values())) if coeffs else 1
        dependent[p] = (den, {f: int(q * den) for f, q in coeffs.items()})
    return free, dependent


def centralizer_bruteforce(generators: Sequence[IntMatrix], bound: int,
                           limit: int | None = None) -> list[IntMatrix]:
    """All unimodular matrices with entries in [-bound, bound] commuting with every generator.

    The commutant is solved exactly as a linear system; its free entries are
    enumerated over the box.  Entries that are linked neither through a row or
    column of the support pattern nor through the linear system are enumerated
    independently and combined afterwards (the determinant factors over such
    blocks).
    """
    limit = work_limit() if limit is None else limit
    n = generators[0].dim
    free, dependent = commutant_parametrization(generators)
    support = set(free) | {p for p, (_, co) in dependent.items() if co}

    parent = list(range(2 * n))  # nodes: rows 0..n-1, columns n..2n-1

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    for v in support:
        union(v // n, n + v % n)
    for p, (_, co) in dependent.items():
        for f in co:
            union(p // n, f // n)
    units: dict[int, dict] = {}
    for node in range(2 * n):
        u = units.setdefault(find(node), {"rows": [], "cols": []})
        (u["rows"] if node < n else u["cols"]).append(node % n if node >= n else node)
    for u in units.values():
        if len(u["rows"]) != len(u["cols"]):
            return []  # structurally singular
    work = 0
    for u in units.values():
        rows = set(u["rows"])
        u["free"] = [f for f in free if f // n in rows]
        u["dep"] = [p for p in dependent if p // n in rows and p in support]
        work += (2 * bound + 1) ** len(u["free"])
    if work > limit:
        raise WorkLimitExceeded(f"brute force needs {work} candidates, above the limit {limit}")

    rng = range(-bound, bound + 1)
    unit_solutions = []
    for u in units.values():
        sols = []
        ri = {r: a for a, r in enumerate(sorted(u["rows"]))}
        ci = {c: a for a, c in enumerate(sorted(u["cols"]))}
        size = len(ri)
        for values in product(rng, repeat=len(u["free"])):
            assign = dict(zip(u["free"], values))
            ok = True
            for p in u["dep"]:
                den, co = dependent[p]
                num = sum(c * assign[f] for f, c in co.items())
                if num % den:
                    ok = False
                    break
                val = num // den
                if abs(val) > bound:
                    ok = False
                    break
                assign[p] = val
            if not ok:
                continue
            sub = [[0] * size for _ in range(size)]
            for v, val in assign.items():
                sub[ri[v // n]][ci[v % n]] = val
            if _bareiss_det(sub) in (1, -1):
                sols.append(assign)
        if not sols:
            return []
        unit_solutions.append(sols)

    out = []
    for combo in product(*unit_solutions):
        rows = [[0] * n for _ in range(n)]
        for assign in combo:
            for v, val in assign.items():
                rows[v // n][v % n] = val
        out.append(IntMatrix(rows))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Structural centralizer of the inversion action

@dataclass(frozen=True)
class CentralizerDescription:
    """Generators of the centralizer, grouped by the factor they come from.

    ``lambda_part``, ``gl_part`` and ``coupling_part`` together generate the
    image of the lattice part; ``sign_part`` and ``diag_part`` generate the
    finite sign factors.
    """
    l: int
    m: int
    k: int
    lambda_part: tuple[IntMatrix, ...]
    sign_part: tuple[IntMatrix, ...]
    diag_part: tuple[IntMatrix, ...]
    gl_part: tuple[IntMatrix, ...]
    coupling_part: tuple[IntMatrix, ...] = ()
    lattice_rank: int = 0
    congruence_columns: int = 0
    structure: str = ""

    @property
    def lattice_generators(self) -> tuple[IntMatrix, ...]:
        return self.lambda_part + self.gl_part + self.coupling_part

    @property
    def finite_generators(self) -> tuple[IntMatrix, ...]:
        return self.sign_part + self.diag_part

    @property
    def generators(self) -> tuple[IntMatrix, ...]:
        return self.lattice_generators + self.finite_generators

    def ball(self, bound: int, depth: int = 6) -> set[IntMatrix]:
        """Elements with entries in [-bound, bound] reachable within ``depth`` per factor."""
        dim = self.k + self.m - 1
        lattice = bfs_ball(self.lattice_generators, depth) if self.lattice_generators \
            else {IntMatrix.identity(dim)}
        finite = generate_group(self.finite_generators) if self.finite_generators \
            else {IntMatrix.identity(dim)}
        out = set()
        for a in lattice:
            for f in finite:
                M = a @ f
                if M.max_abs() <= bound:
                    out.add(M)
        return out


def lattice_congruence_ok(A: IntMatrix, congruence_columns: int) -> bool:
    """Columns 1..q of A reduce to the unit vectors mod 2."""
    return all((A[i, j] - int(i == j)) % 2 == 0
               for j in range(congruence_columns) for i in range(A.dim))


def embed_centralizer(basis, A: IntMatrix, signs_L: Sequence[int] | None = None,
                      signs_S: Sequence[int] | None = None) -> IntMatrix:
    """The centralizer element acting as A on the span of the chi coordinates.

    ``basis`` is a PCT basis layout (see ``focused_out.PCTBasis``).  A acts on
    chi_1..chi_{k-1}; each tau_i with i <= l is sent to
    (A chi_i - d_i chi_i)/2 + d_i tau_i and each adjacent tau_s to e_s tau_s.
    """
    l, m, k = basis.l, basis.m, basis.k
    n = k - 1
    if A.dim != n:
        raise InputError(f"lattice part must be {n}x{n}")
    dL = list(signs_L) if signs_L is not None else [1] * l
    dS = list(signs_S) if signs_S is not None else [1] * (m - l)
    dim = basis.dim
    cols: list[list[int]] = [[0] * dim for _ in range(dim)]
    for j in range(1, k):
        col = cols[basis.chi_index(j)]
        for i in range(1, k):
            col[basis.chi_index(i)] = A[i - 1, j - 1]
    for i in range(1, l + 1):
        c = basis.chi_coords(i)  # chi_i in the chi_1..chi_{k-1} coordinates
        Ac = A.apply(c)
        col = cols[basis.tau_index(i)]
        for t in range(n):
            diff = Ac[t] - dL[i - 1] * c[t]
            if diff % 2:
                raise InputError("lattice part violates the mod-2 condition")
            col[basis.chi_index(t + 1)] += diff // 2
        col[basis.tau_index(i)] = dL[i - 1]
    for s in range(l + 1, m + 1):
        cols[basis.tau_index(s)][basis.tau_index(s)] = dS[s - l - 1]
    return IntMatrix(zip(*cols))


def build_centralizer(basis, alpha_generators: Sequence[IntMatrix]) -> CentralizerDescription:
    """Generators of the centralizer of the inversion action, each checked to commute."""
    l, m, k = basis.l, basis.m, basis.k
    n = k - 1
    q = min(l, n)
    lam, gl, coup = [], [], []
    if n > 0:
        for i in range(n):
            D = IntMatrix.diag([-1 if t == i else 1 for t in range(n)])
            (lam if i < q else gl).append(D)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                if j < q:
                    # even shear into a congruence column
                    (lam if i < q else coup).append(IntMatrix.elementary(n, i, j, 2))
                else:
                    (gl if i >= q else coup).append(IntMatrix.elementary(n, i, j, 1))
    emb = lambda A: embed_centralizer(basis, A)
    lambda_part = tuple(emb(A) for A in lam)
    gl_part = tuple(emb(A) for A in gl)
    coupling_part = tuple(emb(A) for A in coup)
    sign_part = []
    for i in range(1, l + 1):
        signs = [1] * l
        signs[i - 1] = -1
        if i < k:
            A = IntMatrix.diag([-1 if t == i - 1 else 1 for t in range(n)])
        else:
            A = IntMatrix.identity(n)
        sign_part.append(embed_centralizer(basis, A, signs_L=signs))
    diag_part = []
    for s in range(m - l):
        signs = [1] * (m - l)
        signs[s] = -1
        diag_part.append(embed_centralizer(basis, IntMatrix.identity(n), signs_S=signs))
    desc = CentralizerDescription(
        l=l, m=m, k=k, lambda_part=lambda_part, sign_part=tuple(sign_part),
        diag_part=tuple(diag_part), gl_part=gl_part, coupling_part=coupling_part,
        lattice_rank=n, congruence_columns=q,
        structure=(f"Gamma(rank={n}, level-2 columns={q}) x (Z/2)^{l} x (Z/2)^{m - l}"))
    for M in desc.generators:
        if not is_unimodular(M):
            raise VerificationError(f"centralizer generator {M} is not unimodular")
        for G in alpha_generators:
            if not M.commutes_with(G):
                raise VerificationError(f"centralizer generator {M} does not commute with {G}")
    return desc


def is_alpha_inner(M: IntMatrix, alpha) -> bool:
    """Whether a centralizing matrix lies in the (finite) inversion image."""
    for G in alpha.generators.values():
        if not M.commutes_with(G):
            raise InputError("matrix does not centralize the inversion image")
    return M in alpha.elements


@dataclass
class WitnessReport:
    passed: bool
    t_max: int
    matrix: IntMatrix | None = None
    collision: tuple[int, int] | None = None
    message: str = ""

    def lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        return [f"CBAR_WITNESS {status} t_max={self.t_max} {self.message}".rstrip()]


def infinite_shear(basis) -> IntMatrix:
    """A unipotent lattice element of infinite order, embedded in the centralizer.

    A unit shear into a column free of the mod-2 condition when one exists,
    otherwise an even shear between two congruence columns.
    """
    n = basis.k - 1
    q = min(basis.l, n)
    if n < 2:
        raise CapabilityError("need k >= 3 for an infinite-order lattice witness")
    A = IntMatrix.elementary(n, 0, n - 1, 1) if n > q else IntMatrix.elementary(n, 0, 1, 2)
    return embed_centralizer(basis, A)


def cbar_infinite_witness(basis, alpha, t_max: int, matrix: IntMatrix | None = None) -> WitnessReport:
    """Check that powers 1..t_max of a shear are pairwise distinct and never inner."""
    if basis.k < 3:
        raise CapabilityError("cbar_infinite_witness needs k >= 3")
    M = infinite_shear(basis) if matrix is None else matrix
    seen: dict[IntMatrix, int] = {}
    P = IntMatrix.identity(M.dim)
    for t in range(1, t_max + 1):
        P = P @ M
        if P in alpha.elements:
            return WitnessReport(False, t_max, M, (t, 0), f"power {t} is inner")
        if P in seen:
            return WitnessReport(False, t_max, M, (seen[P], t), f"powers {seen[P]} and {t} coincide")
        seen[P] = t
    return WitnessReport(True, t_max, M, None, "")
