"""Slow, obviously-correct reference implementations used only by the tests.

None of these import the code paths they check: they work from raw
adjacency dictionaries, plain lists of signed letters and nested loops.
"""
from __future__ import annotations

import random
from collections import Counter, deque
from itertools import permutations, product


def adjacency(vertices, edges):
    adj = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def dominates(adj, u, v):
    return adj[v] <= adj[u] | {u}


def components(adj, keep):
    keep = set(keep)
    seen, out = set(), []
    for s in sorted(keep):
        if s in seen:
            continue
        comp, todo = set(), [s]
        while todo:
            x = todo.pop()
            if x in comp:
                continue
            comp.add(x)
            todo.extend(y for y in adj[x] if y in keep)
        seen |= comp
        out.append(frozenset(comp))
    return out


def automorphism_count(vertices, edges):
    es = {frozenset(e) for e in edges}
    count = 0
    for p in permutations(vertices):
        sigma = dict(zip(vertices, p))
        if {frozenset((sigma[u], sigma[v])) for u, v in es} == es:
            count += 1
    return count


def brute_canonical(n, edges):
    """Max upper-triangle bit string over all n! vertex orders."""
    es = {frozenset(e) for e in edges}
    best = -1
    for order in permutations(range(n)):
        code = 0
        for j in range(1, n):
            for i in range(j):
                code = (code << 1) | (frozenset((order[i], order[j])) in es)
        best = max(best, code)
    return best


# ---------------------------------------------------------------------------
# words: letters are (vertex, sign) pairs

def commute(adj, a, b):
    return a[0] == b[0] or b[0] in adj[a[0]]


def rewrite_closure(adj, word, max_states=200_000):
    """Every word reachable by swapping adjacent commuting letters or deleting x x^-1."""
    start = tuple(word)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            nxt = []
            if a[0] == b[0] and a[1] == -b[1]:
                nxt.append(w[:i] + w[i + 2:])
            elif a[0] != b[0] and b[0] in adj[a[0]]:
                nxt.append(w[:i] + (b, a) + w[i + 2:])
            for u in nxt:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
                    if len(seen) > max_states:
                        raise RuntimeError("rewrite closure too large")
    return seen


def letter_key(order):
    pos = {v: i for i, v in enumerate(order)}
    return lambda x: (pos[x[0]], 0 if x[1] > 0 else 1)


def brute_normal_form(adj, order, word):
    """Least (under the letter order) among the shortest words reachable by rewriting."""
    reach = rewrite_closure(adj, word)
    m = min(len(w) for w in reach)
    key = letter_key(order)
    return min((w for w in reach if len(w) == m), key=lambda w: [key(x) for x in w])


def free_reduce(word):
    out = []
    for x in word:
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def abelian_content(word):
    c = Counter()
    for v, s in word:
        c[v] += s
    return {v: e for v, e in c.items() if e}


def shuffle_class(adj, word):
    """All rearrangements obtained by swapping adjacent commuting distinct letters."""
    start = tuple(word)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            if a[0] != b[0] and b[0] in adj[a[0]]:
                u = w[:i] + (b, a) + w[i + 2:]
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return seen


def random_cancel_strategy(adj, word, rng: random.Random):
    """Cancel a randomly chosen cancellable pair until none is left."""
    w = list(word)
    while True:
        pairs = []
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                if w[j][0] == w[i][0]:
                    if w[j][1] == -w[i][1] and all(commute(adj, w[i], w[t]) for t in range(i + 1, j)):
                        pairs.append((i, j))
                    break
        if not pairs:
            return tuple(w)
        i, j = rng.choice(pairs)
        del w[j]
        del w[i]


def right_to_left_strategy(adj, word):
    """Each letter, read from the right, slides right and cancels on contact."""
    out = []
    for x in reversed(word):
        j = 0
        cancelled = False
        while j < len(out):
            y = out[j]
            if y[0] == x[0]:
                if y[1] == -x[1]:
                    del out[j]
                    cancelled = True
                break
            if not commute(adj, x, y):
                break
            j += 1
        if not cancelled:
            out.insert(0, x)
    return tuple(out)


# ---------------------------------------------------------------------------
# matrices as lists of lists

def matmul(A, B):
    n = len(A)
    return [[sum(A[i][t] * B[t][j] for t in range(n)) for j in range(n)] for i in range(n)]


def det(A):
    n = len(A)
    if n == 0:
        return 1
    if n == 1:
        return A[0][0]
    return sum((-1) ** j * A[0][j] * det([r[:j] + r[j + 1:] for r in A[1:]]) for j in range(n))


def centralizer_exhaustive(gens, bound):
    """Every matrix in the box, kept if unimodular and commuting with all gens."""
    n = len(gens[0])
    out = []
    for entries in product(range(-bound, bound + 1), repeat=n * n):
        M = [list(entries[i * n:(i + 1) * n]) for i in range(n)]
        if all(matmul(M, G) == matmul(G, M) for G in gens) and det(M) in (1, -1):
            out.append(tuple(map(tuple, M)))
    return sorted(out)
