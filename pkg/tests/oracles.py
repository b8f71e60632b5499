"""Reference computations written independently of the package.

Everything here uses plain lists of Fractions and direct recurrences so
that a bug in the library's packed arithmetic or permutation code cannot
also hide in the expected values.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def convolve(a, b, n_out):
    out = [Fraction(0)] * n_out
    for i, x in enumerate(a[:n_out]):
        if x:
            for j, y in enumerate(b[: n_out - i]):
                out[i + j] += x * y
    return out


def divide(a, b, n_out):
    """Series quotient a / b by long division (b[0] != 0)."""
    a = [Fraction(x) for x in a] + [Fraction(0)] * n_out
    q = []
    for k in range(n_out):
        c = (a[k] - sum(q[j] * b[k - j] for j in range(max(0, k - len(b) + 1), k))) / b[0]
        q.append(c)
    return q


def catalan(n):
    c = [1]
    for k in range(1, n + 1):
        c.append(sum(c[i] * c[k - 1 - i] for i in range(k)))
    return c


def power(a, e, n_out):
    out = [Fraction(1)] + [Fraction(0)] * (n_out - 1)
    for _ in range(e):
        out = convolve(out, a, n_out)
    return out


def faces_alpha_sigma(n, cuts, arcs):
    """Boundary count via cycles of alpha o sigma (the other convention).

    Half-edges are the arc endpoints; sigma rotates left to right on each
    backbone; empty backbones add one face each.
    """
    bounds = [0] + list(cuts) + [n]
    partner = {}
    for i, j in arcs:
        partner[i], partner[j] = j, i
    sigma = {}
    empty = 0
    for k in range(len(bounds) - 1):
        pts = [v for v in range(bounds[k] + 1, bounds[k + 1] + 1) if v in partner]
        if not pts:
            empty += 1
        for a, b in zip(pts, pts[1:] + pts[:1]):
            sigma[a] = b
    seen = set()
    faces = 0
    for h in partner:
        if h in seen:
            continue
        faces += 1
        x = h
        while x not in seen:
            seen.add(x)
            x = partner[sigma[x]]
    return faces + empty


def components(n, cuts, arcs):
    """Connected components of backbones joined by arcs (union-find)."""
    bounds = [0] + list(cuts) + [n]
    owner = {}
    for k in range(len(bounds) - 1):
        for v in range(bounds[k] + 1, bounds[k + 1] + 1):
            owner[v] = k
    parent = list(range(len(bounds) - 1))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for i, j in arcs:
        parent[find(owner[i])] = find(owner[j])
    return len({find(k) for k in range(len(parent))})


def genus_oracle(n, cuts, arcs):
    b = len(cuts) + 1
    r = faces_alpha_sigma(n, cuts, arcs)
    c = components(n, cuts, arcs)
    twog = 2 * c - r - b + len(arcs)
    assert twog % 2 == 0
    return twog // 2


def all_matchings(points):
    if not points:
        yield []
        return
    a = points[0]
    for k in range(1, len(points)):
        rest = points[1:k] + points[k + 1 :]
        for m in all_matchings(rest):
            yield [(a, points[k])] + m


def crossing(a, b):
    (i, j), (k, l) = sorted([a, b])
    return i < k < j < l


def crossing_classes(arcs):
    """Connected components of the crossing graph (arcs as sets)."""
    arcs = list(arcs)
    comp = {a: {a} for a in arcs}
    for a, b in combinations(arcs, 2):
        if crossing(a, b) and comp[a] is not comp[b]:
            merged = comp[a] | comp[b]
            for x in merged:
                comp[x] = merged
    seen = []
    for s in comp.values():
        if not any(s is t for t in seen):
            seen.append(s)
    return seen
