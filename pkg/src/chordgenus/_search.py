"""Pruned depth-first search for shadows of bounded genus.

The kernel is written in the subset of Python that numba compiles; without
numba the same code runs interpreted (slowly).  Vertices are ``1..n``,
``bb[v]`` is the backbone index of ``v`` and ``p[v]`` the partner (0 = free).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def _crosses(i, j, k, l):
    if i < k:
        return k < j < l
    return i < l < j


@njit(cache=True)
def _faces(n, bb, b, p, first, last, nxt, cyc, length, face, wraps):
    """Fill cycle ids, face lengths and the face of each free vertex; return the face count."""
    for k in range(b):
        first[k] = 0
        last[k] = 0
    for v in range(1, n + 1):
        nxt[v] = 0
        cyc[v] = 0
        face[v] = 0
        if p[v]:
            k = bb[v]
            if first[k] == 0:
                first[k] = v
            else:
                nxt[last[k]] = v
            last[k] = v
    for k in range(b):
        if first[k]:
            nxt[last[k]] = first[k]
    r = 0
    for h in range(1, n + 1):
        if p[h] and cyc[h] == 0:
            r += 1
            length[r] = 0
            x = h
            while cyc[x] == 0:
                cyc[x] = r
                length[r] += 1
                x = nxt[p[x]]
    for k in range(b):
        wraps[k] = cyc[first[k]] if first[k] else 0
    # free vertices sit before the next endpoint on their backbone (cyclically)
    for k in range(b):
        cur = cyc[first[k]] if first[k] else 0
        for v in range(n, 0, -1):
            if bb[v] != k:
                continue
            if p[v]:
                cur = cyc[v]
            else:
                face[v] = cur
    empty = 0
    for k in range(b):
        if first[k] == 0:
            empty += 1
            length[r + empty] = 0
            for v in range(1, n + 1):
                if bb[v] == k:
                    face[v] = r + empty
    return r + empty


@njit(cache=True)
def _components(b, bb, ai, aj, depth):
    if b == 1:
        return 1
    for k in range(depth):
        if bb[ai[k]] != bb[aj[k]]:
            return 1
    return 2


@njit(cache=True)
def _partial_ok(n, bb, b, p, ai, aj, depth, frontier, limit, first, last, nxt, cyc, length, face, wraps, freecount):
    for k in range(depth):
        lo = ai[k]
        hi = aj[k]
        crossed = False
        for o in range(depth):
            if o != k and _crosses(lo, hi, ai[o], aj[o]):
                crossed = True
                break
        if crossed:
            continue
        inside = False
        start = lo + 1 if lo + 1 > frontier else frontier
        for v in range(start, hi):
            if p[v] == 0:
                inside = True
                break
        outside = False
        for v in range(hi + 1, n + 1):
            if p[v] == 0:
                outside = True
                break
        if not (inside and outside):
            return False
    r = _faces(n, bb, b, p, first, last, nxt, cyc, length, face, wraps)
    c = _components(b, bb, ai, aj, depth)
    twog = 2 * c - r - b + depth
    if twog > limit:
        return False
    for f in range(r + 1):
        freecount[f] = 0
    for v in range(frontier, n + 1):
        if p[v] == 0:
            freecount[face[v]] += 1
    odd = 0
    for f in range(1, r + 1):
        if freecount[f] % 2:
            odd += 1
    merges = odd // 2 - (c - 1)
    if merges < 0:
        merges = 0
    if twog + 2 * merges > limit:
        return False
    if twog == limit and c == 1:
        for f in range(1, r + 1):
            w = 0
            for k in range(b):
                if wraps[k] == f:
                    w += 1
            if 2 * length[f] < freecount[f] + 6 - 4 * w:
                return False
    return True


@njit(cache=True)
def _twice_genus(n, bb, b, p, ai, aj, depth, first, last, nxt, cyc, length, face, wraps):
    r = _faces(n, bb, b, p, first, last, nxt, cyc, length, face, wraps)
    c = _components(b, bb, ai, aj, depth)
    return 2 * c - r - b + depth


@njit(cache=True)
def _irreducible(ai, aj, m, par):
    for k in range(m):
        par[k] = k
    for x in range(m):
        for y in range(x + 1, m):
            if _crosses(ai[x], aj[x], ai[y], aj[y]):
                rx = x
                while par[rx] != rx:
                    rx = par[rx]
                ry = y
                while par[ry] != ry:
                    ry = par[ry]
                par[rx] = ry
    root = 0
    while par[root] != root:
        root = par[root]
    for k in range(m):
        rk = k
        while par[rk] != rk:
            rk = par[rk]
        if rk != root:
            return False
    return True


@njit(cache=True)
def search_shadows(m, cut, genus):
    """Count shadows with ``m`` arcs and genus exactly ``genus``.

    ``cut < 0`` means one backbone.  Returns an array ``out[irr, cls]`` with
    ``irr`` in {0: all, 1: irreducible} and ``cls`` in {0: A or one
    backbone, 1: B}; two-backbone diagrams are counted only when connected.
    """
    n = 2 * m
    b = 1 if cut < 0 else 2
    bb = np.zeros(n + 2, dtype=np.int64)
    bb1 = np.zeros(n + 2, dtype=np.int64)
    if b == 2:
        for v in range(cut + 1, n + 1):
            bb[v] = 1
    p = np.zeros(n + 2, dtype=np.int64)
    ai = np.zeros(m + 1, dtype=np.int64)
    aj = np.zeros(m + 1, dtype=np.int64)
    first = np.zeros(2, dtype=np.int64)
    last = np.zeros(2, dtype=np.int64)
    nxt = np.zeros(n + 2, dtype=np.int64)
    cyc = np.zeros(n + 2, dtype=np.int64)
    length = np.zeros(n + 4, dtype=np.int64)
    face = np.zeros(n + 2, dtype=np.int64)
    wraps = np.zeros(2, dtype=np.int64)
    freecount = np.zeros(n + 4, dtype=np.int64)
    par = np.zeros(m + 1, dtype=np.int64)
    out = np.zeros((2, 2), dtype=np.int64)
    limit = 2 * genus
    # iterative backtracking: ai[d] is the left end chosen at depth d and
    # aj[d] the partner currently being tried
    depth = 0
    ai[0] = 1
    aj[0] = 1
    while depth >= 0:
        i = ai[depth]
        # undo the previous trial at this depth
        if aj[depth] > i:
            p[i] = 0
            p[aj[depth]] = 0
        j = aj[depth] + 1
        while j <= n:
            if p[j] == 0 and not (
                i > 1 and j < n and p[i - 1] == j + 1 and bb[i - 1] == bb[i] and bb[j] == bb[j + 1]
            ):
                p[i] = j
                p[j] = i
                aj[depth] = j
                f = i + 1
                while f <= n and p[f]:
                    f += 1
                if _partial_ok(n, bb, b, p, ai, aj, depth + 1, f, limit, first, last, nxt, cyc, length, face, wraps, freecount):
                    break
                p[i] = 0
                p[j] = 0
            j += 1
        if j > n:
            aj[depth] = i
            depth -= 1
            continue
        if depth + 1 == m:
            g2 = _twice_genus(n, bb, b, p, ai, aj, m, first, last, nxt, cyc, length, face, wraps)
            conn = _components(b, bb, ai, aj, m) == 1
            if g2 == limit and conn:
                cls = 0
                if b == 2:
                    glued = _twice_genus(n, bb1, 1, p, ai, aj, m, first, last, nxt, cyc, length, face, wraps)
                    if glued != g2:
                        cls = 1
                out[0, cls] += 1
                if _irreducible(ai, aj, m, par):
                    out[1, cls] += 1
            continue
        f = i + 1
        while f <= n and p[f]:
            f += 1
        depth += 1
        ai[depth] = f
        aj[depth] = f
    return out


def shadow_counts(m: int, genus: int, two_backbones: bool) -> dict[str, dict[str, int]]:
    """``{"all": {class: count}, "irreducible": {class: count}}`` over all cuts.

    Class labels are "A"/"B" on two backbones and "" on one.
    """
    out = np.zeros((2, 2), dtype=np.int64)
    if m > 0 and not two_backbones:
        out += search_shadows(m, -1, genus)
    elif m > 0:
        n = 2 * m
        # reversing a diagram maps cut c to n - c and preserves genus and class
        for cut in range(1, m + 1):
            res = search_shadows(m, cut, genus)
            out += res if 2 * cut == n else 2 * res
    labels = ("A", "B") if two_backbones else ("", "")
    result: dict[str, dict[str, int]] = {"all": {}, "irreducible": {}}
    for irr, key in ((0, "all"), (1, "irreducible")):
        for cls in (0, 1):
            if out[irr, cls]:
                result[key][labels[cls]] = int(out[irr, cls])
    return result
