"""Chord diagrams over one or two backbones and their topology.

A :class:`Diagram` lives on the vertices ``1..n``; ``cuts`` lists the last
vertex of every backbone but the final one, so ``cuts=()`` is one backbone
and ``cuts=(k,)`` splits the vertices into ``1..k`` and ``k+1..n``.  Empty
backbones are allowed (repeated or extreme cut values).

Topology uses the polygonal model: each backbone collapses to a vertex whose
rotation ``sigma`` visits the arc endpoints on that backbone left to right
and wraps around; ``alpha`` swaps the two ends of every arc.  Boundary
components are the cycles of ``sigma o alpha`` (first jump along the arc,
then rotate), plus one for every backbone carrying no arc endpoint.  For a
diagram with ``c`` connected components, ``b`` backbones and ``n`` arcs the
genus summed over components is ``(2c - r - b + n)/2``; for ``c = 1`` this is
the Euler relation ``2 - 2g - r = b - n``.

Two arcs ``(i,j)``, ``(k,l)`` with ``i < k`` cross iff ``i < k < j < l`` in the
left-to-right layout of all vertices, irrespective of backbones.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Sequence

from ._search import shadow_counts
from .errors import CapExceeded, Disconnected, InconsistentSystem, NotConnected, WrongBackboneCount

Arc = tuple[int, int]

MODES = ("matchings_1bb", "matchings_2bb", "shadows_1bb", "shadows_2bb")


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class Diagram:
    n: int
    cuts: tuple[int, ...] = ()
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self):
        arcs = tuple(sorted((min(a), max(a)) for a in self.arcs))
        cuts = tuple(self.cuts)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "cuts", cuts)
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        prev = 0
        for c in cuts:
            if not prev <= c <= self.n:
                raise ValueError(f"cut positions must be nondecreasing within 0..{self.n}: {cuts}")
            prev = c
        seen = set()
        for i, j in arcs:
            if not 1 <= i < j <= self.n:
                raise ValueError(f"arc {(i, j)} out of range or degenerate")
            if i in seen or j in seen:
                raise ValueError(f"vertex used twice in {arcs}")
            seen.update((i, j))

    # construction ------------------------------------------------------------
    @classmethod
    def one_backbone(cls, arcs: Sequence[Arc], n: int | None = None) -> Diagram:
        n = 2 * len(arcs) if n is None else n
        return cls(n, (), tuple(arcs))

    @classmethod
    def two_backbone(cls, arcs: Sequence[Arc], cut: int, n: int | None = None) -> Diagram:
        n = 2 * len(arcs) if n is None else n
        return cls(n, (cut,), tuple(arcs))

    @classmethod
    def from_json(cls, doc: dict) -> Diagram:
        return cls(int(doc["n"]), tuple(doc.get("cuts", ())), tuple(tuple(a) for a in doc.get("arcs", ())))

    def to_json(self) -> dict:
        return {"n": self.n, "cuts": list(self.cuts), "arcs": [list(a) for a in self.arcs]}

    # derived data ------------------------------------------------------------
    @property
    def b(self) -> int:
        return len(self.cuts) + 1

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    @property
    def backbones(self) -> list[range]:
        bounds = (0,) + self.cuts + (self.n,)
        return [range(bounds[k] + 1, bounds[k + 1] + 1) for k in range(self.b)]

    @cached_property
    def backbone_of(self) -> tuple[int, ...]:
        """Index 0 is unused; ``backbone_of[v]`` for ``1 <= v <= n``."""
        out = [0] * (self.n + 1)
        for k, bb in enumerate(self.backbones):
            for v in bb:
                out[v] = k
        return tuple(out)

    @cached_property
    def partner(self) -> tuple[int, ...]:
        """``partner[v]`` or 0 for isolated vertices."""
        p = [0] * (self.n + 1)
        for i, j in self.arcs:
            p[i], p[j] = j, i
        return tuple(p)

    def is_matching(self) -> bool:
        return 2 * len(self.arcs) == self.n

    def is_exterior(self, arc: Arc) -> bool:
        return self.backbone_of[arc[0]] != self.backbone_of[arc[1]]

    def restrict(self, arcs: Sequence[Arc]) -> Diagram:
        """Same vertices and backbones, a subset of the arcs."""
        return Diagram(self.n, self.cuts, tuple(arcs))

    def compact(self) -> Diagram:
        """Delete isolated vertices and relabel left to right; backbones persist."""
        keep = [v for v in range(1, self.n + 1) if self.partner[v]]
        new = {v: k + 1 for k, v in enumerate(keep)}
        cuts = tuple(sum(1 for v in keep if v <= c) for c in self.cuts)
        return Diagram(len(keep), cuts, tuple((new[i], new[j]) for i, j in self.arcs))


@dataclass(frozen=True)
class FatgraphPermutations:
    """Polygonal model; half-edges are labelled by the vertex they sit on."""

    half_edges: tuple[int, ...]
    vertex_rotation: dict[int, int] = field(repr=False)
    edge_involution: dict[int, int] = field(repr=False)
    empty_backbones: int = 0

    @classmethod
    def of(cls, d: Diagram) -> FatgraphPermutations:
        sigma: dict[int, int] = {}
        empty = 0
        p = d.partner
        for bb in d.backbones:
            ends = [v for v in bb if p[v]]
            if not ends:
                empty += 1
            for k, v in enumerate(ends):
                sigma[v] = ends[(k + 1) % len(ends)]
        alpha = {v: p[v] for v in range(1, d.n + 1) if p[v]}
        return cls(tuple(sorted(alpha)), sigma, alpha, empty)

    def boundary(self, x: int) -> int:
        """``sigma(alpha(x))``."""
        return self.vertex_rotation[self.edge_involution[x]]

    def boundary_cycles(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        cycles = []
        for h in self.half_edges:
            if h in seen:
                continue
            cyc = []
            x = h
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.boundary(x)
            cycles.append(tuple(cyc))
        return cycles

    @property
    def boundary_components(self) -> int:
        return len(self.boundary_cycles()) + self.empty_backbones


@dataclass(frozen=True)
class TopologyReport:
    connected: bool
    boundary_components: int
    genus: Optional[int]
    components: int = 1
    total_genus: int = 0


# ---------------------------------------------------------------------------
# fast kernels on (n, cuts, partner)


def _backbone_index(n: int, cuts: Sequence[int]) -> list[int]:
    bb = [0] * (n + 1)
    k = 0
    ci = list(cuts) + [n]
    for v in range(1, n + 1):
        while v > ci[k]:
            k += 1
        bb[v] = k
    return bb


def _boundary_count(n: int, bb: Sequence[int], b: int, p: Sequence[int]) -> int:
    nxt = [0] * (n + 1)
    first = [0] * b
    last = [0] * b
    for v in range(1, n + 1):
        if p[v]:
            k = bb[v]
            if first[k] == 0:
                first[k] = v
            else:
                nxt[last[k]] = v
            last[k] = v
    empty = 0
    for k in range(b):
        if first[k]:
            nxt[last[k]] = first[k]
        else:
            empty += 1
    seen = [False] * (n + 1)
    r = 0
    for h in range(1, n + 1):
        if p[h] and not seen[h]:
            r += 1
            x = h
            while not seen[x]:
                seen[x] = True
                x = nxt[p[x]]
    return r + empty


def _components(b: int, bb: Sequence[int], arcs: Sequence[Arc]) -> int:
    par = list(range(b))

    def find(x: int) -> int:
        while par[x] != x:
            par[x] = par[par[x]]
            x = par[x]
        return x

    for i, j in arcs:
        par[find(bb[i])] = find(bb[j])
    return len({find(k) for k in range(b)})


def _twice_genus(n: int, cuts: Sequence[int], arcs: Sequence[Arc], bb: Sequence[int] | None = None) -> tuple[int, int, int]:
    """``(2g, r, c)`` with ``g`` summed over connected components."""
    b = len(cuts) + 1
    if bb is None:
        bb = _backbone_index(n, cuts)
    p = [0] * (n + 1)
    for i, j in arcs:
        p[i], p[j] = j, i
    r = _boundary_count(n, bb, b, p)
    c = _components(b, bb, arcs)
    return 2 * c - r - b + len(arcs), r, c


def crosses(a: Arc, b: Arc) -> bool:
    (i, j), (k, l) = (a, b) if a[0] < b[0] else (b, a)
    return i < k < j < l


def crossing_components(arcs: Sequence[Arc]) -> list[list[Arc]]:
    """Connected components of the crossing graph, each a sorted arc list."""
    arcs = list(arcs)
    par = list(range(len(arcs)))

    def find(x: int) -> int:
        while par[x] != x:
            par[x] = par[par[x]]
            x = par[x]
        return x

    for x in range(len(arcs)):
        for y in range(x + 1, len(arcs)):
            if crosses(arcs[x], arcs[y]):
                par[find(x)] = find(y)
    comps: dict[int, list[Arc]] = {}
    for x, a in enumerate(arcs):
        comps.setdefault(find(x), []).append(a)
    return sorted((sorted(c) for c in comps.values()), key=lambda c: c[0])


# ---------------------------------------------------------------------------
# topology and projections


def topology(d: Diagram) -> TopologyReport:
    """Connectivity, boundary components and genus (genus ``None`` if disconnected)."""
    twog, r, c = _twice_genus(d.n, d.cuts, d.arcs, d.backbone_of)
    if twog % 2 or twog < 0:
        raise InconsistentSystem(f"Euler relation violated for {d}")
    g = twog // 2
    return TopologyReport(c == 1, r, g if c == 1 else None, c, g)


def genus(d: Diagram) -> int:
    rep = topology(d)
    if not rep.connected:
        raise Disconnected(f"genus is undefined for a diagram with {rep.components} components")
    return rep.genus  # type: ignore[return-value]


def total_genus(d: Diagram) -> int:
    """Genus summed over connected components (defined for every diagram)."""
    return topology(d).total_genus


def is_connected(d: Diagram) -> bool:
    return _components(d.b, d.backbone_of, d.arcs) == 1


def _stacked_pairs(d: Diagram) -> list[tuple[Arc, Arc]]:
    """``(outer, inner)`` pairs ``(i,j), (i+1,j-1)`` with both ends on common backbones."""
    s = set(d.arcs)
    bb = d.backbone_of
    out = []
    for i, j in d.arcs:
        inner = (i + 1, j - 1)
        if inner in s and bb[i] == bb[i + 1] and bb[j] == bb[j - 1]:
            out.append(((i, j), inner))
    return out


def has_stack(d: Diagram) -> bool:
    return bool(_stacked_pairs(d))


def stacks(d: Diagram) -> list[list[Arc]]:
    """Maximal stacks, outermost arc first; isolated arcs are stacks of length 1."""
    inner_of = dict(_stacked_pairs(d))
    inners = set(inner_of.values())
    out = []
    for a in d.arcs:
        if a in inners:
            continue
        run = [a]
        while run[-1] in inner_of:
            run.append(inner_of[run[-1]])
        out.append(run)
    return out


def shadow(d: Diagram) -> Diagram:
    """Drop noncrossing arcs and isolated vertices, then collapse every stack to one arc."""
    keep = [a for a in d.arcs if any(crosses(a, o) for o in d.arcs if o != a)]
    s = d.restrict(keep).compact()
    while True:
        pairs = _stacked_pairs(s)
        if not pairs:
            return s
        drop = {inner for _, inner in pairs}
        s = s.restrict([a for a in s.arcs if a not in drop]).compact()


def is_shadow(d: Diagram) -> bool:
    return shadow(d) == d


def is_irreducible(d: Diagram) -> bool:
    if not d.arcs or not is_connected(d):
        return False
    return len(crossing_components(d.arcs)) == 1


def glue_alpha(d: Diagram) -> Diagram:
    """Join the end of the first backbone to the start of the second."""
    if d.b != 2:
        raise WrongBackboneCount(f"gluing needs two backbones, got {d.b}")
    return Diagram(d.n, (), d.arcs)


def classify_AB(s: Diagram) -> str:
    """``"A"`` if gluing keeps the genus, ``"B"`` if it raises it by one."""
    if s.b != 2:
        raise WrongBackboneCount(f"classification needs two backbones, got {s.b}")
    if not is_connected(s):
        raise NotConnected("A/B classification needs a connected diagram")
    delta = genus(glue_alpha(s)) - genus(s)
    if delta == 0:
        return "A"
    if delta == 1:
        return "B"
    raise InconsistentSystem(f"gluing changed the genus by {delta}")


def bullet_product(e1: Diagram, e2: Diagram) -> Diagram:
    """Insert ``e2`` into the gap of ``e1``: backbones ``R1 R2`` and ``S2 S1``."""
    if e1.b != 2 or e2.b != 2:
        raise WrongBackboneCount("the bullet product needs two-backbone diagrams")
    r1, r2 = e1.cuts[0], e2.cuts[0]
    # R1 stays put, e2 shifts right by |R1|, S1 shifts right by |e2|
    arcs = [tuple(v if v <= r1 else v + e2.n for v in a) for a in e1.arcs]
    arcs += [(i + r1, j + r1) for i, j in e2.arcs]
    return Diagram(e1.n + e2.n, (r1 + r2,), tuple(arcs))


def component_genera(d: Diagram) -> list[int]:
    """Genus of each crossing component, each drawn on the original backbones."""
    bb = d.backbone_of
    out = []
    for comp in crossing_components(d.arcs):
        twog, _, _ = _twice_genus(d.n, d.cuts, comp, bb)
        out.append(twog // 2)
    return out


def is_gamma(d: Diagram, gamma: int) -> bool:
    """All irreducible shadows have genus at most ``gamma``."""
    return all(g <= gamma for g in component_genera(d))


def one_arc_count(d: Diagram) -> int:
    """Interior arcs ``(i, i+1)``."""
    bb = d.backbone_of
    return sum(1 for i, j in d.arcs if j == i + 1 and bb[i] == bb[j])


def is_canonical(d: Diagram, tau: int) -> bool:
    return all(len(s) >= tau for s in stacks(d))


# ---------------------------------------------------------------------------
# enumeration


def matchings(points: Sequence[int]) -> Iterator[list[Arc]]:
    """All perfect matchings of ``points`` (sorted), smallest point paired first."""
    pts = list(points)
    if not pts:
        yield []
        return
    a = pts[0]
    for k in range(1, len(pts)):
        rest = pts[1:k] + pts[k + 1 :]
        for m in matchings(rest):
            yield [(a, pts[k])] + m


def partial_matchings(n: int) -> Iterator[list[Arc]]:
    """All partial matchings of ``1..n`` (isolated vertices allowed)."""

    def rec(free: list[int]) -> Iterator[list[Arc]]:
        if not free:
            yield []
            return
        a, rest = free[0], free[1:]
        yield from rec(rest)
        for k in range(len(rest)):
            for m in rec(rest[:k] + rest[k + 1 :]):
                yield [(a, rest[k])] + m

    yield from rec(list(range(1, n + 1)))


@dataclass
class ShadowCensus:
    """Counts ``m -> number`` for one (mode, genus) cell; merge by summation."""

    backbone_mode: str
    genus: int
    counts: dict[int, int] = field(default_factory=dict)

    def merge(self, other: ShadowCensus) -> ShadowCensus:
        if (self.backbone_mode, self.genus) != (other.backbone_mode, other.genus):
            raise ValueError("cannot merge censuses of different cells")
        for m, c in other.counts.items():
            self.counts[m] = self.counts.get(m, 0) + c
        return self

    def support(self) -> list[int]:
        return sorted(m for m, c in self.counts.items() if c)


def _caps() -> dict[str, int]:
    return {
        "matchings_1bb": int(os.environ.get("CHORDGENUS_CAP_MATCHINGS", 8)),
        "matchings_2bb": int(os.environ.get("CHORDGENUS_CAP_TWO_BB", 6)),
        "shadows_1bb": int(os.environ.get("CHORDGENUS_CAP_MATCHINGS", 8)),
        "shadows_2bb": int(os.environ.get("CHORDGENUS_CAP_TWO_BB", 6)),
        "pruned": int(os.environ.get("CHORDGENUS_CAP_PRUNED", 10)),
    }


def enumerate_diagrams(
    mode: str,
    n_arcs: int,
    genus: int | None = None,
    irreducible: bool | None = None,
    connected: bool | None = None,
    ab_class: str | None = None,
    cap: int | None = None,
) -> Counter:
    """Exhaustive census keyed by ``(genus, class)``; class is "" on one backbone.

    Two-backbone modes run over every cut position ``1..2m-1``; diagrams
    are labelled, so each (cut, matching) pair is a distinct object.  Only
    connected diagrams are counted in two-backbone modes unless
    ``connected=False`` is passed explicitly.  Shadow modes with a genus
    filter use a pruned search and accept the larger ``pruned`` cap.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    caps = _caps()
    pruned = mode.startswith("shadows") and genus is not None
    limit = cap if cap is not None else (caps["pruned"] if pruned else caps[mode])
    if n_arcs > limit:
        raise CapExceeded(f"{mode} with {n_arcs} arcs exceeds cap {limit}")
    two = mode.endswith("2bb")
    if two and connected is None:
        connected = True
    n = 2 * n_arcs
    cut_list: list[tuple[int, ...]] = [(c,) for c in range(1, n)] if two else [()]
    if two and n_arcs == 0:
        cut_list = []
    out: Counter = Counter()

    def record(arc_list: Sequence[Arc], cuts: tuple[int, ...]) -> None:
        d = Diagram(n, cuts, tuple(arc_list))
        twog, _, c = _twice_genus(n, cuts, d.arcs, d.backbone_of)
        if connected is not None and (c == 1) != connected:
            return
        g = twog // 2
        if genus is not None and g != genus:
            return
        if irreducible is not None and is_irreducible(d) != irreducible:
            return
        cls = ""
        if two and c == 1 and mode == "shadows_2bb":
            cls = classify_AB(d)
            if ab_class is not None and cls != ab_class:
                return
        out[(g, cls)] += 1

    if pruned and connected is not False:
        tally = shadow_counts(n_arcs, genus, two)
        for cls, total in tally["all"].items():
            irr = tally["irreducible"].get(cls, 0)
            count = {None: total, True: irr, False: total - irr}[irreducible]
            if count and (ab_class is None or cls == ab_class):
                out[(genus, cls)] += count
        return out
    for cuts in cut_list:
        for m in matchings(list(range(1, n + 1))):
            if mode.startswith("shadows"):
                d = Diagram(n, cuts, tuple(m))
                if has_stack(d) or any(not any(crosses(a, o) for o in m if o != a) for a in m):
                    continue
            record(m, cuts)
    if not two and n_arcs == 0:
        out.clear()
        if mode == "matchings_1bb" and genus in (None, 0):
            out[(0, "")] = 1
    return out


def census(mode: str, genus: int, arcs: Sequence[int], ab_class: str | None = None, irreducible: bool = True) -> ShadowCensus:
    """Irreducible shadow counts (or matching counts) per arc number for one genus."""
    label = mode if ab_class is None else f"{mode}_{ab_class}"
    cen = ShadowCensus(label, genus)
    for m in arcs:
        tab = enumerate_diagrams(mode, m, genus=genus, irreducible=irreducible if mode.startswith("shadows") else None, ab_class=ab_class)
        cen.counts[m] = sum(tab.values())
    return cen


# ---------------------------------------------------------------------------
# gamma filters by brute force


def gamma_matchings_2bb(n_arcs: int, gamma: int) -> Counter:
    """Connected two-backbone gamma-matchings with ``n_arcs`` arcs, keyed by genus."""
    out: Counter = Counter()
    n = 2 * n_arcs
    for cut in range(1, n):
        for m in matchings(list(range(1, n + 1))):
            d = Diagram(n, (cut,), tuple(m))
            rep = topology(d)
            if rep.connected and is_gamma(d, gamma):
                out[rep.genus] += 1
    return out


def gamma_matchings_1bb(n_arcs: int, gamma: int) -> Counter:
    out: Counter = Counter()
    for m in matchings(list(range(1, 2 * n_arcs + 1))):
        d = Diagram(2 * n_arcs, (), tuple(m))
        if is_gamma(d, gamma):
            out[total_genus(d)] += 1
    return out


def free_exterior_2bb(n_arcs: int) -> Counter:
    """Two-backbone matchings whose exterior arcs (at least one) cross nothing, keyed by genus."""
    out: Counter = Counter()
    n = 2 * n_arcs
    for cut in range(1, n):
        for m in matchings(list(range(1, n + 1))):
            d = Diagram(n, (cut,), tuple(m))
            ext = [a for a in m if d.is_exterior(a)]
            if ext and not any(crosses(e, o) for e in ext for o in m if o != e):
                out[total_genus(d)] += 1
    return out


def gamma_shapes_2bb(n_arcs: int, gamma: int) -> Counter:
    """Connected two-backbone gamma-shapes keyed by ``(genus, number of 1-arcs)``."""
    out: Counter = Counter()
    n = 2 * n_arcs
    for cut in range(1, n):
        for m in matchings(list(range(1, n + 1))):
            d = Diagram(n, (cut,), tuple(m))
            if has_stack(d):
                continue
            rep = topology(d)
            if rep.connected and is_gamma(d, gamma):
                out[(rep.genus, one_arc_count(d))] += 1
    return out


def canonical_structures_2bb(n_vertices: int, gamma: int, tau: int) -> Counter:
    """Connected two-backbone tau-canonical gamma-structures, keyed by genus.

    Structures may have isolated vertices but no interior arc ``(i, i+1)``.
    """
    out: Counter = Counter()
    for cut in range(1, n_vertices):
        for m in partial_matchings(n_vertices):
            d = Diagram(n_vertices, (cut,), tuple(m))
            if not m or one_arc_count(d):
                continue
            rep = topology(d)
            if rep.connected and is_canonical(d, tau) and is_gamma(d, gamma):
                out[rep.genus] += 1
    return out


def random_diagram(rng, n_arcs: int, backbones: int = 1) -> Diagram:
    """Uniform random matching on ``2 n_arcs`` points with random cut positions."""
    pts = list(range(1, 2 * n_arcs + 1))
    rng.shuffle(pts)
    arcs = tuple((min(pts[2 * k], pts[2 * k + 1]), max(pts[2 * k], pts[2 * k + 1])) for k in range(n_arcs))
    cuts = tuple(sorted(rng.randint(0, 2 * n_arcs) for _ in range(backbones - 1)))
    return Diagram(2 * n_arcs, cuts, arcs)
