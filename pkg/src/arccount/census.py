"""Length-bounded enumeration of curve and arc classes.

Curves are scanned by cyclic word length and arcs by the length of their
connecting word. A census is certified when the shortest geodesic lengths
seen in the final three word-length strata all exceed L + margin.

Compact arcs additionally use a geometric pruning bound: every translate
w.axis(d_j) below a prefix q has its endpoints in the boundary interval
spanned by the infinite reduced words starting with q (minus the letters a
peripheral power can cancel), so its distance to axis(d_i) is at least the
distance to the geodesic spanning that interval.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import words as W
from .hypalg import (INF, GeometryError, IdealGeodesic, Mat2, arccosh, attracting_fixed_point,
                     axis, geodesic_distance, mobius, normalizer)
from .surface import (COMPACT, INFINITE, ArcClass, SurfaceModel, _distance_to_image, _mul,
                      arc_overlaps, ball_words, canonical_arc, infinite_arc_t_length)

CURVE = "curve"
COMPACT_ARC = "compact_arc"
INFINITE_ARC = "infinite_arc"
DEFAULT_MARGIN = 2.0
DEEPEN_START = 8
DEEPEN_STEP = 2
DEFAULT_BUDGET = {CURVE: 12, COMPACT_ARC: 40, INFINITE_ARC: 6}


@dataclass(frozen=True, order=True)
class CensusRecord:
    length: float
    key: object
    kind: str = field(compare=False)
    word_length: int = field(compare=False)
    t: float | None = field(default=None, compare=False)

    @property
    def key_str(self) -> str:
        return str(self.key)


@dataclass(frozen=True)
class CensusCertificate:
    max_word_length_scanned: int
    min_length_last_strata: tuple[float, ...]
    margin: float
    certified: bool
    note: str = ""


@dataclass
class Census:
    kind: str
    L: float
    records: list[CensusRecord]
    certificate: CensusCertificate
    t: float | None = None
    strata_minima: dict[int, float] = field(default_factory=dict)

    @property
    def keys(self) -> list:
        return [r.key for r in self.records]

    def count_upto(self, L: float) -> int:
        return sum(1 for r in self.records if r.length <= L + 1e-9)

    def to_csv(self) -> str:
        return records_to_csv(self.records)


def certify(strata_minima: dict[int, float], L: float, margin: float,
            budget_hit: bool = False) -> CensusCertificate:
    """Certificate from per-stratum minimal lengths (strata in increasing order)."""
    strata = sorted(strata_minima)
    last = tuple(strata_minima[n] for n in strata[-3:])
    ok = (not budget_hit and len(last) == 3 and min(last) > L + margin)
    note = "" if ok else ("word-length budget exhausted" if budget_hit
                          else "final strata not above L + margin")
    return CensusCertificate(strata[-1] if strata else 0, last, margin, ok, note)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\r\n")
    wr.writerow(["kind", "key", "length", "word_length", "t"])
    for r in records:
        wr.writerow([r.kind, r.key_str, f"{r.length:.17g}", r.word_length,
                     "" if r.t is None else f"{r.t:.17g}"])
    return buf.getvalue()


def _run(units, fn, threads: int):
    if threads <= 1:
        return [fn(u) for u in units]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, units))


# ------------------------------------------------------------------ curves


def _necklace_ok(p: str) -> bool:
    """False if no cyclic word with prefix p can be its own least rotation
    over itself and its inverse."""
    n = len(p)
    for k in range(1, n):
        if p[k:] < p[:n - k]:
            return False
    for k in range(1, n + 1):
        if W.inverse(p[:k]).translate(W._ORDER) < p[:k].translate(W._ORDER):
            return False
    return True


def _curve_unit(s: SurfaceModel, prefix: str, n: int, L: float):
    """All canonical cyclic words of length n starting with ``prefix``."""
    found, best = [], INF
    letters = W.alphabet(s.rank)
    per = s.peripheral_classes
    mats = s._letters

    def dfs(p, key, m):
        nonlocal best
        if len(p) == n:
            if p[-1] == p[0].swapcase():
                return
            cls = W.conj_canonical(p)
            if cls.word != p:
                return
            r, _ = W.primitive_root(p)
            if W.conj_canonical(r) in per:
                return
            tr = abs(m[0] + m[3])
            if tr <= 2.0 + 1e-9:
                return
            ell = 2.0 * arccosh(tr / 2.0)
            best = min(best, ell)
            if ell <= L + 1e-9:
                found.append(CensusRecord(ell, cls, CURVE, n))
            return
        for ch in letters:
            if p and p[-1] == ch.swapcase():
                continue
            q = p + ch
            if not _necklace_ok(q.translate(W._ORDER)):
                continue
            dfs(q, None, _mul(m, mats[ch]))

    m0 = s.mat_tuple(prefix)
    if _necklace_ok(prefix.translate(W._ORDER)):
        dfs(prefix, None, m0)
    return found, best


def _prefixes(rank: int, n: int) -> list[str]:
    depth = min(n, 2)
    return [w for w in ball_words(rank, depth) if len(w) == depth]


def enumerate_curves(s: SurfaceModel, L: float, margin: float = DEFAULT_MARGIN,
                     max_word_length: int | None = None, threads: int = 1) -> Census:
    if not L > 0:
        raise ValueError("L must be positive")
    budget = max_word_length or DEFAULT_BUDGET[CURVE]
    recs: dict = {}
    minima: dict[int, float] = {}
    done = False
    for n in range(1, budget + 1):
        units = _prefixes(s.rank, n)
        res = _run(units, lambda p: _curve_unit(s, p, n, L), threads)
        minima[n] = min((b for _, b in res), default=INF)
        for found, _ in res:
            for r in found:
                recs[r.key] = r
        cert = certify(minima, L, margin)
        if cert.certified:
            done = True
            break
    cert = certify(minima, L, margin, budget_hit=not done)
    return Census(CURVE, L, sorted(recs.values()), cert, None, minima)


# ------------------------------------------------------------------ arc pruning


class CylinderBounds:
    """Boundary intervals of the cylinder sets of reduced infinite words.

    Coordinates are chosen so the limit set lies in a bounded interval and
    INF sits in the gap cut off by the first boundary geodesic.
    """

    def __init__(self, s: SurfaceModel):
        self.s = s
        self.valid = False
        if not s.boundary_words:
            return
        ax = axis(s.matrix(s.boundary_words[0]))
        n = normalizer(ax)
        probe = mobius(n, attracting_fixed_point(s.matrix(self._generic_word())))
        gap = -1.0 if probe > 0 else 1.0
        mm = Mat2(0.0, -1.0, 1.0, -gap) @ n
        self.phi = mm
        self.phi_inv = mm.inv()
        letters = W.alphabet(s.rank)
        hull = {x: self._approx_hull(x) for x in letters}
        order = sorted(letters, key=lambda x: hull[x][0])
        for a, b in zip(order, order[1:]):
            if hull[a][1] >= hull[b][0]:
                return  # cylinders overlap: generators are not geometric
        self.order = order
        exact = {}
        for x in letters:
            pts = [self._extreme(x, +1), self._extreme(x, -1)]
            lo, hi = min(pts), max(pts)
            # the exact extremes must enclose every sampled limit point
            if not (lo <= hull[x][0] + 1e-9 and hi >= hull[x][1] - 1e-9):
                return
            if not (hull[x][0] - lo < 1e-2 and hi - hull[x][1] < 1e-2):
                return
            exact[x] = (lo, hi)
        self.hull = exact
        # arc (positively oriented) containing all words not starting with x^-1
        self.rest = {}
        k = len(order)
        for x in letters:
            pos = order.index(x.swapcase())
            self.rest[x] = (exact[order[(pos + 1) % k]][0], exact[order[(pos - 1) % k]][1])
        self.valid = True

    def _generic_word(self) -> str:
        return "ab" if self.s.rank >= 2 else "a"

    def _coord(self, z):
        return mobius(self.phi, z)

    def _approx_hull(self, x: str, depth: int = 7) -> tuple[float, float]:
        pts = []
        for u in ball_words(self.s.rank, depth):
            if len(u) == depth and u[0] == x and u[-1] != x.swapcase():
                pts.append(self._coord(attracting_fixed_point(self.s.matrix(u))))
        return min(pts), max(pts)

    def _extreme(self, x: str, direction: int) -> float:
        """Limit point of the ray that always turns the same way after x."""
        order = self.order
        k = len(order)
        word, seen = [x], {}
        cur = x
        while cur not in seen:
            seen[cur] = len(word) - 1
            back = cur.swapcase()
            cur = order[(order.index(back) + direction) % k]
            word.append(cur)
        start = seen[cur]
        pre = "".join(word[:start])
        cyc = "".join(word[start:-1])
        g = W.mul(pre, cyc, W.inverse(pre))
        m = self.s.matrix(g)
        return self._coord(attracting_fixed_point(m) if cyc else mobius(m, 0.0))

    def bound(self, target: IdealGeodesic, prefix: str) -> float:
        """Lower bound for the distance from ``target`` (original coordinates)
        to any geodesic with both endpoints in the cylinder of ``prefix``."""
        if not self.valid or not prefix:
            return 0.0
        x = prefix[-1]
        lo, hi = self.rest[x]
        m = self.phi @ self.s.matrix(prefix) @ self.phi_inv
        u, v = mobius(m, lo), mobius(m, hi)
        tu, tv = self._coord(target.u), self._coord(target.v)
        if _in_arc(tu, u, v) or _in_arc(tv, u, v):
            return 0.0
        try:
            return geodesic_distance(IdealGeodesic.of(tu, tv), IdealGeodesic.of(u, v))
        except GeometryError:
            return 0.0


def _in_arc(p: float, u: float, v: float) -> bool:
    """Whether p lies on the closed arc running from u in the positive direction to v."""
    if p == INF:
        return u > v or u == INF or v == INF
    if u == INF:
        return p <= v
    if v == INF:
        return p >= u
    if u <= v:
        return u <= p <= v
    return p >= u or p <= v


# ------------------------------------------------------------------ arcs


def _arc_pairs(s: SurfaceModel, kind: str) -> list[tuple[int, int]]:
    n = len(s.boundary_words) if kind == COMPACT else len(s.cusp_words)
    return [(i, j) for i in range(n) for j in range(i, n)]


def _arc_unit(s: SurfaceModel, kind: str, i: int, j: int, first: str, L: float, t: float,
              margin: float, budget: int, pruner: CylinderBounds | None):
    pi = s.peripheral(kind, i)
    pj = s.peripheral(kind, j)
    hj = len(pj) // 2
    found = []
    evaluated: dict[int, float] = {}
    pruned: dict[int, float] = {}
    budget_hit = False
    mats = s._letters
    letters = W.alphabet(s.rank)
    if kind == COMPACT:
        ax_i = axis(s.matrix(pi))
        ax_j = axis(s.matrix(pj))

    def evaluate(w, m):
        if kind == COMPACT:
            try:
                ell = _distance_to_image(ax_i, Mat2(*m), ax_j)
            except GeometryError:
                return None
            return ell if ell > 0 else None
        try:
            return infinite_arc_t_length(s, ArcClass(i, j, w, kind), t).length
        except GeometryError:
            return None

    def visit(w, m):
        nonlocal budget_hit
        k = len(w)
        if pruner is not None and k > hj:
            b = pruner.bound(ax_i, w[:k - hj])
            if b > L + margin:
                pruned[k] = min(pruned.get(k, INF), b)
                return
        a = ArcClass(i, j, w, kind)
        oi, oj = arc_overlaps(s, a)
        if 2 * oi > len(pi):
            return  # every extension is shortened by a peripheral power
        if 2 * oj <= len(pj) and not (i == j and w == "" ):
            ell = evaluate(w, m)
            if ell is not None:
                evaluated[k] = min(evaluated.get(k, INF), ell)
                if ell <= L + 1e-9:
                    c = canonical_arc(s, a)
                    found.append(CensusRecord(ell, c, COMPACT_ARC if kind == COMPACT
                                              else INFINITE_ARC, len(c.word),
                                              None if kind == COMPACT else t))
        if k >= budget:
            budget_hit = True
            return
        for ch in letters:
            if w and w[-1] == ch.swapcase():
                continue
            visit(w + ch, _mul(m, mats[ch]))

    if first == "":
        # the empty word is its own unit
        a = ArcClass(i, j, "", kind)
        if i != j:
            ell = evaluate("", (1.0, 0.0, 0.0, 1.0))
            if ell is not None:
                evaluated[0] = ell
                if ell <= L + 1e-9:
                    found.append(CensusRecord(ell, canonical_arc(s, a),
                                              COMPACT_ARC if kind == COMPACT else INFINITE_ARC,
                                              0, None if kind == COMPACT else t))
    else:
        visit(first, mats[first])
    return found, evaluated, pruned, budget_hit


def _arc_pass(s, kind, units, L, t, margin, depth, pruner, threads):
    res = _run(units, lambda u: _arc_unit(s, kind, u[0], u[1], u[2], L, t, margin, depth,
                                          pruner), threads)
    recs: dict = {}
    evaluated: dict[int, float] = {}
    pruned: dict[int, float] = {}
    budget_hit = False
    for found, ev, pr, bh in res:
        budget_hit |= bh
        for r in found:
            old = recs.get(r.key)
            if old is None or r.word_length < old.word_length:
                recs[r.key] = r
        for k, v in ev.items():
            evaluated[k] = min(evaluated.get(k, INF), v)
        for k, v in pr.items():
            pruned[k] = min(pruned.get(k, INF), v)
    top = max(list(evaluated) + list(pruned) + [0])
    if not budget_hit and kind == COMPACT and pruner is not None:
        top += 3  # every branch was cut off: later strata are empty
    minima = {}
    floor = INF
    for n in range(0, top + 1):
        floor = min(floor, pruned.get(n, INF))
        minima[n] = min(evaluated.get(n, INF), floor)
    return recs, minima, budget_hit


def _enumerate_arcs(s: SurfaceModel, kind: str, L: float, t: float | None, margin: float,
                    max_word_length: int | None, threads: int) -> Census:
    ck = COMPACT_ARC if kind == COMPACT else INFINITE_ARC
    budget = max_word_length or DEFAULT_BUDGET[ck]
    pruner = CylinderBounds(s) if kind == COMPACT else None
    if pruner is not None and not pruner.valid:
        pruner = None
    units = [(i, j, f) for i, j in _arc_pairs(s, kind) for f in [""] + W.alphabet(s.rank)]
    # deepen until the last strata clear L + margin; near cusps lengths grow
    # only logarithmically in word length, so a single deep pass is wasteful
    depth = min(budget, DEEPEN_START)
    while True:
        recs, minima, budget_hit = _arc_pass(s, kind, units, L, t, margin, depth, pruner,
                                             threads)
        cert = certify(minima, L, margin)
        if not budget_hit or cert.certified or depth >= budget:
            break
        depth = min(budget, depth + DEEPEN_STEP)
    if budget_hit and not cert.certified:
        cert = certify(minima, L, margin, budget_hit=True)
    return Census(ck, L, sorted(recs.values()), cert, t, minima)


def enumerate_compact_arcs(s: SurfaceModel, L: float, margin: float = DEFAULT_MARGIN,
                           max_word_length: int | None = None, threads: int = 1) -> Census:
    if not s.boundary_words:
        raise GeometryError("surface has no geodesic boundary")
    if not L > 0:
        raise ValueError("L must be positive")
    return _enumerate_arcs(s, COMPACT, L, None, margin, max_word_length, threads)


def enumerate_infinite_arcs(s: SurfaceModel, L: float, t: float = 1.0,
                            margin: float = DEFAULT_MARGIN,
                            max_word_length: int | None = None, threads: int = 1) -> Census:
    if not s.cusp_words:
        raise GeometryError("surface has no cusps")
    if not 0 < t <= 1:
        raise GeometryError("t must lie in (0, 1]")
    return _enumerate_arcs(s, INFINITE, L, t, margin, max_word_length, threads)
