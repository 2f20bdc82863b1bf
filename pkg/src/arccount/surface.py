"""Surfaces as discrete groups of 2x2 matrices, and measurements on them.

A model is a free group on generators a, b, ... realised by matrices, plus
the words representing boundary geodesics and cusps. All peripheral words
are written so that adjacent peripheral elements are coherently oriented:
for normalised matrices X, Y of two distinct peripheral lifts bounding a
common immersed pair of pants, tr(XY) <= -2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import words as W
from .hypalg import (INF, GeometryError, IdealGeodesic, Kind, Mat2, arccosh, axis,
                     classify, cusp_frame, geodesic_distance, interleaved, mobius,
                     normalizer, translation_length)
from .pantsform import PantsDims, bound_C_of_X
from .words import ConjClass, conj_canonical

COMPACT = "compact"
INFINITE = "infinite"
HOROBALL_RADIUS = 3


class UndecidedError(RuntimeError):
    """Raised when an enumeration cutoff is not enough to certify a count."""


def _mul(x, y):
    return (x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3])


@dataclass(frozen=True)
class SurfaceModel:
    name: str
    signature: tuple[int, int, int]
    generators: tuple[Mat2, ...]
    boundary_words: tuple[str, ...] = ()
    cusp_words: tuple[str, ...] = ()
    is_pants_oracle: bool = False
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        g, n, p = self.signature
        if 2 * g - 2 + n + p <= 0:
            raise GeometryError("signature must have negative Euler characteristic")
        if (g, n + p) == (0, 3) and not self.is_pants_oracle:
            raise GeometryError("pairs of pants are only allowed as oracle models")
        if len(self.boundary_words) != n or len(self.cusp_words) != p:
            raise GeometryError("peripheral words do not match the signature")
        for w in self.boundary_words:
            if classify(self.matrix(w)) is not Kind.HYPERBOLIC:
                raise GeometryError(f"boundary word {w} is not hyperbolic")
        for w in self.cusp_words:
            if classify(self.matrix(w)) is not Kind.PARABOLIC:
                raise GeometryError(f"cusp word {w} is not parabolic")
        for w in ball_words(self.rank, 4):
            if w and classify(self.matrix(w)) is Kind.ELLIPTIC:
                raise GeometryError(f"short word {w} is elliptic; group not discrete")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @cached_property
    def _letters(self) -> dict[str, tuple]:
        out = {}
        for k, m in enumerate(self.generators):
            ch = W.LOWER[k]
            out[ch] = (m.a, m.b, m.c, m.d)
            out[ch.upper()] = (m.d, -m.b, -m.c, m.a)
        return out

    def mat_tuple(self, word: str) -> tuple:
        m = (1.0, 0.0, 0.0, 1.0)
        letters = self._letters
        for ch in word:
            m = _mul(m, letters[ch])
        return m

    def matrix(self, word: str) -> Mat2:
        return Mat2(*self.mat_tuple(word))

    def peripheral(self, kind: str, idx: int) -> str:
        return (self.boundary_words if kind == COMPACT else self.cusp_words)[idx]

    @cached_property
    def boundary_lengths(self) -> tuple[float, ...]:
        return tuple(translation_length(self.matrix(w)) for w in self.boundary_words)

    @cached_property
    def peripheral_classes(self) -> frozenset:
        return frozenset(conj_canonical(w) for w in self.boundary_words + self.cusp_words)

    @cached_property
    def cusp_frames(self) -> tuple[tuple[Mat2, float], ...]:
        """Per cusp: (g, s) with g(INF) the cusp point, translation |s|."""
        out = []
        for w in self.cusp_words:
            g, s = cusp_frame(self.matrix(w).normalized())
            out.append((g, abs(s)))
        return tuple(out)

    @cached_property
    def _cusp_columns(self):
        """First columns of u g_k over short words u and cusps k."""
        c0, c1, sk = [], [], []
        for u in ball_words(self.rank, HOROBALL_RADIUS):
            m = self.matrix(u)
            for g, s in self.cusp_frames:
                c0.append(m.a * g.a + m.b * g.c)
                c1.append(m.c * g.a + m.d * g.c)
                sk.append(s)
        return np.array(c0), np.array(c1), np.array(sk)

    @cached_property
    def C_X(self) -> float:
        return bound_C_of_X(self.boundary_lengths)

    def pants_dims(self, i: int, j: int) -> PantsDims:
        return PantsDims(self.boundary_lengths[i], self.boundary_lengths[j])

    # --- serialization

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "signature": list(self.signature),
            "generators": [[float(f"{x:.16g}") for x in (m.a, m.b, m.c, m.d)]
                           for m in self.generators],
            "boundary_words": list(self.boundary_words),
            "cusp_words": list(self.cusp_words),
            "is_pants_oracle": self.is_pants_oracle,
            "params": self.params,
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SurfaceModel":
        doc = json.loads(text)
        return cls(doc["name"], tuple(doc["signature"]),
                   tuple(Mat2(*row) for row in doc["generators"]),
                   tuple(doc["boundary_words"]), tuple(doc["cusp_words"]),
                   doc["is_pants_oracle"], doc.get("params", {}))


def ball_words(rank: int, r: int) -> list[str]:
    """All reduced words of length <= r, shortlex ordered."""
    out = [""]
    layer = [""]
    letters = W.alphabet(rank)
    for _ in range(r):
        nxt = []
        for w in layer:
            for ch in letters:
                if not w or w[-1] != ch.swapcase():
                    nxt.append(w + ch)
        out += nxt
        layer = nxt
    return out


# ------------------------------------------------------------------ presets


def _pair_with_traces(x: float, y: float, z: float) -> tuple[Mat2, Mat2]:
    """Matrices X, Y with tr X = x, tr Y = y, tr XY = z (|x| > 2)."""
    lam = (x + math.sqrt(x * x - 4)) / 2
    p = (z - y / lam) / (lam - 1 / lam)
    s = y - p
    q = 1.0
    r = p * s - 1.0
    return Mat2(lam, 0.0, 0.0, 1 / lam), Mat2(p, q, r, s)


def build_one_holed_torus(tr_a: float, tr_b: float, tr_ab: float) -> SurfaceModel:
    tau = tr_a ** 2 + tr_b ** 2 + tr_ab ** 2 - tr_a * tr_b * tr_ab - 2
    if abs(tau) <= 2 + 1e-9:
        raise GeometryError("not a boundary surface (cusp or elliptic commutator)")
    if min(tr_a, tr_b, tr_ab) <= 2:
        raise GeometryError("generator traces must exceed 2")
    A, B = _pair_with_traces(tr_a, tr_b, tr_ab)
    return SurfaceModel(f"one_holed_torus({tr_a:g},{tr_b:g},{tr_ab:g})", (1, 1, 0), (A, B),
                        boundary_words=("abAB",),
                        params={"preset": "one_holed_torus", "traces": [tr_a, tr_b, tr_ab],
                                "boundary_trace": tau})


def build_punctured_torus(choice="standard") -> SurfaceModel:
    """Once-punctured torus; ``choice`` is "standard" or a Markov-type trace triple."""
    if choice == "standard":
        A = Mat2(1.0, 1.0, 1.0, 2.0)
        B = Mat2(1.0, -1.0, -1.0, 2.0)
        params = {"preset": "punctured_torus", "traces": [3, 3, 3]}
        name = "punctured_torus"
    else:
        x, y, z = choice
        if abs(x * x + y * y + z * z - x * y * z) > 1e-9 * max(1.0, x * y * z):
            raise GeometryError("traces must satisfy x^2 + y^2 + z^2 = xyz")
        A, B = _pair_with_traces(x, y, z)
        params = {"preset": "punctured_torus", "traces": [x, y, z]}
        name = f"punctured_torus({x:g},{y:g},{z:g})"
    return SurfaceModel(name, (1, 0, 1), (A, B), cusp_words=("abAB",), params=params)


def build_pants(cuff0: float, cuff1: float, cuff2: float,
                cusps=(False, False, False)) -> SurfaceModel:
    """Pair of pants with generators X0 = a, X1 = b and X2 = (X1 X0)^-1 = AB.

    A flagged cusp replaces the corresponding cuff (its length is ignored).
    """
    cusps = tuple(bool(c) for c in cusps)
    tr = [2.0 if cusps[k] else 2 * math.cosh(c / 2)
          for k, c in enumerate((cuff0, cuff1, cuff2))]
    if any(not c > 0 for k, c in enumerate((cuff0, cuff1, cuff2)) if not cusps[k]):
        raise GeometryError("cuff lengths must be positive")
    x, y, z = tr[0], tr[1], -tr[2]
    if cusps[0] and cusps[1]:
        # X0 = [[1,1],[0,1]], X1 = [[1,0],[v,1]], tr X0 X1 = 2 + v
        X0 = Mat2(1.0, 1.0, 0.0, 1.0)
        X1 = Mat2(1.0, 0.0, z - 2, 1.0)
    elif cusps[0] or cusps[1]:
        # parabolic fixing INF paired with a hyperbolic element
        par, hyp_tr = (0, y) if cusps[0] else (1, x)
        lam = (hyp_tr + math.sqrt(hyp_tr ** 2 - 4)) / 2
        H = Mat2(lam, 0.0, 0.0, 1 / lam)
        # P = [[1 + u, -u],[u, 1 - u]] fixes 1; tr(P H) = hyp_tr + u (lam - 1/lam)
        u = (z - hyp_tr) / (lam - 1 / lam)
        P = Mat2(1 + u, -u, u, 1 - u)
        X0, X1 = (P, H) if par == 0 else (H, P)
    else:
        X0, X1 = _pair_with_traces(x, y, z)
    if cusps[2] and abs(z + 2) > 1e-12:
        raise GeometryError("infeasible trace configuration")
    n = sum(not c for c in cusps)
    words = ("a", "b", "AB")
    bw = tuple(w for w, c in zip(words, cusps) if not c)
    cw = tuple(w for w, c in zip(words, cusps) if c)
    m = SurfaceModel(f"pants({cuff0:g},{cuff1:g},{cuff2:g};{''.join('c' if c else 'b' for c in cusps)})",
                     (0, n, 3 - n), (X0, X1), bw, cw, is_pants_oracle=True,
                     params={"preset": "pants", "cuffs": [cuff0, cuff1, cuff2],
                             "cusps": list(cusps)})
    return m


def build_cusped_pants(boundary_length: float = 2.0) -> SurfaceModel:
    """Pants with two cusps (a, b) and one geodesic boundary (AB)."""
    return build_pants(1.0, 1.0, boundary_length, cusps=(True, True, False))


PRESETS = {
    "one_holed_torus": lambda: build_one_holed_torus(4, 4, 4),
    "punctured_torus": lambda: build_punctured_torus("standard"),
    "cusped_pants": lambda: build_cusped_pants(2.0),
    "pants": lambda: build_pants(2.0, 2.0, 2.0),
}


def preset(name: str) -> SurfaceModel:
    try:
        return PRESETS[name]()
    except KeyError:
        raise GeometryError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# ------------------------------------------------------------------ arcs


@dataclass(frozen=True, order=True)
class ArcClass:
    """Arc from peripheral ``end_i`` to the ``word``-translate of ``end_j``.

    The lift starts on the axis (or fixed point) of the i-th peripheral word
    and ends on the image under ``word`` of the j-th one.
    """

    end_i: int
    end_j: int
    word: str
    kind: str = COMPACT

    def flipped(self) -> "ArcClass":
        return ArcClass(self.end_j, self.end_i, W.inverse(self.word), self.kind)

    @property
    def key(self) -> str:
        return f"{self.end_i}:{self.word or '1'}:{self.end_j}"

    @classmethod
    def from_key(cls, key: str, kind: str = COMPACT) -> "ArcClass":
        i, w, j = key.split(":")
        return cls(int(i), int(j), "" if w == "1" else w, kind)

    def __str__(self):
        return self.key


def _overlap(w: str, p: str) -> int:
    """Longest common prefix of ``w`` with p^k or p^-k."""
    best = 0
    for q in (p, W.inverse(p)):
        n = 0
        while n < len(w) and w[n] == q[n % len(q)]:
            n += 1
        best = max(best, n)
    return best


def arc_overlaps(s: SurfaceModel, a: ArcClass) -> tuple[int, int]:
    """Cancellation available against the peripheral words at both ends."""
    pi = s.peripheral(a.kind, a.end_i)
    pj = s.peripheral(a.kind, a.end_j)
    return _overlap(a.word, pi), _overlap(W.inverse(a.word), pj)


def _sort_key(a: ArcClass):
    return (a.end_i, a.end_j, len(a.word), W.order_key(a.word))


def _shortest_in_coset(w: str, pi: str, pj: str) -> str:
    oi, oj = _overlap(w, pi), _overlap(W.inverse(w), pj)
    if 2 * oi < len(pi) and 2 * oj < len(pj) and len(w) >= len(pi) + len(pj):
        # no peripheral move can shorten or preserve the length
        return w
    k = len(w) // min(len(pi), len(pj)) + 2
    best = None
    for m in range(-k, k + 1):
        left = W.mul(W.power(pi, m), w)
        for n in range(-k, k + 1):
            x = W.mul(left, W.power(pj, n))
            key = (len(x), W.order_key(x))
            if best is None or key < best[0]:
                best = (key, x)
    return best[1]


def canonical_arc(s: SurfaceModel, a: ArcClass) -> ArcClass:
    """Shortest representative of the double coset, least over both orientations."""
    w = W.reduce(a.word)
    pi = s.peripheral(a.kind, a.end_i)
    pj = s.peripheral(a.kind, a.end_j)
    fwd = ArcClass(a.end_i, a.end_j, _shortest_in_coset(w, pi, pj), a.kind)
    back = ArcClass(a.end_j, a.end_i, _shortest_in_coset(W.inverse(w), pj, pi), a.kind)
    return min(fwd, back, key=_sort_key)


def _check_arc(s: SurfaceModel, a: ArcClass):
    n = len(s.boundary_words) if a.kind == COMPACT else len(s.cusp_words)
    if not (0 <= a.end_i < n and 0 <= a.end_j < n):
        raise GeometryError(f"arc ends {a.end_i}, {a.end_j} out of range for {a.kind} arcs")
    if a.end_i == a.end_j:
        p = s.peripheral(a.kind, a.end_i)
        # w in <p> means both ends are the same lift
        if W.mul(a.word, p, W.inverse(a.word)) == W.reduce(p):
            raise GeometryError("degenerate arc class")


@dataclass(frozen=True)
class LengthReport:
    length: float
    t_used: float | None = None
    components_in_cusp: int | None = None
    cutoff: float | None = None


# ------------------------------------------------------------------ curves


def _curve_root(s: SurfaceModel, c) -> tuple[str, int]:
    cls = c if isinstance(c, ConjClass) else conj_canonical(c)
    if cls in s.peripheral_classes:
        raise GeometryError("not an essential non-peripheral curve")
    r, p = W.primitive_root(cls.word)
    if W.conj_canonical(r) in s.peripheral_classes:
        raise GeometryError("not an essential non-peripheral curve")
    return r, p


def curve_length(s: SurfaceModel, c) -> float:
    r, p = _curve_root(s, c)
    m = s.matrix(r * p)
    if classify(m) is not Kind.HYPERBOLIC:
        raise GeometryError("not an essential non-peripheral curve")
    return translation_length(m)


# ------------------------------------------------------------------ compact arcs


def _peripheral_axis(s: SurfaceModel, idx: int) -> IdealGeodesic:
    return axis(s.matrix(s.boundary_words[idx]))


def arc_axes(s: SurfaceModel, a: ArcClass) -> tuple[IdealGeodesic, IdealGeodesic]:
    g1 = _peripheral_axis(s, a.end_i)
    g2 = _peripheral_axis(s, a.end_j).moved(s.matrix(a.word))
    return g1, g2


def _distance_to_image(g1: IdealGeodesic, m: Mat2, g: IdealGeodesic) -> float:
    """Distance from g1 to m(g) without subtracting nearly equal endpoints.

    Long arcs push both endpoints of m(g) into a tiny interval, so their gap
    is taken from (v - u) / ((cu + d)(cv + d)) rather than by subtraction.
    """
    if INF in (g.u, g.v):
        return geodesic_distance(g1, g.moved(m))
    nm = normalizer(g1) @ m
    du, dv = nm.c * g.u + nm.d, nm.c * g.v + nm.d
    if du == 0.0 or dv == 0.0:
        return 0.0
    p, q = (nm.a * g.u + nm.b) / du, (nm.a * g.v + nm.b) / dv
    if p == 0.0 or q == 0.0:
        return 0.0
    if (p < 0) != (q < 0):
        raise GeometryError("geodesics cross")
    gap = abs((g.v - g.u) / (du * dv))
    if gap == 0.0:
        return 0.0
    return arccosh(abs(p + q) / gap)


def arc_length(s: SurfaceModel, a: ArcClass) -> LengthReport:
    if a.kind != COMPACT:
        raise GeometryError("arc_length needs a compact arc; use infinite_arc_t_length")
    _check_arc(s, a)
    g1 = _peripheral_axis(s, a.end_i)
    try:
        d = _distance_to_image(g1, s.matrix(a.word), _peripheral_axis(s, a.end_j))
    except GeometryError:
        raise GeometryError("degenerate arc class") from None
    if not d > 0:
        raise GeometryError("degenerate arc class")
    return LengthReport(d)


def common_perpendicular(g1: IdealGeodesic, g2: IdealGeodesic) -> tuple[complex, complex]:
    """Feet of the common perpendicular of two disjoint geodesics."""
    n = normalizer(g1)
    p, q = mobius(n, g2.u), mobius(n, g2.v)
    sign = 1.0 if p > 0 else -1.0
    p, q = abs(p), abs(q)
    rho = math.sqrt(p * q)
    x = 2 * p * q / (p + q)
    y = math.sqrt(max(rho * rho - x * x, 0.0))
    ni = n.inv()
    return mobius(ni, complex(0.0, rho)), mobius(ni, complex(sign * x, y))


# ------------------------------------------------------------------ infinite arcs


def _cusp_point(s: SurfaceModel, k: int) -> float:
    return mobius(s.cusp_frames[k][0], INF)


def _window(s: SurfaceModel, a: ArcClass, reach: int) -> list[str]:
    """Group elements whose tiles lie along the lift: the H-shaped path."""
    pi = s.peripheral(a.kind, a.end_i)
    pj = s.peripheral(a.kind, a.end_j)
    out = {""}
    for p in (W.power(pi, reach), W.power(pi, -reach)):
        out.update(p[:k] for k in range(len(p) + 1))
    out.update(a.word[:k] for k in range(len(a.word) + 1))
    for p in (W.power(pj, reach), W.power(pj, -reach)):
        out.update(W.mul(a.word, p[:k]) for k in range(len(p) + 1))
    return sorted(out, key=lambda x: (len(x), W.order_key(x)))


@dataclass(frozen=True)
class _CuspGeometry:
    """An infinite arc lift seen from cusp i at infinity: the vertical line
    Re z = x0 between the area-1 horoball at INF (height h1) and the area-1
    horoball at x0 (diameter d1). ``balls`` lists (offset, diameter) of the
    other area-1 horoballs tall enough to reach the line, scaled to diameter
    one: only the ratio matters for chords and contact."""

    x0: float
    h1: float
    d1: float
    balls: tuple[tuple[float, float], ...]


def _frame_balls(s: SurfaceModel, a: ArcClass, reach: int):
    gi, si = s.cusp_frames[a.end_i]
    gj, sj = s.cusp_frames[a.end_j]
    n = gi.inv()
    g = n @ s.matrix(a.word) @ gj
    if abs(g.c) <= 1e-12 * max(abs(g.a), abs(g.d), 1.0):
        raise GeometryError("degenerate arc class")
    x0 = g.a / g.c
    d1 = 1.0 / (g.c * g.c * sj)
    col0, col1, sk = s._cusp_columns
    found = []
    for v in _window(s, a, reach):
        m = n @ s.matrix(v)
        # first column of n v u g_k gives base a/c and area-1 diameter 1/(c^2 s_k)
        ca = m.a * col0 + m.b * col1
        cc = m.c * col0 + m.d * col1
        ok = np.abs(cc) > 1e-12 * np.maximum(np.abs(ca), 1.0)
        d = np.where(ok, 1.0 / np.where(ok, cc * cc * sk, 1.0), 0.0)
        keep = ok & (d >= d1 * (1 - 1e-9))
        if not keep.any():
            continue
        q = ca[keep] / cc[keep]
        q = q - si * np.round((q - x0) / si)
        found.append(np.stack([np.abs(q - x0), d[keep]], axis=1))
    balls = []
    if found:
        for off, d in sorted(np.concatenate(found).tolist()):
            if off <= 1e-9 * d:
                continue  # the end horoball itself, the only one based at x0
            if off >= d:
                continue  # misses the line for every area t <= 2
            # the same horoball reached through different words
            if any(abs(d - d2) <= 1e-8 * d and abs(off - o2) <= 1e-8 * d for o2, d2 in balls):
                continue
            balls.append((off, d))
    return x0, si, d1, balls


def _cusp_geometry(s: SurfaceModel, a: ArcClass, reach: int = 2) -> _CuspGeometry:
    """Horoballs along the lift, each taken from the cusp frame nearer to it.

    Offsets near the far end are differences of numbers of size |x0| and
    lose all precision on long arcs, so the far half is read from the
    flipped arc. A ball at offset e sits at distance log(h1/e) along the
    truncated segment; the frames are related by z -> x0' - K/(z - x0) with
    K = d1 h1', which maps offset e to K/e and keeps e/d fixed.
    """
    if a.kind != INFINITE:
        raise GeometryError("not an infinite arc")
    _check_arc(s, a)
    x0, h1, d1, near = _frame_balls(s, a, reach)
    _, h1f, _, far = _frame_balls(s, a.flipped(), reach)
    span = math.log(h1 / d1)
    half = span / 2
    marks = [(math.log(h1 / off), off / d) for off, d in near
             if math.log(h1 / off) <= half + 1.0]
    k = d1 * h1f
    for off, d in far:
        pos = math.log(h1 * off / k)
        if pos < half - 1.0:
            continue
        if any(abs(pos - p2) <= 1e-6 and abs(off / d - r2) <= 1e-6 * max(r2, 1.0)
               for p2, r2 in marks):
            continue
        marks.append((pos, off / d))
    balls = tuple((r, 1.0) for _, r in sorted(marks))
    return _CuspGeometry(x0, h1, d1, balls)


def _chord(off: float, diam: float) -> float:
    r = diam / 2
    if off >= r:
        return 0.0
    u = math.sqrt(1.0 - (off / r) ** 2)
    return math.log((1 + u) / (1 - u))


def infinite_arc_t_length(s: SurfaceModel, a: ArcClass, t: float = 1.0) -> LengthReport:
    if not 0 < t <= 1:
        raise GeometryError("t must lie in (0, 1]")
    geo = _cusp_geometry(s, a)
    total = math.log(geo.h1 / geo.d1) + 2 * math.log(1 / t)
    hits = 0
    for off, d in geo.balls:
        c = _chord(off, t * d)
        if c > 0:
            total -= c
            hits += 1
    return LengthReport(total, t, 2 + hits, geo.d1)


def truncated_length(s: SurfaceModel, a: ArcClass) -> float:
    geo = _cusp_geometry(s, a)
    return math.log(geo.h1 / geo.d1)


def _first_contact(geo: _CuspGeometry) -> float:
    """Smallest area at which an interior horoball touches the lift."""
    return min((2 * off / d for off, d in geo.balls), default=INF)


def t_alpha(s: SurfaceModel, a: ArcClass) -> float:
    """Largest t <= 1 for which the t-truncated arc is connected.

    Exact: an interior horoball of area-1 diameter D at offset e from the
    line first touches it at area 2e/D.
    """
    return min(1.0, _first_contact(_cusp_geometry(s, a)))


# ------------------------------------------------------------------ self-intersection


def _curve_self_intersections(s: SurfaceModel, c) -> int:
    r, p = _curve_root(s, c)
    rots = W.rotations(r)
    axes = [axis(s.matrix(x)) for x in rots]
    count = 0
    for k, A in enumerate(rots):
        back = A[-1].swapcase()
        for m, B in enumerate(rots):
            if m == k:
                continue
            # count each crossing once per ordered pair of lifts: at the vertex
            # where the shared stretch of the two axes begins
            if back in (B[0], B[-1].swapcase()):
                continue
            if interleaved(axes[k], axes[m]):
                count += 1
    if count % 2:
        raise UndecidedError(f"odd crossing count {count} for {r}")
    return p * p * (count // 2) + p - 1


def _segments_cross(a1: complex, a2: complex, b1: complex, b2: complex, tol=1e-10) -> bool:
    """Transverse crossing of two geodesic segments in the upper half-plane."""
    ga = _geodesic_through(a1, a2)
    n = normalizer(ga)
    pa1, pa2 = mobius(n, a1), mobius(n, a2)
    pb1, pb2 = mobius(n, b1), mobius(n, b2)
    gb = _geodesic_through(pb1, pb2)
    if gb.u == INF or gb.v == INF:
        return False
    if not gb.u < 0 < gb.v:
        return False
    y = math.sqrt(-gb.u * gb.v)
    lo, hi = sorted((pa1.imag, pa2.imag))
    if not lo * (1 + tol) < y < hi * (1 - tol):
        return False
    lo, hi = sorted((pb1.real, pb2.real))
    scale = max(abs(lo), abs(hi), y)
    return lo < -tol * scale and hi > tol * scale


def _geodesic_through(z1: complex, z2: complex) -> IdealGeodesic:
    if abs(z1.real - z2.real) <= 1e-14 * max(abs(z1), abs(z2)):
        return IdealGeodesic.of(z1.real, INF)
    # centre c on the real line equidistant from z1, z2
    c = (abs(z2) ** 2 - abs(z1) ** 2) / (2 * (z2.real - z1.real))
    r = abs(z1 - c)
    return IdealGeodesic.of(c - r, c + r)


def _arc_crossings(s: SurfaceModel, a: ArcClass, reach: int) -> int:
    vs = _window(s, a, reach)
    hs = set()
    for v in vs:
        for p in vs:
            h = W.mul(v, W.inverse(p))
            if h:
                hs.add(h)
    if a.kind == COMPACT:
        f1, f2 = common_perpendicular(*arc_axes(s, a))
    else:
        x = _cusp_point(s, a.end_i)
        y = mobius(s.matrix(a.word), _cusp_point(s, a.end_j))
        lift = IdealGeodesic.of(x, y)
    count = 0
    for h in sorted(hs):
        m = s.matrix(h)
        if a.kind == COMPACT:
            g1, g2 = mobius(m, f1), mobius(m, f2)
            if _segments_cross(f1, f2, g1, g2):
                count += 1
        elif not _shares_end(s, a, h) and interleaved(lift, lift.moved(m)):
            count += 1
    return count


def _in_cyclic(x: str, p: str) -> bool:
    return W.mul(x, p, W.inverse(x)) == p


def _shares_end(s: SurfaceModel, a: ArcClass, h: str) -> bool:
    """Whether h moves the lift of an infinite arc to one with a common
    ideal endpoint; decided in the free group, not numerically."""
    pi = s.cusp_words[a.end_i]
    pj = s.cusp_words[a.end_j]
    w, wi = a.word, W.inverse(a.word)
    if _in_cyclic(h, pi) or _in_cyclic(W.mul(wi, h, w), pj):
        return True
    return a.end_i == a.end_j and (_in_cyclic(W.mul(wi, h), pi) or _in_cyclic(W.mul(h, w), pi))


def _arc_self_intersections(s: SurfaceModel, a: ArcClass, reach: int = 2) -> int:
    _check_arc(s, a)
    a = canonical_arc(s, a)
    n1 = _arc_crossings(s, a, reach)
    n2 = _arc_crossings(s, a, reach + 2)
    if n1 != n2 or n1 % 2:
        raise UndecidedError(f"undecided at cutoff: {n1} vs {n2} crossings for {a}")
    return n1 // 2


def self_intersections(s: SurfaceModel, x) -> int:
    if isinstance(x, ArcClass):
        return _arc_self_intersections(s, x)
    return _curve_self_intersections(s, x)


# ------------------------------------------------------------------ cusp depth and collars


def _lift_height(seg, frame: Mat2) -> float:
    """Highest point reached by a geodesic segment after applying ``frame``."""
    z1, z2 = mobius(frame, seg[0]), mobius(frame, seg[1])
    g = _geodesic_through(z1, z2)
    if g.v == INF:
        return max(z1.imag, z2.imag)
    c, r = (g.u + g.v) / 2, (g.v - g.u) / 2
    lo, hi = sorted((z1.real, z2.real))
    return r if lo <= c <= hi else max(z1.imag, z2.imag)


def penetration_depth(s: SurfaceModel, x, radius: int = 3) -> float:
    """Largest area t (capped at 2) whose cuspidal regions the class avoids.

    Returns INF when no cuspidal region of area < 2 is entered.
    """
    if not s.cusp_words:
        return INF
    best = INF
    ball = ball_words(s.rank, radius)
    if isinstance(x, ArcClass) and x.kind == INFINITE:
        best = _first_contact(_cusp_geometry(s, x))
    elif isinstance(x, ArcClass):
        seg = common_perpendicular(*arc_axes(s, x))
        for v in _window(s, x, 1):
            for u in ball:
                m = s.matrix(W.mul(v, u))
                for gk, sk in s.cusp_frames:
                    h = _lift_height((mobius(m, seg[0]), mobius(m, seg[1])), gk.inv())
                    best = min(best, sk / h)
    else:
        r, _ = _curve_root(s, x)
        for rot in W.rotations(r):
            ax = axis(s.matrix(rot))
            for u in ball:
                g = ax.moved(s.matrix(u))
                for gk, sk in s.cusp_frames:
                    h = g.moved(gk.inv())
                    if h.v == INF:
                        continue
                    best = min(best, sk / ((h.v - h.u) / 2))
    return INF if best >= 2.0 else best


def boundary_collar_clearance(s: SurfaceModel, c, radius: int = 3) -> float:
    """Distance from the curve's geodesic to the boundary geodesics."""
    r, _ = _curve_root(s, c)
    best = INF
    baxes = [axis(s.matrix(w)) for w in s.boundary_words]
    ball = ball_words(s.rank, radius)
    for rot in W.rotations(r):
        ax = axis(s.matrix(rot))
        for u in ball:
            m = s.matrix(u)
            for b in baxes:
                best = min(best, geodesic_distance(ax, b.moved(m)))
    return best


# ------------------------------------------------------------------ mapping classes on arcs


def apply_to_arc(s: SurfaceModel, phi: W.Automorphism, a: ArcClass) -> ArcClass:
    """Image of an arc class under an automorphism fixing each peripheral class.

    If phi(p_i) = u_i p_i u_i^-1 then the new lift runs from the axis of p_i
    to u_i^-1 phi(w) u_j applied to the axis of p_j.
    """
    pi = s.peripheral(a.kind, a.end_i)
    pj = s.peripheral(a.kind, a.end_j)
    ui = W.conjugator(phi(pi), pi)
    uj = W.conjugator(phi(pj), pj)
    if ui is None or uj is None:
        raise W.WordError(f"{phi.name} does not fix the peripheral classes")
    w = W.mul(W.inverse(ui), phi(a.word), uj)
    return canonical_arc(s, ArcClass(a.end_i, a.end_j, w, a.kind))


def verify_pants(s: SurfaceModel) -> list[dict]:
    """Seam lengths measured in the group against the closed-form value
    predicted from the opposite cuff."""
    from .pantsform import arc_len_from_curve

    if not s.is_pants_oracle or len(s.boundary_words) != 3:
        raise GeometryError("needs a pants model with three geodesic cuffs")
    out = []
    for i, j, k in ((0, 1, 2), (1, 2, 0), (0, 2, 1)):
        measured = arc_length(s, ArcClass(i, j, "")).length
        predicted = arc_len_from_curve(s.pants_dims(i, j), s.boundary_lengths[k])
        out.append({"seam": f"{i}-{j}", "measured": measured, "predicted": predicted,
                    "rel_error": abs(measured - predicted) / predicted})
    return out
