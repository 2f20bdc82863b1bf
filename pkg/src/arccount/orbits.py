"""Mapping class orbits of curves and arcs under a length cap."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import words as W
from .hypalg import GeometryError
from .surface import (COMPACT, ArcClass, SurfaceModel, apply_to_arc, arc_length, canonical_arc,
                      curve_length, infinite_arc_t_length)
from .words import Automorphism, ConjClass

DEFAULT_SLACK = 4.0
DEFAULT_BUDGET = 500_000


class UnsupportedSurface(GeometryError):
    pass


def pmod_generators(s: SurfaceModel) -> list[Automorphism]:
    """Twists about a and b and their inverses, each checked to fix the peripheral classes."""
    g, n, p = s.signature
    if (g, n + p) != (1, 1) or s.rank != 2:
        raise UnsupportedSurface(f"no mapping class generators for signature {s.signature}")
    ta = Automorphism("Ta", ("a", "ba"), ("a", "bA"))
    tb = Automorphism("Tb", ("ab", "b"), ("aB", "b"))
    per = s.boundary_words + s.cusp_words
    return [x.verify_pmod(per) for x in (ta, ta.inverse(), tb, tb.inverse())]


def act(s: SurfaceModel, phi: Automorphism, x):
    if isinstance(x, ArcClass):
        return apply_to_arc(s, phi, x)
    return W.conj_canonical(phi(x.word))


def measure(s: SurfaceModel, x, t: float = 1.0) -> float:
    if isinstance(x, ArcClass):
        if x.kind == COMPACT:
            return arc_length(s, x).length
        return infinite_arc_t_length(s, x, t).length
    return curve_length(s, x)


def canonical(s: SurfaceModel, x):
    if isinstance(x, ArcClass):
        return canonical_arc(s, x)
    if isinstance(x, ConjClass):
        return x
    return W.conj_canonical(x)


def _order(x) -> tuple:
    if isinstance(x, ArcClass):
        return (x.end_i, x.end_j, len(x.word), W.order_key(x.word))
    return (len(x.word), W.order_key(x.word))


@dataclass
class OrbitCensus:
    seed: object
    L: float
    slack: float
    elements: dict            # key -> (length, chain) for lengths <= L
    frontier_exhausted: bool
    explored: int = 0
    t: float | None = None

    def lengths(self) -> list[float]:
        return sorted(v[0] for v in self.elements.values())

    def count_upto(self, L: float) -> int:
        return sum(1 for v in self.elements.values() if v[0] <= L + 1e-9)

    def sorted_items(self):
        return sorted(self.elements.items(), key=lambda kv: (kv[1][0], _order(kv[0])))

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\r\n")
        wr.writerow(["key", "length", "chain"])
        for key, (ell, chain) in self.sorted_items():
            wr.writerow([str(key), f"{ell:.17g}", ";".join(chain)])
        return buf.getvalue()


def orbit_census(s: SurfaceModel, seed, L: float, slack: float = DEFAULT_SLACK,
                 t: float = 1.0, budget: int = DEFAULT_BUDGET, gens=None,
                 threads: int = 1) -> OrbitCensus:
    """Breadth-first search over generator applications.

    Anything of length <= L + slack is explored; anything <= L is reported.
    Rounds are bulk-synchronous: a sorted frontier is expanded (possibly in
    parallel) and the results merged in a fixed order.
    """
    gens = gens if gens is not None else pmod_generators(s)
    seed = canonical(s, seed)
    ell0 = measure(s, seed, t)
    if ell0 > L + 1e-9:
        raise ValueError(f"seed length {ell0:.6g} exceeds L = {L}")
    cap = L + slack
    seen = {seed: (ell0, ())}
    frontier = [seed]
    exhausted = True

    def expand(x):
        out = []
        for g in gens:
            y = act(s, g, x)
            out.append((g.name, y))
        return out

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            frontier.sort(key=lambda x: (seen[x][0], _order(x)))
            results = list(pool.map(expand, frontier)) if pool else [expand(x) for x in frontier]
            nxt = []
            fresh = []
            for x, imgs in zip(frontier, results):
                for name, y in imgs:
                    if y in seen or y in fresh:
                        continue
                    fresh.append(y)
                    seen[y] = (None, seen[x][1] + (name,))
            lens = list(pool.map(lambda y: measure(s, y, t), fresh)) if pool else \
                [measure(s, y, t) for y in fresh]
            for y, ell in zip(fresh, lens):
                seen[y] = (ell, seen[y][1])
                if ell <= cap:
                    nxt.append(y)
            if len(seen) > budget:
                exhausted = False
                break
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()
    elements = {k: v for k, v in seen.items() if v[0] <= L + 1e-9}
    return OrbitCensus(seed, L, slack, elements, exhausted, len(seen),
                       None if not isinstance(seed, ArcClass) or seed.kind == COMPACT else t)


def replay(s: SurfaceModel, seed, chain, gens=None):
    byname = {g.name: g for g in (gens or pmod_generators(s))}
    x = canonical(s, seed)
    for name in chain:
        x = act(s, byname[name], x)
    return x


@dataclass(frozen=True)
class InOrbit:
    chain: tuple


@dataclass(frozen=True)
class NotDecided:
    reason: str = ""


def _inverse_name(name: str) -> str:
    return name[:-1] if name.endswith("'") else name + "'"


def classify_type(s: SurfaceModel, x, seed, budget: int = 20_000,
                  slack: float = DEFAULT_SLACK, t: float = 1.0, gens=None):
    """Search from both ends for a generator chain taking ``seed`` to ``x``.

    Only elements no longer than the longer endpoint plus ``slack`` are
    explored. A returned chain has been replayed and checked.
    """
    gens = gens if gens is not None else pmod_generators(s)
    x, seed = canonical(s, x), canonical(s, seed)
    if type(x) is not type(seed) or (isinstance(x, ArcClass) and x.kind != seed.kind):
        return NotDecided("different kinds of object")
    if x == seed:
        return InOrbit(())
    cap = max(measure(s, x, t), measure(s, seed, t)) + slack
    sides = [{seed: ()}, {x: ()}]
    fronts = [[seed], [x]]
    visited = 2
    while fronts[0] or fronts[1]:
        side = 0 if (len(fronts[0]) <= len(fronts[1]) and fronts[0]) or not fronts[1] else 1
        nxt = []
        for y in sorted(fronts[side], key=_order):
            for g in gens:
                z = act(s, g, y)
                if z in sides[side]:
                    continue
                path = sides[side][y] + (g.name,)
                sides[side][z] = path
                visited += 1
                other = sides[1 - side]
                if z in other:
                    fwd, back = (path, other[z]) if side == 0 else (other[z], path)
                    chain = fwd + tuple(_inverse_name(n) for n in reversed(back))
                    if replay(s, seed, chain, gens) != x:
                        raise AssertionError("orbit chain failed to replay")
                    return InOrbit(chain)
                if measure(s, z, t) <= cap:
                    nxt.append(z)
                if visited > budget:
                    return NotDecided("budget exhausted")
        fronts[side] = nxt
    return NotDecided("search space exhausted under the length cap")
