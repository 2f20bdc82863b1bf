"""Free group words as ASCII strings.

Generator ``k`` is the letter ``chr(ord('a') + k)`` and its inverse is the
upper-case letter, so ``"aB"`` means a b^-1. Letters are ordered
a < A < b < B < ...; canonical forms use that order.
"""

from __future__ import annotations

import string

from dataclasses import dataclass, field

LOWER = string.ascii_lowercase

_RANK = {}
for _k, _ch in enumerate(LOWER):
    _RANK[_ch] = chr(2 * _k)
    _RANK[_ch.upper()] = chr(2 * _k + 1)
_ORDER = str.maketrans(_RANK)


class WordError(ValueError):
    pass


def order_key(w: str) -> str:
    """Sort key realising the letter order a < A < b < B < ..."""
    return w.translate(_ORDER)


def alphabet(rank: int) -> list[str]:
    out = []
    for ch in LOWER[:rank]:
        out += [ch, ch.upper()]
    return out


def inverse(w: str) -> str:
    return w[::-1].swapcase()


def reduce(w: str) -> str:
    out: list[str] = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def mul(*ws: str) -> str:
    return reduce("".join(ws))


def power(w: str, n: int) -> str:
    if n < 0:
        return reduce(inverse(w) * -n)
    return reduce(w * n)


def is_reduced(w: str) -> bool:
    return all(w[i] != w[i + 1].swapcase() for i in range(len(w) - 1))


def cyclic_reduce(w: str) -> tuple[str, str]:
    """Split reduced ``w`` as p c p^-1 with c cyclically reduced; return (p, c)."""
    w = reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == w[j - 1].swapcase():
        i += 1
        j -= 1
    return w[:i], w[i:j]


def rotations(w: str) -> list[str]:
    return [w[k:] + w[:k] for k in range(len(w))] if w else [""]


def least_rotation(ws) -> str:
    best = None
    for w in ws:
        for r in rotations(w):
            if best is None or order_key(r) < order_key(best):
                best = r
    return best


def primitive_root(c: str) -> tuple[str, int]:
    """Return (r, p) with c = r^p for a cyclically reduced ``c``."""
    n = len(c)
    for d in range(1, n + 1):
        if n % d == 0 and c[:d] * (n // d) == c:
            return c[:d], n // d
    return c, 1


@dataclass(frozen=True, order=True)
class ConjClass:
    """Unoriented conjugacy class, stored as its least cyclic rotation."""

    word: str

    def __str__(self):
        return self.word


def conj_canonical(w: str) -> ConjClass:
    _, c = cyclic_reduce(w)
    if not c:
        raise WordError("identity has no conjugacy class")
    return ConjClass(least_rotation([c, inverse(c)]))


def oriented_canonical(w: str) -> str:
    """Least rotation of the cyclic reduction, orientation kept."""
    _, c = cyclic_reduce(w)
    return least_rotation([c])


def conjugator(x: str, y: str) -> str | None:
    """Return u with x = u y u^-1 in the free group, or None."""
    p, cx = cyclic_reduce(x)
    q, cy = cyclic_reduce(y)
    if len(cx) != len(cy):
        return None
    if not cx:
        return ""
    for k in range(len(cy)):
        if cy[k:] + cy[:k] == cx:
            # cx = s^-1 cy s with s = cy[:k]
            s = cy[:k]
            return mul(p, inverse(s), inverse(q))
    return None


# ---------------------------------------------------------------- Stallings


@dataclass
class SubgroupGraph:
    """Folded graph of a finitely generated subgroup; vertex 0 is the base."""

    out: list[dict[str, int]] = field(default_factory=lambda: [{}])

    @classmethod
    def from_generators(cls, gens) -> "SubgroupGraph":
        edges: dict[int, dict[str, set[int]]] = {0: {}}

        def add(v, ch, u):
            edges[v].setdefault(ch, set()).add(u)
            edges[u].setdefault(ch.swapcase(), set()).add(v)

        for w in gens:
            w = reduce(w)
            v = 0
            for k, ch in enumerate(w):
                if k == len(w) - 1:
                    nxt = 0
                else:
                    nxt = len(edges)
                    edges[nxt] = {}
                add(v, ch, nxt)
                v = nxt
        return cls(_fold(edges))

    @property
    def n_vertices(self) -> int:
        return len(self.out)

    def is_folded(self) -> bool:
        return all(self.out[u].get(ch.swapcase()) == v
                   for v, d in enumerate(self.out) for ch, u in d.items())

    def canonical_form(self) -> tuple:
        """Basepoint-rooted BFS labelling; equal iff the subgroups are equal."""
        return tuple(tuple(sorted(d.items())) for d in self.out)


def _fold(edges: dict[int, dict[str, set[int]]]) -> list[dict[str, int]]:
    parent = {v: v for v in edges}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # identify targets sharing a source and label until nothing changes
    changed = True
    while changed:
        changed = False
        adj: dict[int, dict[str, set[int]]] = {}
        for v, d in edges.items():
            row = adj.setdefault(find(v), {})
            for ch, ts in d.items():
                row.setdefault(ch, set()).update(find(t) for t in ts)
        for row in adj.values():
            for ts in row.values():
                roots = {find(t) for t in ts}
                if len(roots) > 1:
                    keep = min(roots)
                    for r in roots:
                        parent[r] = keep
                    changed = True
    edges = adj
    folded = {v: {ch: find(next(iter(ts))) for ch, ts in d.items()}
              for v, d in edges.items() if find(v) == v}
    # renumber by BFS from the base, letters visited in canonical order
    base = find(0)
    order, seen = [base], {base: 0}
    for v in order:
        for ch in sorted(folded[v], key=order_key):
            u = folded[v][ch]
            if u not in seen:
                seen[u] = len(order)
                order.append(u)
    return [{ch: seen[u] for ch, u in folded[v].items()} for v in order]


def membership(g: SubgroupGraph, w: str) -> bool:
    v = 0
    for ch in reduce(w):
        v = g.out[v].get(ch)
        if v is None:
            return False
    return v == 0


def same_subgroup(gens1, gens2) -> bool:
    g1 = SubgroupGraph.from_generators(gens1)
    g2 = SubgroupGraph.from_generators(gens2)
    return (all(membership(g1, w) for w in gens2)
            and all(membership(g2, w) for w in gens1))


# --------------------------------------------------------------- automorphisms


@dataclass(frozen=True)
class Automorphism:
    name: str
    images: tuple[str, ...]
    inverse_images: tuple[str, ...]
    pmod_checked: bool = False

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(reduce(w) for w in self.images))
        object.__setattr__(self, "inverse_images", tuple(reduce(w) for w in self.inverse_images))
        for k, ch in enumerate(LOWER[:len(self.images)]):
            if _substitute(self.inverse_images, _substitute(self.images, ch)) != ch:
                raise WordError(f"{self.name}: stated inverse does not invert generator {ch}")

    @property
    def rank(self) -> int:
        return len(self.images)

    def inverse(self) -> "Automorphism":
        name = self.name[:-1] if self.name.endswith("'") else self.name + "'"
        return Automorphism(name, self.inverse_images, self.images, self.pmod_checked)

    def __call__(self, w: str) -> str:
        return _substitute(self.images, w)

    def then(self, other: "Automorphism") -> "Automorphism":
        """The automorphism ``w -> other(self(w))``."""
        imgs = tuple(other(x) for x in self.images)
        inv = tuple(self.inverse()(x) for x in other.inverse_images)
        return Automorphism(f"{self.name}.{other.name}", imgs, inv, False)

    def verify_pmod(self, peripheral_words) -> "Automorphism":
        """Check every peripheral word is sent to a conjugate of itself."""
        for p in peripheral_words:
            if oriented_canonical(self(p)) != oriented_canonical(p):
                raise WordError(f"{self.name} does not fix the peripheral class {p}")
        return Automorphism(self.name, self.images, self.inverse_images, True)


def _substitute(images, w: str) -> str:
    parts = []
    for ch in w:
        k = ord(ch.lower()) - 97
        parts.append(images[k] if ch.islower() else inverse(images[k]))
    return reduce("".join(parts))


def apply_automorphism(phi: Automorphism, w: str) -> str:
    return phi(w)


def identity_automorphism(rank: int) -> Automorphism:
    gens = tuple(LOWER[:rank])
    return Automorphism("id", gens, gens)
