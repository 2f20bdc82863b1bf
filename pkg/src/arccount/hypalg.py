"""Numerical kernel for the upper half-plane.

Isometries are unit-determinant 2x2 real matrices acting by Mobius
transformations. Boundary points are floats, with ``math.inf`` standing
for the point at infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

INF = math.inf
EPS_CLS = 1e-9


class GeometryError(ValueError):
    pass


class Kind(Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity"


def arccosh(x: float) -> float:
    if x < 1.0:
        if x > 1.0 - 1e-12:
            return 0.0
        raise GeometryError(f"arccosh of {x!r} < 1")
    if x <= 1.0 + 1e-12:
        return math.sqrt(2.0 * (x - 1.0))
    return math.log(x + math.sqrt(x * x - 1.0))


@dataclass(frozen=True, slots=True)
class Mat2:
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def make(cls, a, b, c, d) -> "Mat2":
        """Scale to determinant one and flip sign so the trace is >= 0."""
        det = a * d - b * c
        if det <= 0:
            raise GeometryError(f"determinant {det!r} is not positive")
        s = 1.0 / math.sqrt(det)
        if a + d < 0:
            s = -s
        return cls(a * s, b * s, c * s, d * s)

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inv(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def normalized(self) -> "Mat2":
        return Mat2.make(self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def rows(self) -> list[list[float]]:
        return [[self.a, self.b], [self.c, self.d]]

    def close_to(self, o: "Mat2", tol: float = 1e-9) -> bool:
        p = max(abs(self.a - o.a), abs(self.b - o.b), abs(self.c - o.c), abs(self.d - o.d))
        m = max(abs(self.a + o.a), abs(self.b + o.b), abs(self.c + o.c), abs(self.d + o.d))
        return min(p, m) <= tol


def mobius(m: Mat2, z):
    """Apply ``m`` to a boundary point (float or INF) or a complex point."""
    if isinstance(z, complex):
        return (m.a * z + m.b) / (m.c * z + m.d)
    if z == INF:
        return INF if m.c == 0.0 else m.a / m.c
    den = m.c * z + m.d
    if den == 0.0:
        return INF
    return (m.a * z + m.b) / den


def classify(m: Mat2) -> Kind:
    t = abs(m.trace)
    if t > 2.0 + EPS_CLS:
        return Kind.HYPERBOLIC
    if t < 2.0 - EPS_CLS:
        return Kind.ELLIPTIC
    if max(abs(m.b), abs(m.c), abs(abs(m.a) - 1.0), abs(abs(m.d) - 1.0)) <= EPS_CLS:
        return Kind.IDENTITY
    return Kind.PARABOLIC


def translation_length(m: Mat2) -> float:
    k = classify(m)
    if k is Kind.PARABOLIC:
        return 0.0
    if k is not Kind.HYPERBOLIC:
        raise GeometryError("not a geodesic class")
    return 2.0 * arccosh(abs(m.trace) / 2.0)


@dataclass(frozen=True, slots=True)
class IdealGeodesic:
    u: float
    v: float

    def __post_init__(self):
        if self.u == self.v:
            raise GeometryError("geodesic endpoints must be distinct")

    @classmethod
    def of(cls, u, v) -> "IdealGeodesic":
        # stored unordered: finite endpoints ascending, INF last
        if u > v:
            u, v = v, u
        return cls(u, v)

    @property
    def endpoints(self) -> tuple[float, float]:
        return (self.u, self.v)

    def moved(self, m: Mat2) -> "IdealGeodesic":
        return IdealGeodesic.of(mobius(m, self.u), mobius(m, self.v))


def fixed_points(m: Mat2) -> tuple[float, ...]:
    a, b, c, d = m.a, m.b, m.c, m.d
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(c) <= 1e-15 * scale:
        if abs(d - a) <= 1e-15 * scale:
            return (INF,)
        return (b / (d - a), INF)
    disc = (a + d) ** 2 - 4.0
    if disc < 0:
        return ()
    r = math.sqrt(disc)
    # numerically stable pair of roots of c z^2 + (d - a) z - b = 0
    q = -0.5 * ((d - a) + math.copysign(r, d - a if d != a else 1.0))
    z1 = q / c
    z2 = -b / q if q != 0 else (a - d) / (2 * c)
    if disc <= 4.0 * EPS_CLS:
        return ((a - d) / (2.0 * c),)
    return (z1, z2)


def axis(m: Mat2) -> IdealGeodesic:
    if classify(m) is not Kind.HYPERBOLIC:
        raise GeometryError("axis of a non-hyperbolic element")
    u, v = fixed_points(m)
    return IdealGeodesic.of(u, v)


def attracting_fixed_point(m: Mat2) -> float:
    """Forward limit point of a hyperbolic or parabolic element."""
    pts = fixed_points(m)
    if len(pts) == 1:
        return pts[0]
    for z in pts:
        # derivative of the Mobius map at z is 1/(cz+d)^2
        if z == INF:
            if abs(m.a) > abs(m.d):
                return z
            continue
        if abs(m.c * z + m.d) > 1.0:
            return z
    raise GeometryError("no attracting fixed point")


def normalizer(g: IdealGeodesic) -> Mat2:
    """Orientation-preserving map sending ``g.u`` to 0 and ``g.v`` to INF."""
    u, v = g.u, g.v
    if v == INF:
        return Mat2(1.0, -u, 0.0, 1.0)
    if u == INF:
        return Mat2(0.0, -1.0, 1.0, -v)
    # z -> (z - u) / (z - v) has determinant u - v < 0; negate the top row
    m = Mat2(-1.0, u, 1.0, -v)
    return Mat2.make(m.a, m.b, m.c, m.d)


def interleaved(g1: IdealGeodesic, g2: IdealGeodesic) -> bool:
    """True when the endpoint pairs separate each other on the circle."""
    n = normalizer(g1)
    p, q = mobius(n, g2.u), mobius(n, g2.v)
    if p in (0.0, INF) or q in (0.0, INF):
        return False
    # endpoints shared up to rounding give ratios near 0 or INF; not a crossing
    if min(abs(p), abs(q)) <= 1e-9 * max(abs(p), abs(q)):
        return False
    return (p < 0) != (q < 0)


def geodesic_distance(g1: IdealGeodesic, g2: IdealGeodesic) -> float:
    n = normalizer(g1)
    p, q = mobius(n, g2.u), mobius(n, g2.v)
    if p == INF or q == INF or p == 0.0 or q == 0.0:
        return 0.0
    if (p < 0) != (q < 0):
        raise GeometryError("geodesics cross")
    p, q = sorted((abs(p), abs(q)))
    if q == p:
        return 0.0
    return arccosh((p + q) / (q - p))


def point_geodesic_distance(z: complex, g: IdealGeodesic) -> float:
    if z.imag <= 0:
        raise GeometryError("point not in the upper half-plane")
    w = mobius(normalizer(g), z)
    return math.asinh(abs(w.real) / w.imag)


def point_distance(z: complex, w: complex) -> float:
    return arccosh(1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


@dataclass(frozen=True, slots=True)
class Horoball:
    """Horoball based at ``base``; ``size`` is the height when the base is
    INF, otherwise the Euclidean diameter of the tangent disc."""

    base: float
    size: float

    def __post_init__(self):
        if not self.size > 0:
            raise GeometryError("horoball size must be positive")


def cusp_frame(m: Mat2) -> tuple[Mat2, float]:
    """Return (g, s) with g(INF) the fixed point of parabolic ``m`` and
    g^-1 m g = +-[[1, s], [0, 1]]."""
    if classify(m) is not Kind.PARABOLIC:
        raise GeometryError("not a parabolic element")
    scale = max(abs(m.a), abs(m.b), abs(m.c), abs(m.d))
    q = INF if abs(m.c) <= 1e-15 * scale else (m.a - m.d) / (2.0 * m.c)
    if q == INF:
        g = Mat2.identity()
    else:
        g = Mat2(q, -1.0, 1.0, 0.0)
    n = (g.inv() @ m @ g)
    s = n.b / n.a
    return g, s


def horoball_of_parabolic(m: Mat2, t: float) -> Horoball:
    """Horoball whose quotient by ``m`` has area ``t``."""
    if not 0 < t <= 2:
        raise GeometryError("area must lie in (0, 2]")
    g, s = cusp_frame(m)
    h = abs(s) / t
    base = mobius(g, INF)
    if base == INF:
        return Horoball(INF, h)
    # z -> q - 1/z maps {Im z > h} onto the disc tangent at q of diameter 1/h
    return Horoball(base, 1.0 / h)
