"""Closed-form length identities relating arcs and their associated curves.

Compact arcs: an arc of length l between cuffs of lengths c_i, c_j is the
seam of an immersed pair of pants whose third cuff has length
2 arccosh(A cosh l - B), A = sinh(c_i/2) sinh(c_j/2), B = cosh(c_i/2) cosh(c_j/2).

Infinite arcs: an arc whose t-truncation has length l and one component
is the seam of an immersed pants with two cusps, and the third cuff has
length 4 arccosh((t/2) e^(l/2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypalg import GeometryError, arccosh

SAFETY = 1.001


@dataclass(frozen=True)
class PantsDims:
    cuff_i: float
    cuff_j: float

    def __post_init__(self):
        if not (self.cuff_i > 0 and self.cuff_j > 0):
            raise GeometryError("cuff lengths must be positive")

    @property
    def A(self) -> float:
        return math.sinh(self.cuff_i / 2) * math.sinh(self.cuff_j / 2)

    @property
    def B(self) -> float:
        return math.cosh(self.cuff_i / 2) * math.cosh(self.cuff_j / 2)

    @classmethod
    def from_AB(cls, A: float, B: float) -> "PantsDims":
        """Equal cuffs realising a given A (B is then determined)."""
        c = 2 * math.asinh(math.sqrt(A))
        dims = cls(c, c)
        if abs(dims.B - B) > 1e-9 * B:
            raise GeometryError(f"A={A}, B={B} is not realised by equal cuffs")
        return dims


@dataclass(frozen=True)
class CuspQuadDims:
    t: float

    def __post_init__(self):
        if not 0 < self.t <= 1:
            raise GeometryError("t must lie in (0, 1]")


def min_arc_len(p: PantsDims) -> float:
    return arccosh((p.B + 1) / p.A)


def curve_len_from_arc(p: PantsDims, arc_len: float) -> float:
    m = min_arc_len(p)
    if arc_len < m - 1e-12:
        raise GeometryError(f"below minimal arc length m_ij = {m}")
    x = p.A * math.cosh(max(arc_len, m)) - p.B
    return 2 * arccosh(max(x, 1.0))


def arc_len_from_curve(p: PantsDims, curve_len: float) -> float:
    if curve_len < 0:
        raise GeometryError("curve length must be nonnegative")
    return arccosh((math.cosh(curve_len / 2) + p.B) / p.A)


def error_E(p: PantsDims, ell: float) -> float:
    return curve_len_from_arc(p, ell) - 2 * ell


def error_E_limit(p: PantsDims) -> float:
    return 2 * math.log(p.A)


def bound_C_of_X(cuff_lengths, grid: int = 10_000) -> float:
    """Upper bound for |E_ij| over all ordered pairs of boundary components."""
    cuffs = list(cuff_lengths)
    if not cuffs:
        raise GeometryError("need at least one boundary length")
    best = 0.0
    for ci in cuffs:
        for cj in cuffs:
            p = PantsDims(ci, cj)
            m = min_arc_len(p)
            limit = error_E_limit(p)
            # E rises from -2m towards its limit; sample densely near m, where
            # all the curvature lives, then out to where E has settled
            span = max(20.0, abs(limit) + 20.0)
            ls = m + span * np.linspace(0.0, 1.0, grid) ** 3
            x = np.maximum(p.A * np.cosh(ls) - p.B, 1.0)
            e = 2 * np.arccosh(x) - 2 * ls
            best = max(best, float(np.max(np.abs(e))), abs(limit), 2 * m)
    return best * SAFETY


def cusp_min_t_len(t: float) -> float:
    return 2 * math.log(2 / t)


def cusp_curve_from_t_len(q: CuspQuadDims, t_len: float) -> float:
    m = cusp_min_t_len(q.t)
    if t_len < m - 1e-12:
        raise GeometryError(f"t-length below m_t = {m}")
    return 4 * arccosh(max(q.t / 2 * math.exp(t_len / 2), 1.0))


def cusp_t_len_from_curve(q: CuspQuadDims, curve_len: float) -> float:
    if curve_len < 0:
        raise GeometryError("curve length must be nonnegative")
    return 2 * math.log(2 * math.cosh(curve_len / 4) / q.t)


def error_E_t(q: CuspQuadDims, ell: float) -> float:
    return cusp_curve_from_t_len(q, ell) - 2 * ell


def error_E_t_limit(q: CuspQuadDims) -> float:
    return 4 * math.log(q.t)


def lambda_from_truncated(tr_len: float) -> float:
    return math.exp(tr_len / 2)


def t_vs_truncated_gap(t_alpha: float) -> float:
    if not 0 < t_alpha <= 1:
        raise GeometryError("t_alpha must lie in (0, 1]")
    return 2 * math.log(1 / t_alpha)
