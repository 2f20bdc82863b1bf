"""Arc-to-curve association and length distortion.

An arc class (i, w, j) lifts to a path from the i-th peripheral lift to the
w-translate of the j-th. Going out along the arc, once around the far
peripheral element, back, and once around the near one gives the loop
w p_j w^-1 p_i, whose class is the associated curve. With peripheral
words written in the induced boundary orientation this loop bounds an
immersed pair of pants, which is what makes the length identities exact.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass

from . import words as W
from .hypalg import GeometryError, translation_length
from .surface import (COMPACT, INFINITE, ArcClass, SurfaceModel, arc_length,
                      curve_length, infinite_arc_t_length)
from .words import ConjClass


def _associate(s: SurfaceModel, a: ArcClass) -> ConjClass:
    pi = s.peripheral(a.kind, a.end_i)
    pj = s.peripheral(a.kind, a.end_j)
    loop = W.mul(a.word, pj, W.inverse(a.word), pi)
    if not W.cyclic_reduce(loop)[1]:
        raise GeometryError("degenerate arc class: trivial associated loop")
    c = W.conj_canonical(loop)
    root = W.conj_canonical(W.primitive_root(c.word)[0])
    if root != c and root in s.peripheral_classes:
        raise GeometryError("degenerate arc class: associated loop is a peripheral power")
    # on a pants model the seams go to the third cuff, which is peripheral
    if c in s.peripheral_classes and not s.is_pants_oracle:
        raise GeometryError("degenerate arc class: peripheral associated loop")
    return c


def loop_length(s: SurfaceModel, c: ConjClass) -> float:
    """Curve length, also accepting cuffs of a pants model."""
    if s.is_pants_oracle and c in s.peripheral_classes:
        return translation_length(s.matrix(c.word))
    return curve_length(s, c)


def associate_compact(s: SurfaceModel, a: ArcClass) -> ConjClass:
    if a.kind != COMPACT:
        raise GeometryError("expected a compact arc")
    return _associate(s, a)


def associate_infinite(s: SurfaceModel, a: ArcClass) -> ConjClass:
    if a.kind != INFINITE:
        raise GeometryError("expected an infinite arc")
    return _associate(s, a)


def associate(s: SurfaceModel, a: ArcClass) -> ConjClass:
    return _associate(s, a)


@dataclass(frozen=True)
class AssociationRecord:
    arc: ArcClass
    curve: ConjClass
    arc_length: float
    curve_length: float
    t: float | None = None

    @property
    def distortion(self) -> float:
        return self.curve_length - 2 * self.arc_length


def arc_measure(s: SurfaceModel, a: ArcClass, t: float = 1.0) -> float:
    if a.kind == COMPACT:
        return arc_length(s, a).length
    return infinite_arc_t_length(s, a, t).length


def association_record(s: SurfaceModel, a: ArcClass, t: float = 1.0) -> AssociationRecord:
    c = associate(s, a)
    return AssociationRecord(a, c, arc_measure(s, a, t), loop_length(s, c),
                             None if a.kind == COMPACT else t)


def associate_census(s: SurfaceModel, census) -> list[AssociationRecord]:
    out = []
    for r in census.records:
        c = associate(s, r.key)
        out.append(AssociationRecord(r.key, c, r.length, loop_length(s, c), census.t))
    return out


def records_to_csv(records) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\r\n")
    wr.writerow(["arc", "curve", "arc_length", "curve_length", "distortion"])
    for r in records:
        wr.writerow([str(r.arc), str(r.curve), f"{r.arc_length:.17g}",
                     f"{r.curve_length:.17g}", f"{r.distortion:.17g}"])
    return buf.getvalue()


# ------------------------------------------------------------------ fibers


@dataclass
class FiberReport:
    fibers: dict
    sizes: dict
    k: int | None
    certified: bool
    note: str = ""


def fiber_statistics(s: SurfaceModel, arc_census, curve_targets, C: float | None = None,
                     arc_filter=None) -> FiberReport:
    """Group census arcs by associated curve over the given target curves.

    ``curve_targets`` maps target ConjClass to its length (or is an
    iterable of ConjClass). Sizes are certified only when the census is
    certified out to (longest target + C)/2, since every arc whose curve
    is a target has length at most that.
    """
    if C is None:
        C = s.C_X
    if not isinstance(curve_targets, dict):
        curve_targets = {c: curve_length(s, c) for c in curve_targets}
    need = (max(curve_targets.values(), default=0.0) + C) / 2
    fibers = defaultdict(list)
    for r in arc_census.records:
        if arc_filter is not None and not arc_filter(r.key):
            continue
        c = associate(s, r.key)
        if c in curve_targets:
            fibers[c].append(r.key)
    fibers = {c: sorted(fibers.get(c, [])) for c in sorted(curve_targets)}
    sizes = {c: len(v) for c, v in fibers.items()}
    ok = arc_census.certificate.certified and arc_census.L >= need - 1e-12
    if not ok:
        note = (f"arc census must be certified to L >= {need:.6g}; "
                f"have L = {arc_census.L:.6g}, certified = {arc_census.certificate.certified}")
        return FiberReport(fibers, sizes, None, False, note)
    values = set(sizes.values())
    k = values.pop() if len(values) == 1 else None
    return FiberReport(fibers, sizes, k, True, "" if k is not None else "fiber sizes differ")


# ------------------------------------------------------------------ weighted multi-classes


@dataclass(frozen=True)
class MultiClass:
    components: tuple

    def __post_init__(self):
        comps = tuple((float(wt), key) for wt, key in self.components)
        if not comps:
            raise ValueError("a multi-class needs at least one component")
        if any(not wt > 0 for wt, _ in comps):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "components", comps)

    @property
    def total_weight(self) -> float:
        return sum(wt for wt, _ in self.components)


def multi_length(s: SurfaceModel, m: MultiClass, t: float = 1.0) -> float:
    total = 0.0
    for wt, key in m.components:
        if isinstance(key, ArcClass):
            total += wt * arc_measure(s, key, t)
        else:
            total += wt * curve_length(s, key)
    return total


def associate_multi(s: SurfaceModel, m: MultiClass) -> MultiClass:
    return MultiClass(tuple((wt, associate(s, key)) for wt, key in m.components))


def multi_distortion(s: SurfaceModel, m: MultiClass) -> tuple[float, float]:
    """(|l(curve) - 2 l(arc)|, allowed bound total_weight * C(X))."""
    gap = abs(multi_length(s, associate_multi(s, m)) - 2 * multi_length(s, m))
    return gap, m.total_weight * s.C_X
