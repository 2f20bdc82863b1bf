import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arccount.hypalg import (INF, GeometryError, Horoball, IdealGeodesic, Kind, Mat2, arccosh,
                             attracting_fixed_point, axis, classify, cusp_frame, fixed_points,
                             geodesic_distance, horoball_of_parabolic, interleaved, mobius,
                             normalizer, point_distance, point_geodesic_distance,
                             translation_length)
from oracles import numeric_geodesic_distance

finite = st.floats(-50, 50, allow_nan=False)


def test_make_normalizes():
    m = Mat2.make(-2.0, 0.0, 0.0, -2.0)
    assert m.det == pytest.approx(1.0)
    assert m.trace >= 0
    with pytest.raises(GeometryError):
        Mat2.make(0.0, 1.0, 1.0, 0.0)


def test_classify():
    assert classify(Mat2(2.0, 0.0, 0.0, 0.5)) is Kind.HYPERBOLIC
    assert classify(Mat2(1.0, 1.0, 0.0, 1.0)) is Kind.PARABOLIC
    assert classify(Mat2(0.0, -1.0, 1.0, 0.0)) is Kind.ELLIPTIC
    assert classify(Mat2.identity()) is Kind.IDENTITY


def test_translation_length():
    m = Mat2(math.e, 0.0, 0.0, 1 / math.e)
    assert translation_length(m) == pytest.approx(2.0, abs=1e-14)
    assert translation_length(Mat2(1.0, 3.0, 0.0, 1.0)) == 0.0
    with pytest.raises(GeometryError):
        translation_length(Mat2(0.0, -1.0, 1.0, 0.0))


def test_arccosh_edges():
    assert arccosh(1.0) == 0.0
    assert arccosh(1.0 - 1e-14) == 0.0
    with pytest.raises(GeometryError):
        arccosh(0.5)


def test_mobius_infinity():
    m = Mat2(1.0, 2.0, 1.0, 3.0)
    assert mobius(m, INF) == 1.0
    assert mobius(m, -3.0) == INF
    assert mobius(Mat2(2.0, 0.0, 0.0, 0.5), INF) == INF


@given(finite, finite)
def test_normalizer_sends_ends(u, v):
    if abs(u - v) < 1e-3:
        return
    g = IdealGeodesic.of(u, v)
    n = normalizer(g)
    assert abs(mobius(n, g.u)) < 1e-9
    assert mobius(n, g.v) == INF or abs(mobius(n, g.v)) > 1e12


def test_fixed_points_and_axis():
    m = Mat2.make(2.0, 1.0, 1.0, 1.0)
    pts = fixed_points(m)
    for z in pts:
        assert mobius(m, z) == pytest.approx(z)
    ax = axis(m)
    assert list(ax.endpoints) == pytest.approx(sorted(pts))
    z = attracting_fixed_point(m)
    assert mobius(m, mobius(m, z + 0.1)) == pytest.approx(z, abs=0.05)


def test_interleaved():
    assert interleaved(IdealGeodesic.of(-1, 1), IdealGeodesic.of(0, 5))
    assert not interleaved(IdealGeodesic.of(-1, 1), IdealGeodesic.of(2, 5))
    assert not interleaved(IdealGeodesic.of(-1, 1), IdealGeodesic.of(1, 5))


def test_distance_examples():
    g1 = IdealGeodesic.of(-1.0, 1.0)
    assert geodesic_distance(g1, IdealGeodesic.of(-2.0, 2.0)) == pytest.approx(math.log(2))
    assert geodesic_distance(g1, IdealGeodesic.of(1.0, 3.0)) == 0.0
    with pytest.raises(GeometryError):
        geodesic_distance(g1, IdealGeodesic.of(0.0, 3.0))


def test_distance_matches_minimizer():
    rng = random.Random(2)
    done = 0
    while done < 100:
        pts = sorted(rng.uniform(-10, 10) for _ in range(4))
        if min(b - a for a, b in zip(pts, pts[1:])) < 1e-2:
            continue
        if rng.random() < 0.5:
            g1, g2 = IdealGeodesic.of(pts[0], pts[1]), IdealGeodesic.of(pts[2], pts[3])
        else:
            g1, g2 = IdealGeodesic.of(pts[0], pts[3]), IdealGeodesic.of(pts[1], pts[2])
        d = geodesic_distance(g1, g2)
        assert abs(d - numeric_geodesic_distance(g1, g2)) < 1e-8
        done += 1


@given(finite, st.floats(0.01, 10), finite, st.floats(0.01, 10))
@settings(max_examples=200)
def test_point_distance_symmetric(x1, y1, x2, y2):
    z, w = complex(x1, y1), complex(x2, y2)
    assert point_distance(z, w) == pytest.approx(point_distance(w, z), abs=1e-9)


def test_point_geodesic_distance():
    g = IdealGeodesic.of(0.0, INF)
    assert point_geodesic_distance(complex(0, 3), g) == 0.0
    assert point_geodesic_distance(complex(1, 1), g) == pytest.approx(math.asinh(1.0))


def test_cusp_frame_and_horoball():
    m = Mat2(1.0, 0.0, 2.0, 1.0)  # parabolic fixing 0
    g, s = cusp_frame(m)
    assert mobius(g, INF) == pytest.approx(0.0)
    n = g.inv() @ m @ g
    assert abs(n.c) < 1e-12 and abs(abs(n.a) - 1) < 1e-12
    h = horoball_of_parabolic(Mat2(1.0, 2.0, 0.0, 1.0), 1.0)
    assert h == Horoball(INF, 2.0)
    with pytest.raises(GeometryError):
        horoball_of_parabolic(Mat2(1.0, 2.0, 0.0, 1.0), 3.0)
    with pytest.raises(GeometryError):
        Horoball(0.0, -1.0)
