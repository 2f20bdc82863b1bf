import math

import pytest

from arccount.census import (CURVE, certify, enumerate_compact_arcs, enumerate_curves,
                             enumerate_infinite_arcs)
from arccount.assoc import associate, loop_length
from arccount.hypalg import GeometryError
from arccount.surface import INFINITE, preset
from arccount.words import ConjClass
from oracles import brute_arcs, brute_curves

T = preset("one_holed_torus")
Q = preset("punctured_torus")
CP = preset("cusped_pants")
SYSTOLE = 2 * math.acosh(1.5)


def short(census, M=6):
    return {r.key for r in census.records if r.word_length <= M}


def test_curves_below_systole_empty():
    c = enumerate_curves(Q, SYSTOLE - 1e-3)
    assert c.records == []


def test_curves_at_systole():
    c = enumerate_curves(Q, SYSTOLE + 1e-6)
    assert set(c.keys) == {ConjClass("a"), ConjClass("b"), ConjClass("ab")}
    assert set(brute_curves(Q, SYSTOLE + 1e-6, 6)) == set(c.keys)


@pytest.mark.parametrize("s,L", [(T, 9.0), (Q, 6.0), (CP, 6.0)])
def test_curve_census_matches_brute_force(s, L):
    c = enumerate_curves(s, L)
    assert short(c) == set(brute_curves(s, L, 6))


def test_curve_counts_nondecreasing():
    counts = [len(enumerate_curves(T, L).records) for L in (4, 6, 8, 10)]
    assert counts == sorted(counts)


def test_compact_census_matches_brute_force():
    c = enumerate_compact_arcs(T, 7.0)
    assert c.certificate.certified
    assert short(c) == set(brute_arcs(T, 7.0, 6))


def test_compact_census_empty_below_minimum():
    assert enumerate_compact_arcs(T, 1.7).records == []


def test_cusped_pants_compact_census():
    c = enumerate_compact_arcs(CP, 5.0)
    assert short(c, 5) == set(brute_arcs(CP, 5.0, 5))


def test_infinite_census_matches_brute_force():
    c = enumerate_infinite_arcs(Q, 7.0, 1.0)
    assert short(c) == set(brute_arcs(Q, 7.0, 6, INFINITE, 1.0))
    assert all(r.t == 1.0 for r in c.records)


def test_cusped_pants_infinite_census():
    c = enumerate_infinite_arcs(CP, 5.0, 1.0)
    assert short(c, 4) == set(brute_arcs(CP, 5.0, 4, INFINITE, 1.0))


def test_infinite_census_below_minimum():
    assert enumerate_infinite_arcs(Q, 2 * math.log(2) - 0.01).records == []


def test_smaller_t_gives_subset():
    big = set(enumerate_infinite_arcs(Q, 7.0, 1.0).keys)
    small = set(enumerate_infinite_arcs(Q, 7.0, 0.5).keys)
    assert small <= big


def test_distortion_bound_holds_census_wide():
    c = enumerate_compact_arcs(T, 7.0)
    for r in c.records:
        gap = loop_length(T, associate(T, r.key)) - 2 * r.length
        assert abs(gap) <= T.C_X


def test_threads_do_not_change_output():
    a = enumerate_compact_arcs(T, 7.0, threads=1).to_csv()
    b = enumerate_compact_arcs(T, 7.0, threads=4).to_csv()
    assert a == b
    assert enumerate_curves(T, 8.0, threads=3).to_csv() == enumerate_curves(T, 8.0).to_csv()


def test_margin_does_not_change_census():
    a = enumerate_compact_arcs(T, 7.0, margin=2.0)
    b = enumerate_compact_arcs(T, 7.0, margin=4.0)
    assert a.keys == b.keys
    assert enumerate_curves(T, 8.0, margin=2.0).keys == enumerate_curves(T, 8.0, margin=4.0).keys


def test_certificate_logic():
    ok = certify({1: 3.0, 2: 9.0, 3: 9.5, 4: 10.0}, 6.0, 2.0)
    assert ok.certified and ok.max_word_length_scanned == 4
    # a short class planted in a late stratum must break the certificate
    bad = certify({1: 3.0, 2: 9.0, 3: 5.0, 4: 10.0}, 6.0, 2.0)
    assert not bad.certified
    assert not certify({1: 9.0, 2: 9.0, 3: 9.0}, 6.0, 2.0, budget_hit=True).certified


def test_budget_exhaustion_is_reported():
    c = enumerate_curves(T, 20.0, max_word_length=4)
    assert not c.certificate.certified
    assert "budget" in c.certificate.note


def test_csv_format():
    text = enumerate_curves(T, 6.0).to_csv()
    lines = text.split("\r\n")
    assert lines[0] == "kind,key,length,word_length,t"
    assert lines[1].startswith(CURVE + ",")
    assert text.endswith("\r\n")


def test_bad_inputs():
    with pytest.raises(GeometryError):
        enumerate_compact_arcs(Q, 5.0)
    with pytest.raises(GeometryError):
        enumerate_infinite_arcs(T, 5.0)
    with pytest.raises(ValueError):
        enumerate_curves(T, -1.0)
