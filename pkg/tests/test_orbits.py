import pytest

from arccount import words as W
from arccount.assoc import associate
from arccount.orbits import (InOrbit, NotDecided, UnsupportedSurface, act, classify_type,
                             measure, orbit_census, pmod_generators, replay)
from arccount.surface import (INFINITE, ArcClass, boundary_collar_clearance,
                              build_one_holed_torus, penetration_depth, preset,
                              self_intersections)
from arccount.words import ConjClass, conj_canonical
from oracles import brute_curve_iota, brute_curves

T = preset("one_holed_torus")
Q = preset("punctured_torus")


def gen(s, name):
    return {g.name: g for g in pmod_generators(s)}[name]


def test_generators():
    gens = pmod_generators(Q)
    assert [g.name for g in gens] == ["Ta", "Ta'", "Tb", "Tb'"]
    assert all(g.pmod_checked for g in gens)
    ta = gens[0]
    assert conj_canonical(ta("abAB")) == conj_canonical("abAB")
    assert act(Q, ta, ConjClass("b")) == conj_canonical("ba")
    for x in ("a", "b"):
        assert gens[1](ta(x)) == x


def test_generators_need_a_torus():
    with pytest.raises(UnsupportedSurface):
        pmod_generators(preset("cusped_pants"))


def test_zero_slack_keeps_seed():
    s = build_one_holed_torus(3.0, 4.0, 6.0)
    a = ConjClass("a")
    orb = orbit_census(s, a, measure(s, a), slack=0.0)
    assert set(orb.elements) == {a}
    assert orb.elements[a] == (pytest.approx(measure(s, a)), ())
    with pytest.raises(ValueError):
        orbit_census(s, a, measure(s, a) - 0.1)


def test_simple_curve_orbit_matches_oracle():
    L = 10.0
    orb = orbit_census(Q, ConjClass("a"), L)
    assert orb.frontier_exhausted
    short = {c for c in orb.elements if len(c.word) <= 6}
    simple = set()
    for c in brute_curves(Q, L, 6):
        root, _ = W.primitive_root(c.word)
        if root == c.word and brute_curve_iota(Q, c.word) == 0:
            simple.add(c)
    assert short == simple
    assert len(simple) >= 6


def test_every_element_replays():
    orb = orbit_census(T, ArcClass(0, 0, "a"), 12.0)
    for key, (ell, chain) in orb.elements.items():
        assert replay(T, orb.seed, chain) == key
        assert ell <= 12.0 + 1e-9


def test_slack_stability():
    for s, seed, L in ((T, ArcClass(0, 0, "a"), 14.0), (Q, ConjClass("a"), 14.0),
                       (Q, ArcClass(0, 0, "a", INFINITE), 14.0)):
        a = orbit_census(s, seed, L, slack=4.0)
        b = orbit_census(s, seed, L, slack=8.0)
        assert set(a.elements) == set(b.elements)


def test_threads_deterministic():
    a = orbit_census(T, ArcClass(0, 0, "a"), 14.0)
    b = orbit_census(T, ArcClass(0, 0, "a"), 14.0, threads=4)
    assert a.to_csv() == b.to_csv()


def test_budget_flag():
    orb = orbit_census(Q, ConjClass("a"), 30.0, budget=50)
    assert not orb.frontier_exhausted


def test_iota_and_depth_constant_along_orbits():
    seed = conj_canonical("abAb")
    orb = orbit_census(Q, seed, 12.0)
    assert len(orb.elements) > 3
    for c in orb.elements:
        assert self_intersections(Q, c) == 1
    depths = [penetration_depth(Q, c) for c in orb.elements]
    assert min(depths) > 0
    arcs = orbit_census(T, ArcClass(0, 0, "aab"), 14.0)
    iotas = {self_intersections(T, a) for a in arcs.elements}
    assert len(iotas) == 1
    assert min(boundary_collar_clearance(T, associate(T, a)) for a in arcs.elements) > 0


def test_orbit_maps_onto_curve_orbit():
    L = 9.0
    C = T.C_X
    seed = ArcClass(0, 0, "a")
    arcs = orbit_census(T, seed, L)
    images = {associate(T, a) for a in arcs.elements}
    curves = orbit_census(T, associate(T, seed), 2 * L + C)
    assert images <= set(curves.elements)
    inner = {c for c, (ell, _) in curves.elements.items() if ell <= 2 * L - C}
    assert inner <= images


def test_classify_type():
    seed = ConjClass("b")
    assert classify_type(Q, seed, seed) == InOrbit(())
    assert classify_type(Q, act(Q, gen(Q, "Ta"), seed), seed) == InOrbit(("Ta",))
    far = replay(Q, seed, ("Ta", "Tb", "Ta", "Ta"))
    res = classify_type(Q, far, seed)
    assert isinstance(res, InOrbit)
    assert replay(Q, seed, res.chain) == far


def test_classify_undecided():
    deep = conj_canonical(W.mul("a", W.power("abAB", 2)))
    res = classify_type(Q, deep, ConjClass("a"), budget=50)
    assert isinstance(res, NotDecided)
    assert isinstance(classify_type(Q, ArcClass(0, 0, "a", INFINITE), ConjClass("a")),
                      NotDecided)


def test_csv():
    orb = orbit_census(T, ArcClass(0, 0, "a"), 8.0)
    lines = orb.to_csv().split("\r\n")
    assert lines[0] == "key,length,chain"
    assert lines[1].startswith("0:a:0,") and lines[1].endswith(",")
    names = {g.name for g in pmod_generators(T)}
    for line in lines[2:-1]:
        assert set(line.rsplit(",", 1)[1].split(";")) <= names
