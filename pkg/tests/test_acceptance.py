"""Acceptance run: each test checks one criterion at its stated tolerance and
records a PASS/FAIL line shown in the terminal summary."""

import math
import random
import time

from acceptance_log import record
from arccount import words as W
from arccount.assoc import associate, loop_length
from arccount.census import enumerate_compact_arcs, enumerate_curves, enumerate_infinite_arcs
from arccount.cli import (basmajian_partial_sums, basmajian_summary, count_table, fit_exponent,
                          measured_k, sandwich_report)
from arccount.hypalg import IdealGeodesic, geodesic_distance
from arccount.orbits import act, orbit_census, pmod_generators
from arccount.pantsform import PantsDims, error_E_limit, lambda_from_truncated, min_arc_len
from arccount.surface import (INFINITE, ArcClass, build_pants, canonical_arc,
                              infinite_arc_t_length, preset, self_intersections, t_alpha,
                              truncated_length, verify_pants)
from arccount.words import ConjClass, conj_canonical, same_subgroup
from oracles import brute_arcs, brute_curve_iota, brute_curves, numeric_geodesic_distance

T = preset("one_holed_torus")
Q = preset("punctured_torus")
CP = preset("cusped_pants")
SAFETY = 1.001


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def check(n, ok, detail, limit, clock):
    ok = bool(ok) and clock.elapsed < limit
    record(n, ok, f"{detail}; {clock.elapsed:.1f}s (limit {limit:.0f}s)")
    assert ok, detail


# ------------------------------------------------------------------ 1


def test_criterion_1_pants_trig_vs_matrices():
    rng = random.Random(1)
    with Clock() as c:
        worst = 0.0
        for _ in range(200):
            s = build_pants(*(rng.uniform(0.5, 6.0) for _ in range(3)))
            worst = max(worst, max(r["rel_error"] for r in verify_pants(s)))
    check(1, worst < 1e-9, f"200 pants groups, worst relative error {worst:.2e}", 10, c)


# ------------------------------------------------------------------ 2


def test_criterion_2_cusp_identity_on_simple_arcs():
    with Clock() as c:
        arcs = [(Q, a) for a in orbit_census(Q, ArcClass(0, 0, "a", INFINITE), 16.0).elements]
        arcs += [(CP, canonical_arc(CP, ArcClass.from_key(k, INFINITE)))
                 for k in ("0:1:1", "0:b:0", "1:a:1")]
        worst = 0.0
        simple = all(self_intersections(s, a) == 0 for s, a in arcs)
        for s, a in arcs:
            gamma = loop_length(s, associate(s, a))
            for t in (1.0, 0.5, 0.25):
                ell = infinite_arc_t_length(s, a, t).length
                worst = max(worst, abs(gamma - 4 * math.acosh(t / 2 * math.exp(ell / 2))))
    ok = simple and len(arcs) >= 50 and worst < 1e-8
    check(2, ok, f"{len(arcs)} simple infinite arcs x 3 values of t, worst gap {worst:.2e}",
          60, c)


# ------------------------------------------------------------------ 3


def test_criterion_3_compact_distortion_census_wide():
    with Clock() as c:
        census = enumerate_compact_arcs(T, 8.0)
        p = PantsDims(*T.boundary_lengths * 2)
        analytic = max(2 * min_arc_len(p), abs(error_E_limit(p)))
        dist = [abs(loop_length(T, associate(T, r.key)) - 2 * r.length) for r in census.records]
    worst = max(dist)
    ok = (census.certificate.certified and worst <= T.C_X and worst <= analytic * SAFETY)
    check(3, ok, f"{len(dist)} arcs, certified={census.certificate.certified}, "
                 f"max distortion {worst:.6f} vs C(X) {T.C_X:.6f}", 300, c)


# ------------------------------------------------------------------ 4


def test_criterion_4_equivariance():
    with Clock() as c:
        compact = [r.key for r in enumerate_compact_arcs(T, 10.0).records]
        infinite = [r.key for r in enumerate_infinite_arcs(Q, 9.0).records]
        rng = random.Random(4)
        pairs = [(T, a) for a in rng.sample(compact, min(100, len(compact)))]
        pairs += [(Q, a) for a in rng.sample(infinite, min(100, len(infinite)))]
        bad = 0
        for s, a in pairs:
            for phi in pmod_generators(s):
                bad += associate(s, act(s, phi, a)) != act(s, phi, associate(s, a))
    check(4, bad == 0 and len(pairs) >= 200,
          f"{len(pairs)} arcs x 4 generators, {bad} mismatches", 60, c)


# ------------------------------------------------------------------ 5


def test_criterion_5_sandwich():
    with Clock() as c:
        seed = ArcClass(0, 0, "a")
        curve = associate(T, seed)
        grid = [4.0, 5.0, 6.0, 7.0, 8.0, 9.0]
        k = measured_k(T, seed, curve, grid[-1], T.C_X)
        table = count_table(T, grid, arc_seed=seed, curve_seed=curve,
                            curve_reach=2 * grid[-1] + T.C_X)
        rep = sandwich_report(table, table, k or 1, T.C_X)
    rows = " ".join(f"{L:g}:{lo}<={n}<={hi}" for L, lo, n, hi, _ in rep.rows)
    check(5, k is not None and rep.passed, f"k={k}, C={T.C_X:.4f}, {rows}", 600, c)


# ------------------------------------------------------------------ 6


def test_criterion_6_exponents():
    grid = [float(x) for x in range(4, 41, 2)]
    with Clock() as c:
        curves = count_table(T, grid, curve_seed=ConjClass("a"))
        seed = ArcClass(0, 0, "a")
        arcs = count_table(T, grid, arc_seed=seed, curve_seed=associate(T, seed),
                           curve_reach=2 * grid[-1])
        inf = count_table(Q, grid, inf_seed=ArcClass(0, 0, "a", INFINITE))
        slopes = {"curve": fit_exponent(curves, "curve")[0],
                  "arc": fit_exponent(arcs, "arc")[0],
                  "infinite_arc": fit_exponent(inf, "infinite_arc")[0]}
        ratios = [arcs.count("arc", L) / arcs.count("curve", 2 * L) for L in grid[-3:]]
    spread = (max(ratios) - min(ratios)) / min(ratios)
    ok = all(1.6 <= v <= 2.4 for v in slopes.values()) and spread < 0.2
    text = ", ".join(f"{k} {v:.3f}" for k, v in slopes.items())
    check(6, ok, f"slopes {text}; ratio spread {spread:.1%} "
                 f"({', '.join(f'{r:.3f}' for r in ratios)})", 1800, c)


# ------------------------------------------------------------------ 7


def test_criterion_7_immersed_pants():
    with Clock() as c:
        h1 = ["a", W.reduce("BabAb")]
        h2 = [W.reduce("aBabA"), "b"]
        differ = not same_subgroup(h1, h2)
        third = [conj_canonical(W.mul(W.inverse(h[1]), W.inverse(h[0]))) for h in (h1, h2)]
        ok = differ and third[0] == third[1] == conj_canonical("BaBAbA")
    check(7, ok, f"subgroups differ={differ}, third boundary classes {third[0]} {third[1]}",
          1, c)


# ------------------------------------------------------------------ 8


def _orbit_vs_oracle():
    L = 10.0
    orb = orbit_census(Q, ConjClass("a"), L)
    short = {x for x in orb.elements if len(x.word) <= 6}
    simple = {x for x in brute_curves(Q, L, 6)
              if W.primitive_root(x.word)[0] == x.word and brute_curve_iota(Q, x.word) == 0}
    return short == simple


def test_criterion_8_oracles():
    with Clock() as c:
        census_ok = True
        for s, L in ((T, 9.0), (Q, 6.0), (CP, 6.0)):
            got = {r.key for r in enumerate_curves(s, L).records if r.word_length <= 6}
            census_ok &= got == set(brute_curves(s, L, 6))
        got = {r.key for r in enumerate_compact_arcs(T, 7.0).records if r.word_length <= 6}
        census_ok &= got == set(brute_arcs(T, 7.0, 6))
        got = {r.key for r in enumerate_infinite_arcs(Q, 7.0).records if r.word_length <= 6}
        census_ok &= got == set(brute_arcs(Q, 7.0, 6, INFINITE, 1.0))

        rng = random.Random(8)
        worst, done = 0.0, 0
        while done < 500:
            pts = sorted(rng.uniform(-10, 10) for _ in range(4))
            if min(b - a for a, b in zip(pts, pts[1:])) < 1e-2:
                continue
            nested = rng.random() < 0.5
            g1 = IdealGeodesic.of(pts[0], pts[3] if nested else pts[1])
            g2 = IdealGeodesic.of(pts[1] if nested else pts[2], pts[2] if nested else pts[3])
            worst = max(worst, abs(geodesic_distance(g1, g2) - numeric_geodesic_distance(g1, g2)))
            done += 1
        orbit_ok = _orbit_vs_oracle()
    ok = census_ok and worst < 1e-8 and orbit_ok
    check(8, ok, f"censuses match brute force={census_ok}, distance worst {worst:.1e} "
                 f"over 500 pairs, orbit matches classification={orbit_ok}", 300, c)


# ------------------------------------------------------------------ 9


def test_criterion_9_basmajian():
    with Clock() as c:
        census = enumerate_compact_arcs(T, 12.0)
        sums = basmajian_partial_sums(T, census)
        fracs = []
        for L in (4.0, 6.0, 8.0, 10.0, 12.0):
            part = [x for x in sums if x[0] <= L]
            fracs.append(basmajian_summary(T, part, L)["coverage_fraction"])
        summary = basmajian_summary(T, sums, 12.0)
    ok = (census.certificate.certified and summary["monotone"] and summary["within_bound"]
          and fracs == sorted(fracs))
    check(9, ok, "coverage " + ", ".join(f"L={L:g}:{f:.4f}" for L, f in
                                          zip((4, 6, 8, 10, 12), fracs)), 600, c)


# ------------------------------------------------------------------ 10


def test_criterion_10_truncated_vs_t_length():
    with Clock() as c:
        arcs = [(Q, r.key) for r in enumerate_infinite_arcs(Q, 7.0).records]
        arcs += [(CP, r.key) for r in enumerate_infinite_arcs(CP, 6.0).records]
        worst_gap, worst_lam = -math.inf, 0.0
        for s, a in arcs:
            ta = t_alpha(s, a)
            tr = truncated_length(s, a)
            lt = infinite_arc_t_length(s, a, ta).length
            worst_gap = max(worst_gap, abs(lt - tr) - 2 * math.log(1 / ta))
            lam = lambda_from_truncated(tr)
            worst_lam = max(worst_lam, abs(lam - math.exp(tr / 2)) / lam)
    ok = worst_gap <= 1e-9 and worst_lam <= 1e-12 and len(arcs) > 0
    check(10, ok, f"{len(arcs)} infinite arcs, max excess {worst_gap:.2e}, "
                  f"lambda error {worst_lam:.1e}", 60, c)

