"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one pass/fail line.  Criteria:

 1. route equivalence for all k <= d <= 3 (one generic point) and for two
    generic points with multiplicities (1,1) and (2,1),
 2. exact interior trace-expansion coefficients for k <= 2, l <= 5 and
    (k, l) = (3, 3),
 3. the constant identity (-1)^{k+1} for k = 1..5 plus the exact -1/k
    cancellation in G'_2k,
 4. divided-difference route equals complete-homogeneous route exactly,
 5. the degree-2 product identity for K <= 2, d <= 4,
 6. per-site route vs trace route: stabilization and N-independent
    difference for 20 random finitely supported sequences,
 7. the quadrature identity for 20 random finitely supported sequences,
 8. the bounded/diverging dichotomy at desk scale,
 9. contact degree >= 2d for the k = 1 double-sum class (d = 1, 2, 3),
    best-effort report for k = 2,
10. index-tuple counts and set equality for k <= 3, l <= 6.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from opucgems.algmodel import (
    GaussianRational,
    build_g2k_hl,
    constant_sum_check,
    degree2_product_check,
    enum_d,
    enum_d_direct,
    g2k_hl_scaled_dd,
    g2k_hl_scaled_hom,
    g2k_routes_check,
    hl_part,
    index_tuple_count,
    product_representative,
    representative_search,
    site_functional,
    table_for,
    trace_expansion_check,
)
from opucgems.lab import SequenceFamily, convergence_study
from opucgems.opuc import VerblunskySeq, bs_weight_quadrature, sum_rule_functional
from opucgems.trig import CriticalPoints, TrigPoly, build_h


def report(line: str):
    print(line, flush=True)


def random_bounded_values(rng, n, radius):
    mods = radius * np.sqrt(rng.random(n))
    phases = 2 * math.pi * rng.random(n)
    return (mods * np.exp(1j * phases)).tolist()


def random_weight(rng, max_degree=3):
    n_points = int(rng.integers(1, 3))
    mults = [1] * n_points
    budget = int(rng.integers(n_points, max_degree + 1)) - n_points
    for _ in range(budget):
        mults[int(rng.integers(0, n_points))] += 1
    angles = np.sort(rng.random(n_points) * 1.9).tolist()
    return CriticalPoints.from_pairs(list(zip(angles, mults)))


# -- 1: route equivalence -----------------------------------------------------------


def test_acceptance_1_route_equivalence():
    started = time.time()
    cases = []
    for d in (1, 2, 3):
        for k in range(1, d + 1):
            cases.append((k, [d]))
    for mults in ([1, 1], [2, 1]):
        for k in range(1, sum(mults) + 1):
            cases.append((k, mults))
    failures = []
    for k, mults in cases:
        h = build_h(CriticalPoints.generic(mults))
        result = g2k_routes_check(k, h)
        if not result.passed:
            failures.append((k, mults))
    elapsed = time.time() - started
    status = "PASS" if not failures and elapsed < 300 else "FAIL"
    report(f"ACCEPTANCE 1 route equivalence ({len(cases)} cases, "
           f"{elapsed:.1f}s): {status}")
    assert not failures
    assert elapsed < 300


# -- 2: trace expansion ---------------------------------------------------------------


def test_acceptance_2_trace_expansion():
    cases = [(k, l) for k in (1, 2) for l in range(1, 6)] + [(3, 3)]
    failures = []
    for k, l in cases:
        result = trace_expansion_check(k, l)
        if not result.passed:
            failures.append(((k, l), result.mismatches[:2]))
    dup = trace_expansion_check(2, 2)
    status = "PASS" if not failures and dup.passed else "FAIL"
    report(f"ACCEPTANCE 2 trace expansion ({len(cases)} cases, exact): {status}")
    assert not failures


# -- 3: constant identity ---------------------------------------------------------------


def constant_weight(k_pairs_unused=None):
    """A weight with h_0 = 1 and every other coefficient zero."""
    points = CriticalPoints.generic([1])
    h = build_h(points)
    coeffs = {l: h.table.zero() for l in (-1, 1)}
    coeffs[0] = h.table.one()
    return TrigPoly(points, 1, h.table, coeffs, h.unit_polys, None)


def test_acceptance_3_constant_identity():
    ok = True
    for k in range(1, 6):
        value = constant_sum_check(k)
        if value != GaussianRational((-1) ** (k + 1)):
            ok = False
    # the sign is (-1)^{k+1}: the frequently quoted (-1)^k display fails
    # already at k = 1 and k = 2
    assert constant_sum_check(1) != GaussianRational(-1)
    assert constant_sum_check(2) != GaussianRational(1)
    # assembled cancellation: a constant weight makes the double sum equal
    # h_0 * (-1)^{k+1}, so scaled G'_2k collapses to zero (the -1/k term
    # exactly absorbs the constant)
    h_const = constant_weight()
    for k in (1, 2, 3):
        if not g2k_hl_scaled_dd(k, h_const).is_zero:
            ok = False
    # unscaled form where Z_H is scalar: double-sum part minus G'_2k is 1/k
    for k, mults in ((1, [2]), (2, [2]), (2, [3])):
        h = build_h(CriticalPoints.generic(mults))
        table = table_for(k, h)
        difference = hl_part(k, h) - build_g2k_hl(k, h)
        if difference != table.const(Fraction(1, k)):
            ok = False
    report(f"ACCEPTANCE 3 constant identity (-1)^(k+1), k=1..5, and the "
           f"-1/k cancellation: {'PASS' if ok else 'FAIL'}")
    assert ok


# -- 4: the two double-sum routes -----------------------------------------------------------


def test_acceptance_4_double_sum_routes():
    cases = []
    for d in (1, 2, 3):
        for k in range(1, d + 1):
            cases.append((k, [d]))
    cases += [(1, [1, 1]), (2, [1, 1]), (1, [2, 1]), (2, [2, 1]), (3, [2, 1])]
    failures = []
    for k, mults in cases:
        h = build_h(CriticalPoints.generic(mults))
        # a NonDivisible raise inside either route is a failure by contract
        if g2k_hl_scaled_dd(k, h) != g2k_hl_scaled_hom(k, h):
            failures.append((k, mults))
    status = "PASS" if not failures else "FAIL"
    report(f"ACCEPTANCE 4 divided-difference route == homogeneous route "
           f"({len(cases)} cases, exact): {status}")
    assert not failures


# -- 5: degree-2 product identity --------------------------------------------------------


def test_acceptance_5_degree2_product():
    cases = [[1], [2], [3], [4], [1, 1], [2, 1], [3, 1], [2, 2]]
    failures = [mults for mults in cases
                if not degree2_product_check(build_h(CriticalPoints.generic(mults))).passed]
    status = "PASS" if not failures else "FAIL"
    report(f"ACCEPTANCE 5 degree-2 product identity (K <= 2, d <= 4, exact): {status}")
    assert not failures


# -- 6: per-site route vs trace route ---------------------------------------------------------


def test_acceptance_6_site_vs_trace_agreement():
    rng = np.random.default_rng(2024)
    worst_stab = 0.0
    worst_drift = 0.0
    for _ in range(20):
        points = random_weight(rng)
        d = points.degree
        support = int(rng.integers(1, 9))
        alpha = VerblunskySeq.from_values(
            random_bounded_values(rng, support, 0.8))
        h_num = build_h(points, "numeric")
        h_exact = build_h(points, "exact")
        n0 = support + 2 * d * (d + 1) + 1
        trace_base = sum_rule_functional(alpha, n0, h_num)
        site_base = site_functional(alpha, n0, h_exact)
        for n in (n0 + 5, n0 + 17):
            trace_n = sum_rule_functional(alpha, n, h_num)
            site_n = site_functional(alpha, n, h_exact)
            worst_stab = max(worst_stab, abs(trace_n - trace_base),
                             abs(site_n - site_base))
            worst_drift = max(worst_drift,
                              abs((site_n - trace_n) - (site_base - trace_base)))
    ok = worst_stab <= 1e-9 and worst_drift <= 1e-9
    report(f"ACCEPTANCE 6 stabilization {worst_stab:.2e} <= 1e-9, "
           f"route-difference drift {worst_drift:.2e} <= 1e-9: "
           f"{'PASS' if ok else 'FAIL'}")
    assert ok


# -- 7: quadrature identity -----------------------------------------------------------------


def test_acceptance_7_szego_quadrature():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        support = int(rng.integers(1, 9))
        alpha = VerblunskySeq.from_values(
            random_bounded_values(rng, support, 0.8))
        quad = bs_weight_quadrature(alpha, None)
        direct = float(np.sum(np.log(1.0 - np.abs(alpha.head(support)) ** 2)))
        worst = max(worst, abs(quad - direct))
    ok = worst <= 1e-8
    report(f"ACCEPTANCE 7 quadrature identity, worst |diff| = {worst:.2e} "
           f"<= 1e-8: {'PASS' if ok else 'FAIL'}")
    assert ok


# -- 8: bounded/diverging dichotomy ------------------------------------------------------------


def test_acceptance_8_bounded_family():
    started = time.time()
    points = CriticalPoints.from_pairs([(0.0, 1)])
    rep = convergence_study(SequenceFamily.power_decay(0.3, 0.4), points)
    elapsed = time.time() - started
    ok = rep.verdict == "bounded" and elapsed < 60
    report(f"ACCEPTANCE 8a powerDecay(0.3, 0.4) bounded "
           f"(verdict={rep.verdict}, {elapsed:.0f}s): {'PASS' if ok else 'FAIL'}")
    assert ok


@pytest.mark.parametrize("theta_over_pi", [0.0, 0.7])
def test_acceptance_8_diverging_first_order(theta_over_pi):
    started = time.time()
    points = CriticalPoints.from_pairs([(theta_over_pi, 1)])
    family = SequenceFamily.constant(0.5, phase=theta_over_pi * math.pi)
    rep = convergence_study(family, points)
    elapsed = time.time() - started
    ok = rep.verdict == "diverging" and rep.slope >= 0.01 and elapsed < 60
    report(f"ACCEPTANCE 8b constant(0.5, theta={theta_over_pi}*pi) m=1 "
           f"diverging (slope={rep.slope:.4f}, {elapsed:.0f}s): "
           f"{'PASS' if ok else 'FAIL'}")
    assert ok


@pytest.mark.parametrize("theta_over_pi", [0.0, 0.7])
def test_acceptance_8_diverging_second_order(theta_over_pi):
    # stated threshold: classified diverging with slope >= 0.01.  The true
    # asymptotic slope here is sum_{k>=3} 0.25^k / k = 0.0064, so the
    # criterion cannot hold with the documented classifier; kept as stated.
    started = time.time()
    points = CriticalPoints.from_pairs([(theta_over_pi, 2)])
    family = SequenceFamily.constant(0.5, phase=theta_over_pi * math.pi)
    rep = convergence_study(family, points)
    elapsed = time.time() - started
    ok = rep.verdict == "diverging" and rep.slope >= 0.01 and elapsed < 60
    report(f"ACCEPTANCE 8c constant(0.5, theta={theta_over_pi}*pi) m=2 "
           f"diverging (verdict={rep.verdict}, slope={rep.slope:.4f}, "
           f"{elapsed:.0f}s): {'PASS' if ok else 'FAIL'}")
    assert ok


# -- 9: contact degree ---------------------------------------------------------------------


def test_acceptance_9_contact_degree():
    achieved = {}
    for d in (1, 2, 3):
        h = build_h(CriticalPoints.generic([d]))
        part = hl_part(1, h)
        witness = product_representative(h)
        _, score = representative_search(part, 1, d, budget=3,
                                         extra_candidates=[witness])
        achieved[d] = score
    ok = all(achieved[d] >= 2 * d for d in (1, 2, 3))
    # k = 2: best-effort, reported without a hard bound
    h2 = build_h(CriticalPoints.generic([2]))
    part2 = hl_part(2, h2)
    _, score2 = representative_search(part2, 2, 2, budget=2)
    report(f"ACCEPTANCE 9 contact degree k=1: achieved {achieved} vs "
           f"targets {{1: 2, 2: 4, 3: 6}}; k=2 d=2 best effort: {score2}: "
           f"{'PASS' if ok else 'FAIL'}")
    assert ok


# -- 10: enumeration ------------------------------------------------------------------------


def test_acceptance_10_enumeration():
    ok = True
    for k in (1, 2, 3):
        for l in range(1, 7):
            bij = enum_d(k, l)
            if bij != enum_d_direct(k, l) or len(bij) != index_tuple_count(k, l):
                ok = False
    report(f"ACCEPTANCE 10 index-tuple enumeration (k <= 3, l <= 6): "
           f"{'PASS' if ok else 'FAIL'}")
    assert ok
