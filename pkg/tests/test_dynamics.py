import random
from fractions import Fraction

import pytest

from nilflow.dynamics import (
    INV_PHI,
    INV_PHI2,
    INV_PHI4,
    PHI,
    PHI2,
    DiagonalSection,
    Interval,
    RegionCoeffs,
    SectionPoint,
    SigmaSection,
    TorusPoint2,
    affine_identity_check,
    central_shift_conjugation_holds,
    counterexample_suite,
    equidistribution_report,
    fibonacci_chart_equivalence,
    first_return,
    gamma_zero,
    golden,
    iet_orbit_check,
    in_d2,
    nonresonance_report,
    golden_skew_step,
    psi_identity_check,
    region_invariance_audit,
    renormalization_check,
    replay_torus_record,
    section_samples,
    self_induction_check,
    sigma_diagonal_conjugacy_check,
    strip_family,
    strip_region,
    strip_return_count,
)
from nilflow.factorization import eigen_data, factor
from nilflow.freegroup import FIBONACCI
from nilflow.heisenberg import GroupPoint
from nilflow.verification import random_hyperbolic_data

FIB_DATA = eigen_data(factor(FIBONACCI))


# -- strip maps ---------------------------------------------------------------


def test_strip_family_example():
    m = strip_family(-1, 0)
    image = m(TorusPoint2(golden(0), golden(0)))
    assert image.u == INV_PHI and image.v == INV_PHI2


def test_strip_breakpoint_exact():
    m = strip_family(-1, 0)
    assert m.branches[0].hi == INV_PHI2 == 2 - PHI
    assert m.branches[1].lo == INV_PHI2


def test_strip_preserves_fibers():
    # shear form: u-image independent of v, v-update has unit Jacobian
    m = strip_family(Fraction(1, 3), Fraction(2, 7))
    for i in range(10):
        u = golden(Fraction(i, 10))
        v1, v2 = golden(Fraction(1, 3)), golden(Fraction(2, 3))
        p1 = m(TorusPoint2(u, v1))
        p2 = m(TorusPoint2(u, v2))
        assert p1.u == p2.u
        assert (p1.v - v1) == (p2.v - v2) or (p1.v - v1) - (p2.v - v2) in (-1, 1)


def test_return_counts():
    assert strip_return_count(Fraction(1, 10)) == 2
    assert strip_return_count(Fraction(1, 5)) == 3
    eps = Fraction(1, 10 ** 6)
    assert strip_return_count(INV_PHI4 - eps) == 2
    assert strip_return_count(INV_PHI4) == 3
    assert strip_return_count(INV_PHI4 + eps) == 3
    rng = random.Random(0)
    for _ in range(100):
        u = Fraction(rng.randrange(0, 1000), 2618)
        if golden(u) >= INV_PHI2:
            continue
        expected = 2 if golden(u) < INV_PHI4 else 3
        assert strip_return_count(u) == expected


def test_first_return_whole_space():
    m = strip_family(-1, 0)
    whole = Interval(golden(0), golden(1))
    rec = first_return(m, whole, TorusPoint2(golden(Fraction(1, 7)), golden(0)))
    assert rec.iterates == 1


def test_first_return_replay_and_errors():
    m = strip_family(-1, 0)
    region = strip_region()
    start = TorusPoint2(golden(Fraction(1, 10)), golden(Fraction(2, 5)))
    rec = first_return(m, region, start)
    assert replay_torus_record(m, start, rec)
    with pytest.raises(ValueError):
        first_return(m, region, TorusPoint2(golden(Fraction(1, 2)), golden(0)))
    with pytest.raises(RuntimeError):
        first_return(m, Interval(golden(0), golden(Fraction(1, 10 ** 9))),
                     TorusPoint2(golden(0), golden(0)), max_iter=3)


def test_piecewise_compose_and_invert():
    m = strip_family(Fraction(-5, 4), Fraction(1, 2))
    m2 = m.compose(m)
    inv = m.invert()
    rng = random.Random(1)
    for _ in range(60):
        p = TorusPoint2(golden(Fraction(rng.randrange(0, 997), 997)),
                        golden(Fraction(rng.randrange(0, 997), 997)))
        assert m2(p) == m(m(p))
        assert inv(m(p)) == p
        assert m(inv(p)) == p
    # composition and inversion stay in the class: partitions were validated
    assert m2.branches[0].lo == 0 and m2.branches[-1].hi == 1


def test_renormalization_fixed_point_parameters():
    r = renormalization_check(-1, -1, 0)
    assert r["passed"]
    assert r["theta_prime"] == "0+0*l"
    assert r["b"] == "0-1*l"   # -phi
    assert r["a"] == "-1-2*l"  # -phi^3
    r2 = renormalization_check(-1, -1, 1)
    assert r2["passed"]
    assert r2["theta_prime"] == "1+1*l"  # phi^2


def test_renormalization_random_triples():
    rng = random.Random(2)
    for _ in range(5):
        s = Fraction(rng.randrange(-20, 20), 9)
        sp = Fraction(rng.randrange(-20, 20), 11)
        th = Fraction(rng.randrange(-20, 20), 13)
        assert renormalization_check(s, sp, th, n_points=41)["passed"]


def test_psi_identity():
    rep = psi_identity_check(100)
    assert rep["passed"]
    assert rep["psi0"] == "1-1*l"                 # -1/phi
    assert rep["jump_left_minus_right"] == "-1+0*l"
    assert rep["opposite_sign_failures"] == 100      # plus sign never matches
    assert rep["identity_failures"] == []


def test_psi_halfway_value():
    from nilflow.dynamics import psi_value
    assert psi_value(Fraction(1, 2)) == -(PHI - 1) / 2  # -1/(2 phi)


# -- sigma section ------------------------------------------------------------


def test_sigma_return_examples():
    section = SigmaSection(FIB_DATA)
    rec = section.return_map(SectionPoint(golden(0), golden(0)))
    assert rec.time == FIB_DATA.t_a
    assert rec.point.s == FIB_DATA.s_a
    assert abs(float(rec.point.s) - (-0.2764)) < 1e-4
    rec2 = section.return_map(SectionPoint(golden(Fraction(-1, 10)), golden(0)))
    assert rec2.time == FIB_DATA.t_b
    assert rec2.point.s == golden(Fraction(-1, 10)) + FIB_DATA.s_b
    assert abs(float(rec2.point.s) - 0.3472) < 1e-4


def test_sigma_starting_point_validation():
    section = SigmaSection(FIB_DATA)
    with pytest.raises(ValueError):
        section.return_map(SectionPoint(FIB_DATA.s_b, golden(0)))


def test_sigma_orbit_structure():
    rep = iet_orbit_check(FIB_DATA, 2000)
    assert rep["passed"] and rep["both_branches_seen"]


def test_sigma_replay_and_first_return_audit():
    section = SigmaSection(FIB_DATA)
    for q in section_samples(FIB_DATA, 25, seed=3):
        rec = section.return_map(q)
        assert section.replay(q, rec)
        assert section.early_crossing_audit(q)["passed"]


def test_sigma_group_reconstruction():
    section = SigmaSection(FIB_DATA)
    for q in section_samples(FIB_DATA, 10, seed=4):
        g = section.to_group(q)
        assert section.from_group(g) == q


def test_self_induction_fibonacci():
    rep = self_induction_check(FIB_DATA, samples=40, seed=5)
    assert rep["containment"] and rep["passed"]


def test_self_induction_boundary_sample():
    # s = 0 exercises the branch boundary; s_a the left endpoint
    pts = [SectionPoint(golden(0), golden(0)),
           SectionPoint(FIB_DATA.s_a, golden(Fraction(1, 5)))]
    rep = self_induction_check(FIB_DATA, samples=pts)
    assert rep["passed"]


def test_self_induction_random_automorphisms():
    rng = random.Random(6)
    for data in random_hyperbolic_data(rng, 5, max_len=5):
        assert self_induction_check(data, samples=10, seed=7)["passed"]


# -- diagonal section ---------------------------------------------------------


def test_diagonal_gamma_and_translation():
    diag = DiagonalSection(FIB_DATA, 0, 0)
    assert diag.gamma == Fraction(3, 2) - PHI
    g = diag.translation
    assert g == GroupPoint(PHI - 1, 2 - PHI, golden(0))
    assert g.x + g.y == 1


def test_diagonal_chart_round_trip():
    diag = DiagonalSection(FIB_DATA)
    rng = random.Random(8)
    for _ in range(50):
        x = golden(Fraction(rng.randrange(0, 997), 997))
        z = golden(Fraction(rng.randrange(0, 997), 997))
        assert diag.chart(diag.chart_point(x, z)) == (x, z)
    with pytest.raises(ValueError):
        diag.chart(GroupPoint(golden(Fraction(1, 3)), golden(0), golden(0)))


def test_diagonal_return_time_one():
    diag = DiagonalSection(FIB_DATA)
    rng = random.Random(9)
    for _ in range(20):
        x = golden(Fraction(rng.randrange(0, 997), 997))
        z = golden(Fraction(rng.randrange(0, 997), 997))
        assert diag.return_time_audit(x, z)


def test_time_to_diagonal():
    diag = DiagonalSection(FIB_DATA)
    assert diag.time_to_diagonal(golden(0)) == 0
    # t(s) = -(alpha_p + beta_p) s with alpha_p + beta_p = 1 - phi
    assert diag.time_to_diagonal(golden(1)) == PHI - 1


def test_inequality_audit():
    rep = DiagonalSection(FIB_DATA).inequality_audit()
    assert rep["passed"] and rep["case"] == "a_p + b_p < 0"


def test_sigma_diagonal_conjugacy():
    assert sigma_diagonal_conjugacy_check(FIB_DATA, samples=30)["passed"]


# -- chart equivalence --------------------------------------------------------


def test_golden_skew_step_at_origin():
    u, v = golden_skew_step(0, 0)
    assert u == 2 - PHI                      # 1/phi^2
    assert v == Fraction(5, 2) - PHI         # 1 - 1/(2 phi^3)


def test_chart_equivalence():
    rep = fibonacci_chart_equivalence(n_verify=100)
    assert rep["passed"] and rep["found"]
    assert rep["eps"] == -1 and rep["b2"] == 1
    assert rep["w2"] == "1/2+0*l" and rep["w1"] == "-1/2+0*l"


# -- plane suite --------------------------------------------------------------


def test_affine_identity_spot_values():
    # n = 2 at the origin gives T_phi(0,0) itself
    x = y = golden(0)
    u, v = x / PHI2, y
    from nilflow.dynamics import r1_prime, r2_prime
    u, v = r2_prime(u, v)
    for _ in range(2):
        u, v = r1_prime(u, v)
    assert (PHI2 * u, v) == (2 - PHI, Fraction(3, 2) - PHI)
    # n = 0: first coordinate is -phi
    u2, v2 = r2_prime(golden(0), golden(0))
    assert PHI2 * u2 == -PHI


def test_affine_identity_random():
    assert affine_identity_check(100, seed=10)["passed"]


def test_origin_in_d2():
    c = RegionCoeffs.default_coeffs()
    assert in_d2(c, golden(0), golden(0))
    assert c.p(golden(0)) == 1 - PHI          # -1/phi
    assert c.r(golden(0)) == Fraction(1, 2)


def test_region_invariance_documented():
    rep = region_invariance_audit()
    assert rep["points_in_D"] > 0
    assert rep["invariance_failures"] >= 0
    assert rep["points_in_D"] == rep["stayed_in_D"] + rep["invariance_failures"]
    # the default coefficients are expected to fail; the audit documents it
    assert not rep["invariant"]
    assert rep["witnesses"]


def test_counterexample_suite_shape():
    rep = counterexample_suite(n_points=20, seed=11)
    assert rep["affine_identity"]["passed"]
    assert rep["origin_in_D2"]
    assert "histogram" in rep["return_counts"]


def test_counterexample_suite_coefficients_are_data():
    # the affine identity is region-independent, so overriding the region
    # coefficients only changes the audits
    base = RegionCoeffs.default_coeffs()
    alt = RegionCoeffs(base.p2, base.p1, base.p0, base.q1, base.q0,
                       base.r1, base.r0 + Fraction(1, 10))
    rep = counterexample_suite(alt, n_points=10, seed=12)
    assert rep["affine_identity"]["passed"]
    assert rep["r0"] != "1/2+0*l"


def test_cx_conjugation_example():
    g = GroupPoint(Fraction(1, 2), Fraction(1, 3), 0)
    assert central_shift_conjugation_holds(Fraction(1), g, GroupPoint(0, 0, 0))
    value = GroupPoint(1, 0, 0) * g
    assert value == GroupPoint(Fraction(3, 2), Fraction(1, 3), Fraction(1, 3))
    assert central_shift_conjugation_holds(Fraction(0), g, GroupPoint(2, 3, 4))


def test_gamma_zero_and_nonresonance():
    assert gamma_zero(FIB_DATA) == Fraction(3, 2) - PHI
    rep = nonresonance_report(FIB_DATA, Fraction(1, 3), grid=8)
    assert rep["nonresonant"]
    rep0 = nonresonance_report(FIB_DATA, 0, grid=2)
    assert rep0["resonances"] == [(0, 0)]


# -- Weyl sums ----------------------------------------------------------------


def test_equidistribution_small():
    rep = equidistribution_report("skew", 50_000, radius=2, threshold=0.1,
                                  escalation=1)
    assert rep["passed"]
    rep2 = equidistribution_report("nilflow", 50_000, radius=2, threshold=0.1,
                                   escalation=1)
    assert rep2["passed"]


def test_zero_character_is_one():
    from nilflow.dynamics import weyl_sums_skew_product
    table = weyl_sums_skew_product([(0, 0)], 1000)
    assert abs(table[(0, 0)] - 1.0) < 1e-12


def test_exact_orbit_agrees_with_closed_form():
    from nilflow.dynamics import weyl_sums_skew_exact, weyl_sums_skew_product
    chars = [(1, 0), (0, 1), (2, -1)]
    exact = weyl_sums_skew_exact(chars, 2000)
    fast = weyl_sums_skew_product(chars, 2000)
    for pq in chars:
        assert abs(exact[pq] - fast[pq]) < 1e-9
