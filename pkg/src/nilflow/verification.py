"""Seeded, deterministic invariant suites.

Each suite returns a :class:`CheckResult` whose details are plain JSON-able
values, so the command line ``verify`` run can emit byte-identical reports
for equal seeds.  Audit-style suites (the plane region invariance) pass when
the report is produced and the outcome documented, even if the documented
outcome is a failure of the default coefficients.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dynamics as dyn
from .factorization import (
    GENERATOR_ENDOS,
    HeisenbergEndo,
    check_hypothesis_H,
    conjugation_identity_holds,
    decompose,
    eigen_data,
    factor,
    flow_of,
    gamma_from_integers,
    recompose,
    surface_quadric,
    xy_of_ts,
    z_of_ts,
)
from .freegroup import (
    FIBONACCI,
    GENERATOR_SUBSTITUTIONS,
    broken_line,
    broken_line_counts,
    fixed_point_prefix,
)
from .heisenberg import (
    AlgebraVector,
    GroupPoint,
    bracket,
    canonicalize,
    central_flow,
    dilate,
    exp_point,
    flow,
    flow_exchange_holds,
    log_point,
    norm4,
)
from .scalar import GOLDEN, QuadraticNumber


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


def _rand_fraction(rng: random.Random, span: int = 400, den: int = 97) -> Fraction:
    return Fraction(rng.randrange(-span, span + 1), den)


def _rand_point(rng: random.Random) -> GroupPoint:
    return GroupPoint(_rand_fraction(rng), _rand_fraction(rng), _rand_fraction(rng))


def _rand_vector(rng: random.Random) -> AlgebraVector:
    return AlgebraVector(_rand_fraction(rng), _rand_fraction(rng), _rand_fraction(rng))


def _rand_golden(rng: random.Random) -> QuadraticNumber:
    return QuadraticNumber(_rand_fraction(rng), _rand_fraction(rng), GOLDEN)


def _rand_in_context(rng: random.Random, ctx) -> QuadraticNumber:
    return QuadraticNumber(_rand_fraction(rng), _rand_fraction(rng), ctx)


def check_group_suite(seed: int, cases: int = 1000) -> CheckResult:
    """Associativity, inverses, BCH, exp/log round trips, norm symmetry."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(cases):
        a, b, c = _rand_point(rng), _rand_point(rng), _rand_point(rng)
        if (a * b) * c != a * (b * c):
            bad += 1
        if a * a.inverse() != GroupPoint.identity():
            bad += 1
        if norm4(a) != norm4(a.inverse()):
            bad += 1
        if canonicalize(a).rep != canonicalize(a * rng.choice(
            [GroupPoint(1, 0, 0), GroupPoint(0, 1, 0), GroupPoint(0, 0, 1),
             GroupPoint(-2, 3, 5)]
        )).rep:
            bad += 1
        t = _rand_fraction(rng)
        if dilate(t, a).x != a.x * t or norm4(dilate(t, a)) != t ** 4 * norm4(a):
            bad += 1
    for _ in range(cases):
        u, v = _rand_vector(rng), _rand_vector(rng)
        if exp_point(u + v) * exp_point(bracket(u, v)) != exp_point(u) * exp_point(v):
            bad += 1
        if log_point(exp_point(u)) != u:
            bad += 1
    return CheckResult("group.suite", bad == 0, {"cases": cases, "failures": bad})


def check_flow_exchange(seed: int, cases: int = 100) -> CheckResult:
    """Flow exchange with the resolved central exponent, and centrality."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(cases):
        u, v, g = _rand_vector(rng), _rand_vector(rng), _rand_point(rng)
        t, s = _rand_fraction(rng), _rand_fraction(rng)
        if not flow_exchange_holds(u, v, t, s, g):
            bad += 1
        if central_flow(s, flow(u, t, g)) != flow(u, t, central_flow(s, g)):
            bad += 1
    return CheckResult("flows.exchange", bad == 0, {"cases": cases, "failures": bad})


def _random_positive_substitution(rng: random.Random, max_len: int = 6):
    names = ["s1", "s2", "s3", "s4"]
    word = [rng.choice(names) for _ in range(rng.randrange(1, max_len + 1))]
    sub = GENERATOR_SUBSTITUTIONS[word[0]]
    for w in word[1:]:
        sub = sub.compose(GENERATOR_SUBSTITUTIONS[w])
    return sub


def random_hyperbolic_data(rng: random.Random, count: int, max_len: int = 6):
    """Eigen data for random positive-generator automorphisms passing (H)."""
    out = []
    while len(out) < count:
        sub = _random_positive_substitution(rng, max_len)
        endo = factor(sub)
        if check_hypothesis_H(endo).passed:
            out.append(eigen_data(endo))
    return out


def check_factorization(seed: int, cases: int = 50) -> CheckResult:
    """Closed form versus generator products, plus the central scaling."""
    rng = random.Random(seed)
    fib = factor(FIBONACCI)
    details = {}
    ok = fib == HeisenbergEndo(1, 1, 1, 0, 1, 0)
    details["fibonacci_coefficients"] = ok
    # z-row of the golden automorphism at integers: -z + x(x+1)/2 + xy
    for x in range(-3, 4):
        for y in range(-3, 4):
            z = Fraction(rng.randrange(-5, 6))
            expected = -z + Fraction(x * (x + 1), 2) + x * y
            if fib.apply(GroupPoint(x, y, z)).z != expected:
                ok = False
    bad = 0
    for _ in range(cases):
        sub = _random_positive_substitution(rng)
        endo = factor(sub)  # raises if the closed form disagrees
        if endo.apply(GroupPoint(0, 0, 1)) != GroupPoint(0, 0, endo.det_m()):
            bad += 1
        w = broken_line(sub.apply("ab"))[-1]
        if endo.apply(GroupPoint(1, 1, 1)) != w:
            bad += 1
    details.update({"random_substitutions": cases, "failures": bad})
    return CheckResult("factor.closed_form", ok and bad == 0, details)


def check_eigenflow_conjugation(seed: int, pairs: int = 100, autos: int = 10) -> CheckResult:
    """Eigenflow conjugation and the golden gamma values."""
    rng = random.Random(seed)
    fib = eigen_data(factor(FIBONACCI))
    lam = fib.lam
    details = {
        "gamma_fibonacci": fib.gamma == lam - Fraction(3, 2),
        "alpha": fib.alpha == lam - 1,
        "t_a": fib.t_a == (3 * lam + 1) / 5,
        "t_b": fib.t_b == (lam + 2) / 5,
    }
    # rescaling the contracting eigenvector to (1/phi^2, -1/phi) carries
    # gamma' = 1/2; ours is phi^2 times that scaling
    scaled = gamma_from_integers(
        fib.endo, fib.lam_prime,
        (2 - lam), (1 - lam),
        fib.endo.e, fib.endo.f,
    )
    details["gamma_prime_rescaled"] = scaled == Fraction(1, 2)
    bad = 0
    datas = [fib] + random_hyperbolic_data(rng, autos)
    for data in datas:
        vec = flow_of(data, "lam")
        vec_p = flow_of(data, "lam_prime")
        ctx = data.context
        for _ in range(pairs // len(datas) + 1):
            t = _rand_in_context(rng, ctx)
            g = GroupPoint(
                _rand_in_context(rng, ctx),
                _rand_in_context(rng, ctx),
                _rand_in_context(rng, ctx),
            )
            if not conjugation_identity_holds(data.endo, vec, data.lam, t, g):
                bad += 1
            if not conjugation_identity_holds(data.endo, vec_p, data.lam_prime, t, g):
                bad += 1
    values_ok = all(details.values())
    details.update({"automorphisms": len(datas), "failures": bad})
    return CheckResult("eigen.conjugation", values_ok and bad == 0, details)


def check_surface(seed: int, cases: int = 1000) -> CheckResult:
    """Surface identity and the automorphism action (t, s) -> (lam t, lam' s)."""
    rng = random.Random(seed)
    data = eigen_data(factor(FIBONACCI))
    quadric = surface_quadric(data)
    bad = 0
    for _ in range(cases):
        t, s = _rand_golden(rng), _rand_golden(rng)
        x, y = xy_of_ts(data, t, s)
        if quadric.evaluate(x, y) != z_of_ts(data, t, s):
            bad += 1
    action_bad = 0
    for _ in range(100):
        t, s = _rand_golden(rng), _rand_golden(rng)
        x, y = xy_of_ts(data, t, s)
        g = GroupPoint(x, y, quadric.evaluate(x, y))
        image = data.endo.apply(g)
        x2, y2 = xy_of_ts(data, data.lam * t, data.lam_prime * s)
        if image != GroupPoint(x2, y2, quadric.evaluate(x2, y2)):
            action_bad += 1
    return CheckResult(
        "surface.identity", bad == 0 and action_bad == 0,
        {"cases": cases, "failures": bad, "action_failures": action_bad},
    )


def check_strip(seed: int) -> CheckResult:
    """Return counts, renormalization triples and the coboundary identity."""
    rng = random.Random(seed)
    counts_ok = True
    for i in range(100):
        u = Fraction(rng.randrange(0, 997), 2609)  # inside [0, 1/phi^2)
        if u >= dyn.INV_PHI2:
            continue
        n = dyn.strip_return_count(u)
        expect = 2 if u < dyn.INV_PHI4 else 3
        counts_ok = counts_ok and n == expect
    eps = Fraction(1, 10 ** 6)
    for u, expect in [
        (dyn.INV_PHI4 - eps, 2), (dyn.INV_PHI4, 3), (dyn.INV_PHI4 + eps, 3),
        (Fraction(0), 2), (dyn.INV_PHI2 - eps, 3),
    ]:
        counts_ok = counts_ok and dyn.strip_return_count(u) == expect
    triples = [
        (-1, -1, 0),
        (-1, -1, 1),
        (Fraction(1, 3), Fraction(-2, 7), Fraction(1, 5)),
        (Fraction(-5, 4), Fraction(1, 2), Fraction(2, 3)),
        (Fraction(2, 9), Fraction(2, 9), Fraction(-3, 8)),
    ]
    renorm = [dyn.renormalization_check(*tr, n_points=101) for tr in triples]
    psi = dyn.psi_identity_check(100)
    passed = counts_ok and all(r["passed"] for r in renorm) and psi["passed"]
    return CheckResult("strip.induction", passed, {
        "counts_ok": counts_ok,
        "renormalization": [r["passed"] for r in renorm],
        "theta_prime_example": renorm[1]["theta_prime"],
        "psi": {k: psi[k] for k in
                ("psi0", "psi1", "jump_left_minus_right", "opposite_sign_failures",
                 "passed")},
    })


def check_sigma_section(seed: int, iterates: int = 10_000) -> CheckResult:
    """IET structure over many iterates, replay, and the first-return audit."""
    rng = random.Random(seed)
    data = eigen_data(factor(FIBONACCI))
    section = dyn.SigmaSection(data)
    orbit = dyn.iet_orbit_check(data, iterates)
    samples = dyn.section_samples(data, 40, seed=seed)
    replay_ok = all(section.replay(q, section.return_map(q)) for q in samples)
    audit_ok = all(
        section.early_crossing_audit(q)["passed"] for q in samples[:20]
    )
    return CheckResult("sigma.iet", orbit["passed"] and replay_ok and audit_ok, {
        "iterates": iterates,
        "orbit": {k: orbit[k] for k in
                  ("translations_ok", "times_ok", "both_branches_seen")},
        "replay_ok": replay_ok,
        "first_return_audit_ok": audit_ok,
    })


def check_self_induction(seed: int, samples: int = 100, autos: int = 5) -> CheckResult:
    rng = random.Random(seed)
    fib = eigen_data(factor(FIBONACCI))
    main = dyn.self_induction_check(fib, samples=samples, seed=seed)
    others = []
    for data in random_hyperbolic_data(rng, autos, max_len=5):
        others.append(dyn.self_induction_check(data, samples=12, seed=seed)["passed"])
    return CheckResult(
        "sigma.self_induction",
        main["passed"] and all(others),
        {"fibonacci": main["passed"], "random_automorphisms": others},
    )


def check_diagonal(seed: int, samples: int = 50) -> CheckResult:
    rng = random.Random(seed)
    data = eigen_data(factor(FIBONACCI))
    diag = dyn.DiagonalSection(data)
    time_ok = all(
        diag.return_time_audit(
            dyn.golden(Fraction(rng.randrange(0, 997), 997)),
            dyn.golden(Fraction(rng.randrange(0, 997), 997)),
        )
        for _ in range(20)
    )
    conj = dyn.sigma_diagonal_conjugacy_check(data, samples=samples, seed=seed)
    audit = dyn.DiagonalSection(data, 0, 0).inequality_audit()
    return CheckResult(
        "diag.section", time_ok and conj["passed"] and audit["passed"],
        {"return_time_one": time_ok, "conjugacy": conj["passed"],
         "inequalities": audit},
    )


def check_chart_equivalence(seed: int) -> CheckResult:
    report = dyn.fibonacci_chart_equivalence(n_verify=100, seed=seed)
    keep = {k: report[k] for k in report if k not in ("passed",)}
    return CheckResult("chart.skew_conjugacy", report["passed"], keep)


def check_plane_suite(seed: int, samples: int = 100) -> CheckResult:
    """Affine identity, conjugation by central shears, and the region audit.

    The region audit counts as produced-and-documented; the default
    coefficients failing invariance is the expected outcome.
    """
    identity = dyn.affine_identity_check(n_points=samples, seed=seed)
    data = eigen_data(factor(FIBONACCI))
    conj = dyn.conjugation_suite(data, Fraction(1, 3), samples=samples, seed=seed)
    gamma0_ok = dyn.gamma_zero(data) == Fraction(3, 2) - data.lam
    invariance = dyn.region_invariance_audit()
    returns = dyn.rprime_return_audit(seed=seed)
    documented = "invariance_failures" in invariance and "escapes" in returns
    passed = (identity["passed"] and conj["passed"] and gamma0_ok
              and conj["nonresonance"]["nonresonant"] and documented)
    return CheckResult("plane.suite", passed, {
        "affine_identity": identity["passed"],
        "cx_conjugation": conj["passed"],
        "gamma0_matches_grid_origin": gamma0_ok,
        "nonresonance": conj["nonresonance"]["nonresonant"],
        "region_invariance_documented_failures": invariance["invariance_failures"],
        "return_histogram": returns["histogram"],
        "return_escapes": returns["escapes"],
    })


def inversion_count_oracle(word: str) -> list[int]:
    """c_k from the definition: for each b, count the a's before it."""
    arr = np.frombuffer(word.encode(), dtype=np.uint8)
    is_a = (arr == ord("a")).astype(np.int64)
    is_b = (arr == ord("b")).astype(np.int64)
    a_before = np.concatenate([[0], np.cumsum(is_a)[:-1]])
    contrib = is_b * a_before
    return np.concatenate([[0], np.cumsum(contrib)]).tolist()


def check_broken_line(k_counts: int = 10_000, k_proj: int = 100_000) -> CheckResult:
    word = fixed_point_prefix(FIBONACCI, max(k_counts, k_proj))
    counts = broken_line_counts(word[:k_counts])
    oracle = inversion_count_oracle(word[:k_counts])
    counts_ok = all(counts[k][2] == oracle[k] for k in range(k_counts + 1))
    # quadratic-time pair counts, structurally independent of any recurrence
    spot_ok = True
    for k in (257, min(1000, k_counts), min(1024, k_counts)):
        arr = np.frombuffer(word[:k].encode(), dtype=np.uint8)
        pairs = np.triu(np.outer(arr == ord("a"), arr == ord("b")), k=1)
        spot_ok = spot_ok and int(pairs.sum()) == counts[k][2]
    group_ok = [p for p in broken_line(word[:64])] == [
        GroupPoint(a, b, c) for a, b, c in broken_line_counts(word[:64])
    ]
    arr = np.frombuffer(word[:k_proj].encode(), dtype=np.uint8)
    a_k = np.concatenate([[0], np.cumsum(arr == ord("a"))]).astype(np.float64)
    b_k = np.concatenate([[0], np.cumsum(arr == ord("b"))]).astype(np.float64)
    k = np.arange(k_proj + 1, dtype=np.float64)
    phi = (1 + 5 ** 0.5) / 2
    sup = max(
        np.abs(a_k - k / phi).max(), np.abs(b_k - k / phi ** 2).max()
    )
    return CheckResult(
        "line.broken", bool(counts_ok and spot_ok and group_ok and sup < 2.0),
        {"counts_checked": k_counts, "counts_ok": bool(counts_ok),
         "spot_checks_ok": bool(spot_ok), "matches_group_law": group_ok,
         "projection_sup": float(sup), "projection_k": k_proj},
    )


def check_decompose(seed: int, cases: int = 50, max_factors: int = 10) -> CheckResult:
    rng = random.Random(seed)
    names = list(GENERATOR_ENDOS)
    bad = 0
    for _ in range(cases):
        word = [
            (rng.choice(names), rng.choice([-1, 1]))
            for _ in range(rng.randrange(1, max_factors + 1))
        ]
        endo = recompose(word)
        try:
            again = decompose(endo)
        except Exception:
            bad += 1
            continue
        if (recompose(again) if again else HeisenbergEndo.identity()) != endo:
            bad += 1
    return CheckResult("decompose.roundtrip", bad == 0,
                       {"cases": cases, "failures": bad})


def run_all(seed: int = 0) -> list[CheckResult]:
    """The full battery, in stable order."""
    return [
        check_group_suite(seed),
        check_flow_exchange(seed + 1),
        check_factorization(seed + 2),
        check_eigenflow_conjugation(seed + 3),
        check_surface(seed + 4),
        check_strip(seed + 5),
        check_sigma_section(seed + 6, iterates=2000),
        check_self_induction(seed + 7, samples=40, autos=3),
        check_diagonal(seed + 8),
        check_chart_equivalence(seed + 9),
        check_plane_suite(seed + 10),
        check_broken_line(k_counts=2000, k_proj=20_000),
        check_decompose(seed + 11, cases=25),
    ]
