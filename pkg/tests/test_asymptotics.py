"""Potential analysis, growth constants, and limit-law moments."""

from fractions import Fraction
from math import comb

import mpmath as mp
import pytest

from chordk.chords_core import (
    DIAGRAM,
    HYPERCHORD,
    MATCHING,
    PARTITION,
    ContractViolation,
    Family,
    SizeSet,
)
from chordk import asymptotics as asy
from chordk.asymptotics import (
    AsymptoticEstimate,
    block_law_constants,
    closed_form_asymptotics,
    empirical_ratio_check,
    hyperchord_constants,
    matching_block_lambda,
    maximal_cores,
    potential,
    restricted_partition_asymptotics,
    restricted_partition_constants,
)
from chordk.enumeration import enumerate_cores
from chordk import enumeration


@pytest.fixture(autouse=True)
def _high_precision_context():
    # targets are evaluated inline; 15-digit ambient precision would round
    # both sides of every comparison to doubles
    old = mp.mp.dps
    mp.mp.dps = 90
    yield
    mp.mp.dps = old


def close(x, target, tol):
    return abs(mp.mpf(x) - mp.mpf(target)) < mp.mpf(tol)


# ---------------------------------------------------------------------------
# Potential


def test_potential_counts_multi_arc_regions_only():
    assert potential({1: 7}) == 0
    assert potential({2: 1}) == 1
    assert potential({(1, 0): 6, (2, 0): 1}) == 1
    assert potential({(1, 0): 9, (3, 0): 1}) == 3
    assert potential({2: 2, 3: 1, 1: 5}) == 5


def test_potential_rejects_negative_counts():
    with pytest.raises(ContractViolation):
        potential({2: -1})


def test_potential_of_region_profiles_respects_crossing_bound():
    # every matching core with k crossings satisfies phi <= 2k - 3 for k >= 2
    for k in (2, 3, 4):
        for core in enumerate_cores(MATCHING, k):
            prof = enumeration.region_profile(core)
            assert potential(prof) <= 2 * k - 3


# ---------------------------------------------------------------------------
# Maximal cores


def test_matching_maximizer_counts_and_profiles():
    counts = {}
    for k in (1, 2, 3, 4):
        argmax, phi = maximal_cores(MATCHING, k)
        counts[k] = len(argmax)
        if k == 1:
            assert phi == 0
        else:
            assert phi == 2 * k - 3
            # one region with k arcs, all others single-arc
            for core in argmax:
                prof = enumeration.region_profile(core)
                assert prof.count(k, 0) == 1
                assert prof.count(1, 0) == 3 * k
    assert counts == {1: 1, 2: 4, 3: 4, 4: 4}


def test_partition_and_diagram_maximizers():
    argmax, phi = maximal_cores(PARTITION, 2)
    assert phi == 1
    argmax_d, phi_d = maximal_cores(DIAGRAM, 2)
    assert phi_d == 1
    for core in argmax_d:
        prof = enumeration._core_profile(core)
        assert potential(prof) == 1


def test_maximal_cores_rejects_k_zero():
    with pytest.raises(ContractViolation):
        maximal_cores(MATCHING, 0)


# ---------------------------------------------------------------------------
# Closed forms, unrestricted families


def test_matching_estimate_per_vertex_and_per_chord():
    e1 = closed_form_asymptotics(MATCHING, 1)
    assert e1.period == 2 and e1.alpha == Fraction(-1, 2)
    assert close(e1.rho_inverse, 2, "1e-50")
    assert close(e1.Lambda, mp.sqrt(2) / mp.gamma(mp.mpf(1) / 2), "1e-50")
    # the same estimate indexed by chord count
    assert close(e1.lambda_per_m, 1 / mp.gamma(mp.mpf(1) / 2), "1e-50")
    assert close(matching_block_lambda(2), 1 / (4 * mp.gamma(mp.mpf(3) / 2)), "1e-50")
    assert close(matching_block_lambda(3), 1 / (8 * mp.gamma(mp.mpf(5) / 2)), "1e-50")
    e2 = closed_form_asymptotics(MATCHING, 2)
    assert close(e2.lambda_per_m, matching_block_lambda(2), "1e-50")
    assert e2.alpha == Fraction(1, 2)


def test_matching_estimate_vanishes_off_support():
    e = closed_form_asymptotics(MATCHING, 1)
    assert e.value(7) == 0
    assert e.value(8) > 0


def test_partition_estimate_denominators():
    e1 = closed_form_asymptotics(PARTITION, 1)
    assert close(e1.Lambda, 1 / (32 * mp.sqrt(mp.pi)), "1e-50")
    assert e1.period == 1 and close(e1.rho_inverse, 4, "1e-50")
    e2 = closed_form_asymptotics(PARTITION, 2)
    assert close(e2.Lambda, 1 / (mp.mpf(2) ** 11 * 2 * mp.gamma(mp.mpf(3) / 2)), "1e-50")
    assert e1.lambda_per_m is None


def test_partition_one_crossing_estimate_matches_binomials():
    # [x^n] of the 1-crossing series is binom(2n-5, n-4)
    e = closed_form_asymptotics(PARTITION, 1)
    n = 2000
    ratio = comb(2 * n - 5, n - 4) / e.value(n)
    assert abs(float(ratio) - 1) < 0.05


def test_diagram_estimate_radicals():
    e = closed_form_asymptotics(DIAGRAM, 1)
    assert close(e.rho_inverse, 6 + 4 * mp.sqrt(2), "1e-12")
    assert close(e.Lambda, "0.00987528926049", "1e-12")
    assert e.residuals["kappa"] < mp.mpf("1e-40")
    e0 = closed_form_asymptotics(DIAGRAM, 0)
    d1 = mp.sqrt(99 * mp.sqrt(2) - 140) / 2
    assert close(e0.Lambda, d1 / (2 * mp.sqrt(mp.pi)), "1e-40")


def test_hyperchord_estimate_pinned():
    e = closed_form_asymptotics(HYPERCHORD, 1)
    assert close(e.rho, "0.015391586651", "1e-11")
    assert close(e.Lambda, "0.000957594838973", "1e-13")
    assert e.alpha == Fraction(-1, 2)


def test_zero_crossing_constants():
    assert close(closed_form_asymptotics(MATCHING, 0).Lambda, 2 * mp.sqrt(2) / mp.sqrt(mp.pi), "1e-50")
    assert close(closed_form_asymptotics(PARTITION, 0).Lambda, 1 / mp.sqrt(mp.pi), "1e-50")
    for fam in (MATCHING, PARTITION, DIAGRAM, HYPERCHORD):
        e = closed_form_asymptotics(fam, 0)
        assert e.alpha == Fraction(-3, 2)


def test_closed_form_rejects_bad_input():
    with pytest.raises(ContractViolation):
        closed_form_asymptotics(MATCHING, -1)
    with pytest.raises(ContractViolation):
        closed_form_asymptotics(Family.partition(SizeSet.of(3)), 1)


def test_estimate_json_round_shape():
    d = closed_form_asymptotics(MATCHING, 2).to_json()
    assert d["family"] == "matching" and d["k"] == 2
    assert d["alpha"] == "1/2" and d["period"] == 2
    assert "lambda_per_m" in d and "rho_product" in d["residuals"]


# ---------------------------------------------------------------------------
# Size-restricted partitions: constants


def test_pairs_only_constants_are_degenerate_exactly():
    rc = restricted_partition_constants(SizeSet.of(2))
    assert close(rc.tau, 1, "1e-50")
    assert close(rc.rho, mp.mpf(1) / 2, "1e-50")
    assert close(rc.alpha, 2, "1e-50")
    assert close(rc.beta, 2 * mp.sqrt(2), "1e-50")
    assert rc.verify()


@pytest.mark.parametrize("q", [3, 4, 5])
def test_uniform_size_constants_closed_form(q):
    rc = restricted_partition_constants(SizeSet.of(q))
    tau = (1 / mp.mpf(q - 1)) ** (mp.mpf(1) / q)
    assert close(rc.tau, tau, "1e-45")
    assert close(rc.rho, tau * (q - 1) / q, "1e-45")
    assert close(rc.alpha, mp.mpf(q) / (q - 1), "1e-45")
    assert close(rc.beta, mp.sqrt(2 * mp.mpf(q) ** 2 / mp.mpf(q - 1) ** 3), "1e-45")
    assert rc.verify()


def test_multiple_size_constants_closed_form():
    rc = restricted_partition_constants(SizeSet.multiples(2))
    assert close(rc.tau, 1 / mp.sqrt(3), "1e-45")
    assert close(rc.rho, rc.tau * 2 / mp.mpf(3), "1e-45")
    assert close(rc.beta, mp.sqrt(mp.mpf(3) / 2), "1e-45")
    rc_all = restricted_partition_constants(SizeSet.all_sizes())
    assert close(rc_all.tau, mp.mpf(1) / 2, "1e-45")
    assert close(rc_all.rho, mp.mpf(1) / 4, "1e-45")
    assert close(rc_all.beta, 2, "1e-45")


def test_restricted_constants_need_a_usable_size():
    with pytest.raises(ContractViolation):
        restricted_partition_constants(SizeSet.of(1))


# ---------------------------------------------------------------------------
# Size-restricted partitions: estimates


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pairs_only_estimates_reduce_to_matchings(k):
    rest = restricted_partition_asymptotics(SizeSet.of(2), k)
    closed = closed_form_asymptotics(MATCHING, k)
    assert rest.alpha == closed.alpha
    assert rest.period == 2
    assert close(rest.Lambda, closed.Lambda, "1e-30")
    assert close(rest.rho, closed.rho, "1e-30")


@pytest.mark.parametrize("k", [1, 2])
def test_all_sizes_estimates_reduce_to_partitions(k):
    rest = restricted_partition_asymptotics(SizeSet.all_sizes(), k)
    closed = closed_form_asymptotics(PARTITION, k)
    assert rest.alpha == closed.alpha
    assert close(rest.Lambda, closed.Lambda, "1e-30")


def test_triples_small_crossing_estimate():
    # six cores, all of potential zero, exponent -1/2
    est = restricted_partition_asymptotics(SizeSet.of(3), 4)
    assert est.alpha == Fraction(-1, 2)
    assert est.period == 3
    assert close(est.Lambda, 9 / (4 * mp.sqrt(mp.pi)), "1e-30")
    cores = asy._restricted_partition_cores(SizeSet.of(3), 4)
    assert len(cores) == 6
    assert all(potential(enumeration._core_profile(c)) == 0 for c in cores)


def test_triples_k8_maximizer_census():
    cores = asy._restricted_partition_cores(SizeSet.of(3), 8)
    assert len(cores) == 288
    scored = [potential(enumeration._core_profile(c)) for c in cores]
    assert max(scored) == 1
    assert scored.count(1) == 216
    est = restricted_partition_asymptotics(SizeSet.of(3), 8)
    assert est.alpha == Fraction(1, 2)
    assert close(est.Lambda, "0.6347132815", "1e-9")


def test_restricted_estimate_zero_crossings():
    est = restricted_partition_asymptotics(SizeSet.multiples(2), 0)
    rc = restricted_partition_constants(SizeSet.multiples(2))
    assert est.alpha == Fraction(-3, 2)
    assert est.period == 2
    assert close(est.Lambda, 2 * rc.beta / (2 * mp.sqrt(mp.pi)), "1e-30")


# ---------------------------------------------------------------------------
# Hyperchord singularities


def test_hyperchord_unrestricted_pinned_digits():
    sing = hyperchord_constants()
    assert close(sing.rho, "0.015391586651", "1e-11")
    assert close(sing.h0, "1.03451858505", "1e-11")
    assert close(sing.h1, "0.00365514706592", "1e-13")
    assert sing.residuals["R"] < mp.mpf("1e-50")
    lo, hi = sing.interval  # exact rational endpoints
    assert float(lo) < float(sing.rho) < float(hi)
    assert float(hi - lo) < 1e-12


def test_hyperchord_pairs_recover_diagram_radicals():
    rc = hyperchord_constants(SizeSet.of(2), N=60)
    assert close(rc.rho, (3 - 2 * mp.sqrt(2)) / 2, "1e-30")
    assert close(rc.alpha, 3 * mp.sqrt(2) / 2 - 1, "1e-30")
    assert close(rc.beta, mp.sqrt(99 * mp.sqrt(2) - 140) / 2, "1e-30")


@pytest.mark.parametrize(
    "q,row",
    [
        (3, ("0.16648974", "0.14078101", "7.10323062", "1.18261501", "0.04374341")),
        (4, ("0.29124158", "0.22185941", "4.50735894", "1.31273036", "0.08298341")),
    ],
)
def test_hyperchord_uniform_rows_eight_digits(q, row):
    rc = hyperchord_constants(SizeSet.of(q), N=120)
    tau, rho, rho_inv, alpha, beta = (mp.mpf(v) for v in row)
    assert close(rc.tau, tau, "5e-9")
    assert close(rc.rho, rho, "5e-9")
    assert close(1 / rc.rho, rho_inv, "5e-8")
    assert close(rc.alpha, alpha, "5e-9")
    assert close(rc.beta, beta, "5e-9")
    assert rc.verify()


def test_hyperchord_multiples_first_order_eight_digits():
    rc = hyperchord_constants(SizeSet.multiples(3), N=120)
    assert close(rc.tau, "0.16334708", "5e-9")
    assert close(rc.rho, "0.13864031", "5e-9")
    assert close(1 / rc.rho, "7.21290960", "5e-8")
    assert close(rc.alpha, "1.17820771", "5e-9")


@pytest.mark.parametrize(
    "q,beta",
    [(3, "0.03937093072"), (4, "0.07703441372")],
)
def test_hyperchord_multiples_square_root_coefficient(q, beta):
    # frozen against the coefficient asymptotics of the composed series:
    # exact h_n from H = 1 + C(x H), then h_n rho^n n^{3/2} 2 sqrt(pi) -> beta
    rc = hyperchord_constants(SizeSet.multiples(q), N=120)
    assert close(rc.beta, beta, "1e-9")
    assert rc.verify()


def test_hyperchord_seed_gap_shrinks_with_order():
    lo = hyperchord_constants(SizeSet.multiples(3), N=50)
    hi = hyperchord_constants(SizeSet.multiples(3), N=120)
    assert lo.residuals["seed_gap"] > hi.residuals["seed_gap"]
    # the refined root does not depend on the seed order
    assert close(lo.tau, hi.tau, "1e-30")


def test_hyperchord_order_too_small_reports_residual():
    from chordk.chords_core import ChordError

    with pytest.raises(ChordError, match="residual"):
        hyperchord_constants(SizeSet.multiples(3), N=40)


def test_hyperchord_even_multiples_unsupported():
    with pytest.raises(ContractViolation):
        hyperchord_constants(SizeSet.multiples(2), N=40)


# ---------------------------------------------------------------------------
# Block laws


def test_partition_block_law_is_exact_rational():
    law = block_law_constants(PARTITION)
    assert law.exact
    assert law.mu == Fraction(1, 2)
    assert law.sigma2 == Fraction(1, 8)


def test_diagram_block_law_radicals():
    law = block_law_constants(DIAGRAM)
    assert close(law.mu, mp.mpf(1) / 2 + mp.sqrt(2) / 2, "1e-12")
    assert close(law.sigma2, mp.mpf(1) / 4 + mp.sqrt(2) / 8, "1e-12")


def test_hyperchord_block_law_pinned():
    law = block_law_constants(HYPERCHORD)
    assert close(law.mu, "2.029890", "1e-6")
    assert close(law.sigma2, "0.923054", "1e-6")


def test_matching_block_law_unsupported():
    with pytest.raises(ContractViolation):
        block_law_constants(MATCHING)


# ---------------------------------------------------------------------------
# Empirical ratios


def test_matching_ratio_improves_and_lands_close():
    rep = empirical_ratio_check(MATCHING, 1, m_max=200)
    assert rep.monotone
    assert rep.final_gap < 0.10
    assert rep.points[0][0] == 20 and rep.points[-1][0] == 200
    gaps = [abs(float(r) - 1) for _, r in rep.points]
    assert gaps == sorted(gaps, reverse=True)


def test_partition_ratio_zero_crossings():
    rep = empirical_ratio_check(PARTITION, 0, m_max=200)
    assert rep.monotone
    assert rep.final_gap < 0.05


def test_ratio_grid_needs_room():
    with pytest.raises(ContractViolation):
        empirical_ratio_check(MATCHING, 1, m_max=30)
