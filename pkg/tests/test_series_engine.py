"""Series arithmetic, equation solving, and the family series."""

from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from chordk.chords_core import (
    DIAGRAM,
    HYPERCHORD,
    MATCHING,
    PARTITION,
    ContractViolation,
    Family,
    SizeSet,
    blocks_cross_count,
    crossing_number,
    enumerate_all,
)
from chordk.series_engine import (
    FPoly,
    TruncatedSeries,
    YPoly,
    connected_series,
    crossing_free_series,
    marked_transform,
    marked_transform_diagram,
    series_coefficients_from_json,
    series_coefficients_json,
    solve_implicit,
)


fractions_st = st.builds(
    Fraction, st.integers(-40, 40), st.integers(1, 8)
)
ypoly_st = st.lists(fractions_st, max_size=5).map(YPoly)


# ---------------------------------------------------------------------------
# YPoly algebra


@settings(max_examples=80, deadline=None)
@given(ypoly_st, ypoly_st, ypoly_st)
def test_ypoly_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=50, deadline=None)
@given(ypoly_st, ypoly_st)
def test_ypoly_exact_division_round_trip(a, b):
    if not b:
        return
    assert (a * b).div_exact(b) == a


def test_ypoly_inexact_division_raises():
    with pytest.raises(ContractViolation):
        YPoly([1, 1]).div_exact(YPoly([0, 1]))


@settings(max_examples=50, deadline=None)
@given(ypoly_st, fractions_st)
def test_ypoly_evaluation_is_homomorphism(a, y):
    b = YPoly([1, -2, 3])
    assert (a * b)(y) == a(y) * b(y)
    assert (a + b)(y) == a(y) + b(y)


def test_ypoly_str():
    assert str(YPoly([0, 1, Fraction(3, 2)])) == "y + 3/2*y^2"
    assert str(YPoly()) == "0"


# ---------------------------------------------------------------------------
# TruncatedSeries algebra


series_st = st.lists(fractions_st, min_size=1, max_size=8).map(
    lambda cs: TruncatedSeries(cs, 7)
)


@settings(max_examples=60, deadline=None)
@given(series_st, series_st, series_st)
def test_series_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(series_st, series_st)
def test_series_product_rule(a, b):
    left = (a * b).derivative()
    right = a.derivative() * b.truncate(6) + a.truncate(6) * b.derivative()
    assert left == right


@settings(max_examples=40, deadline=None)
@given(series_st)
def test_series_inverse(a):
    if a.coeffs[0] == 0:
        a = a + TruncatedSeries.one(a.order)
    if a.coeffs[0] == 0:
        return
    assert a * a.inverse() == TruncatedSeries.one(a.order)


def test_series_shift_round_trip():
    a = TruncatedSeries([0, 0, 1, 2, 3], 4)
    down = a.shift_down(2)
    assert down.order == 2 and down.coeffs == [1, 2, 3]
    up = TruncatedSeries([1, 2, 3], 5).shift_up(2)
    assert up.coeffs == [0, 0, 1, 2, 3, 0]
    with pytest.raises(ContractViolation):
        a.shift_down(3)


def test_series_compose_linear():
    f = TruncatedSeries([1, 2, 3], 5)
    g = TruncatedSeries.x_power(1, 5, Fraction(2))
    assert f.compose(g).coeffs[:3] == [1, 4, 12]


# ---------------------------------------------------------------------------
# Crossing-free series, one family at a time


def test_matching_series_is_catalan():
    M0 = crossing_free_series(MATCHING, 16)
    assert [M0.coeff(2 * j) for j in range(9)] == [1, 1, 2, 5, 14, 42, 132, 429, 1430]
    assert all(M0.coeff(2 * j + 1) == 0 for j in range(8))


def test_partition_series_is_catalan_at_y1():
    P0 = crossing_free_series(PARTITION, 8)
    assert P0.coeffs == [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def test_partition_series_refines_to_narayana():
    P0 = crossing_free_series(PARTITION, 6, bivariate=True)
    for n in range(1, 7):
        row = YPoly.coerce(P0.coeff(n))
        for m in range(1, n + 1):
            narayana = Fraction(comb(n, m) * comb(n, m - 1), n)
            assert row.coeff(m) == narayana, (n, m)


def test_partition_series_matches_enumeration():
    P0 = crossing_free_series(PARTITION, 7, bivariate=True)
    for n in range(1, 8):
        bf = YPoly()
        for s in enumerate_all(PARTITION, n):
            if crossing_number(s) == 0:
                bf = bf + YPoly.y_power(s.m)
        assert YPoly.coerce(P0.coeff(n)) == bf, n


def test_triple_blocks_are_fuss_catalan():
    P3 = crossing_free_series(Family.partition(SizeSet.of(3)), 12)
    for n in range(1, 5):
        assert P3.coeff(3 * n) == Fraction(comb(3 * n, n), 2 * n + 1)
    assert all(P3.coeff(i) == 0 for i in range(13) if i % 3)


def test_periodic_blocks_match_enumeration():
    fam = Family.partition(SizeSet.multiples(3))
    Pm = crossing_free_series(fam, 9, bivariate=True)
    for n in (3, 6, 9):
        bf = YPoly()
        for s in enumerate_all(fam, n):
            if crossing_number(s) == 0:
                bf = bf + YPoly.y_power(s.m)
        assert YPoly.coerce(Pm.coeff(n)) == bf, n


def test_diagram_series_rows():
    D0 = crossing_free_series(DIAGRAM, 6, bivariate=True)
    assert YPoly.coerce(D0.coeff(0)) == 1
    assert YPoly.coerce(D0.coeff(1)) == 1
    assert YPoly.coerce(D0.coeff(2)) == YPoly([1, 1])
    assert YPoly.coerce(D0.coeff(3)) == YPoly([1, 1]) ** 3
    assert YPoly.coerce(D0.coeff(4)) == YPoly([1, 1]) ** 4 * YPoly([1, 2])


def test_diagram_series_counts_at_y1():
    D0 = crossing_free_series(DIAGRAM, 8)
    assert D0.coeffs[:5] == [1, 1, 2, 8, 48]


def test_diagram_series_matches_enumeration():
    D0 = crossing_free_series(DIAGRAM, 6, bivariate=True)
    for n in range(1, 7):
        bf = YPoly()
        for s in enumerate_all(DIAGRAM, n):
            if crossing_number(s) == 0:
                bf = bf + YPoly.y_power(s.m)
        assert YPoly.coerce(D0.coeff(n)) == bf, n


def test_hyperchord_series_low_orders():
    H0 = crossing_free_series(HYPERCHORD, 4, bivariate=True)
    one_y = YPoly([1, 1])
    assert YPoly.coerce(H0.coeff(1)) == one_y
    assert YPoly.coerce(H0.coeff(2)) == one_y ** 3
    # three points admit no crossing, so every subset of the 7 blocks occurs
    assert YPoly.coerce(H0.coeff(3)) == one_y ** 7


def test_hyperchord_series_matches_enumeration():
    H0 = crossing_free_series(HYPERCHORD, 4, bivariate=True)
    for n in range(1, 5):
        bf = YPoly()
        for s in enumerate_all(HYPERCHORD, n):
            if crossing_number(s) == 0:
                bf = bf + YPoly.y_power(s.m)
        assert YPoly.coerce(H0.coeff(n)) == bf, n


def test_hyperchord_series_alternate_cubic_form():
    # independent check of the same counts through the variable change
    # x -> x/(1+x), F -> (1+x) * G
    N = 14
    H = crossing_free_series(HYPERCHORD, N)
    one_plus_x = TruncatedSeries([Fraction(1), Fraction(1)], N)
    g = TruncatedSeries(
        [Fraction(0)] + [Fraction((-1) ** (i - 1)) for i in range(1, N + 1)], N
    )
    Ht = H.compose(g) * one_plus_x.inverse()
    res = (
        (one_plus_x ** 5) * Ht ** 3
        - (one_plus_x ** 2) * TruncatedSeries([3, 4, 9], N) * Ht ** 2
        + TruncatedSeries([3, 5, -7, 23], N) * Ht
        + TruncatedSeries([-1, 0, 17], N)
    )
    assert all(c == 0 for c in res.coeffs)


# ---------------------------------------------------------------------------
# Connected series


def _brute_connected(n: int, pool: list[frozenset], weight_blocks: bool):
    if n == 1:
        return YPoly([1])
    out = YPoly()
    for mask in range(1, 1 << len(pool)):
        picked = [pool[i] for i in range(len(pool)) if mask >> i & 1]
        if len({v for b in picked for v in b}) != n:
            continue
        ok = True
        adj: dict[int, set[int]] = {i: set() for i in range(len(picked))}
        for i in range(len(picked)):
            for j in range(i + 1, len(picked)):
                if blocks_cross_count(sorted(picked[i]), sorted(picked[j])):
                    ok = False
                    break
                if picked[i] & picked[j]:
                    adj[i].add(j)
                    adj[j].add(i)
            if not ok:
                break
        if not ok:
            continue
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == len(picked):
            out = out + (YPoly.y_power(len(picked)) if weight_blocks else YPoly([1]))
    return out


def test_connected_diagrams_match_brute_force():
    CD = connected_series(DIAGRAM, 6, bivariate=True)
    for n in range(1, 7):
        pool = [frozenset(c) for c in combinations(range(1, n + 1), 2)]
        assert YPoly.coerce(CD.coeff(n)) == _brute_connected(n, pool, True), n


def test_connected_uniform_hyperchords_match_brute_force():
    for q in (3, 4):
        C = connected_series(Family.hyperchord(SizeSet.of(q)), 6)
        for n in range(1, 7):
            pool = [frozenset(c) for c in combinations(range(1, n + 1), q) if q <= n]
            bf = _brute_connected(n, pool, False)
            assert C.coeff(n) == bf.coeff(0), (q, n)


def test_connected_multiple_hyperchords_match_brute_force():
    C = connected_series(Family.hyperchord(SizeSet.multiples(3)), 6)
    for n in range(1, 7):
        pool = []
        for r in (3, 6):
            if r <= n:
                pool.extend(frozenset(c) for c in combinations(range(1, n + 1), r))
        bf = _brute_connected(n, pool, False)
        assert C.coeff(n) == bf.coeff(0), n


def test_component_decomposition_identity():
    # every crossing-free diagram is a chain of components, each component
    # vertex carrying the gap that follows it
    N = 10
    D0 = crossing_free_series(DIAGRAM, N, bivariate=True)
    CD = connected_series(DIAGRAM, N, bivariate=True)
    rhs = TruncatedSeries.one(N) + CD.compose(D0.shift_up(1))
    diff = D0 - rhs
    assert all(
        not (c if isinstance(c, YPoly) else c != 0) for c in diff.coeffs
    )


def test_connected_q2_routes_to_diagram_cubic():
    a = connected_series(Family.hyperchord(SizeSet.of(2)), 8)
    b = connected_series(DIAGRAM, 8)
    assert a == b


# ---------------------------------------------------------------------------
# Solver edge cases


def test_solver_rejects_bad_seeds():
    order = 6
    eq = FPoly(
        [
            TruncatedSeries.one(order),
            TruncatedSeries([Fraction(-1)], order),
            TruncatedSeries.x_power(2, order),
        ]
    )  # F = 1 + x^2 F^2
    with pytest.raises(ContractViolation):
        solve_implicit(eq, [Fraction(2)], order)


def test_solver_matches_direct_recurrence():
    order = 12
    eq = FPoly(
        [
            TruncatedSeries.one(order),
            TruncatedSeries([Fraction(-1)], order),
            TruncatedSeries.x_power(2, order),
        ]
    )
    F = solve_implicit(eq, [Fraction(1)], order)
    assert F == crossing_free_series(MATCHING, order)


def test_solver_numeric_mode():
    import mpmath as mp

    order = 10
    exact = crossing_free_series(MATCHING, order)
    cs = lambda k, c: TruncatedSeries.x_power(k, order, mp.mpf(c))
    eq = FPoly([cs(0, 1), cs(0, -1), cs(2, 1)])
    F = solve_implicit(eq, [mp.mpf(1)], order, tol=mp.mpf("1e-25"))
    for i in range(order + 1):
        assert abs(F.coeff(i) - int(exact.coeff(i))) < 1e-18


# ---------------------------------------------------------------------------
# Marked transforms


def test_marked_transform_binomial_rule():
    F0 = crossing_free_series(MATCHING, 24)
    for i in range(1, 6):
        R = marked_transform(F0, i, 24)
        for s in range(24 + 1):
            expect = (
                comb(s - 1, i - 1) * F0.coeff(s - i) if s >= i else Fraction(0)
            )
            assert R.coeff(s) == expect


def test_marked_transform_diagram_rule():
    A = crossing_free_series(DIAGRAM, 16, bivariate=True)
    for (i, j) in ((1, 0), (2, 0), (1, 1), (2, 1), (3, 0)):
        R = marked_transform_diagram(A, i, j, 12)
        for s in range(13):
            expect = (
                comb(s - 1, i - 1) * YPoly.coerce(A.coeff(s + i + j))
                if s >= i
                else YPoly()
            )
            assert YPoly.coerce(R.coeff(s)) == expect, (i, j, s)


def test_marked_transform_diagram_needs_margin():
    A = crossing_free_series(DIAGRAM, 10, bivariate=True)
    with pytest.raises(ContractViolation):
        marked_transform_diagram(A, 2, 1, 10)


# ---------------------------------------------------------------------------
# Serialization


def test_json_round_trip_univariate():
    F = crossing_free_series(MATCHING, 8)
    data = series_coefficients_json(F)
    assert all(isinstance(v, str) for v in data)
    assert series_coefficients_from_json(data).coeffs == F.coeffs


def test_json_round_trip_bivariate():
    F = crossing_free_series(DIAGRAM, 6, bivariate=True)
    data = series_coefficients_json(F)
    assert all(isinstance(v, list) for v in data)
    back = series_coefficients_from_json(data)
    for i in range(7):
        assert YPoly.coerce(back.coeff(i)) == YPoly.coerce(F.coeff(i))
