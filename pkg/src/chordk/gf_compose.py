"""Series for configurations with exactly k crossings.

The series is assembled from the k-core polynomial: every region of a
core is filled with crossing-free material through a marked transform
of the family's crossing-free series, and a root vertex is then marked
with x*d/dx.  The Touchard-Riordan polynomial and the totals report are
independent cross-checks on the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .chords_core import (
    ContractViolation,
    Family,
    crossing_number,
    enumerate_all,
)
from .enumeration import CorePolynomial, core_polynomial
from .series_engine import (
    TruncatedSeries,
    YPoly,
    crossing_free_series,
    marked_transform,
    marked_transform_diagram,
    series_coefficients_json,
)

__all__ = [
    "SubstitutionRules",
    "TotalsRow",
    "default_rules",
    "gf_k",
    "gf_k_from_core_poly",
    "gf_k_json",
    "touchard_riordan",
    "verify_totals",
]


@dataclass
class SubstitutionRules:
    """Region fillers for one family's core-polynomial variables.

    Covering families (matchings, partitions) replace a region with i
    boundary arcs by the marked transform of the crossing-free series.
    Non-covering families replace x_{i,j} with i >= 1 by the diagram
    transform, and read the arcless slots x_{0,j} straight off [x^j] of
    the crossing-free series, a plain polynomial in y.
    """

    family: Family
    bivariate: bool
    _base: TruncatedSeries | None = field(default=None, init=False, repr=False)

    def base_series(self, order: int) -> TruncatedSeries:
        if self._base is None or self._base.order < order:
            self._base = crossing_free_series(
                self.family, order, bivariate=self.bivariate
            )
        return self._base

    def kernel(self, i: int, j: int, order: int) -> TruncatedSeries:
        """Filler series for a region with i >= 1 arcs and j peaks."""
        if i < 1:
            raise ContractViolation("kernel needs at least one boundary arc")
        if self.family.covers_vertices:
            if j:
                raise ContractViolation(
                    f"no rule for x{i}_{j}: peaks require a non-covering family"
                )
            return marked_transform(self.base_series(order), i, order)
        # the transform reads i + j orders past the target
        return marked_transform_diagram(self.base_series(order + i + j), i, j, order)

    def arcless(self, j: int) -> YPoly:
        """Constant substituted for x_{0,j}: [x^j] of the crossing-free series."""
        if self.family.covers_vertices:
            raise ContractViolation(f"no rule for x0_{j} in a covering family")
        return YPoly.coerce(self.base_series(j).coeff(j))


def default_rules(family: Family) -> SubstitutionRules:
    """The rules gf_k uses: y marks blocks except for plain matchings."""
    return SubstitutionRules(family, bivariate=family.kind != "matching")


def gf_k_from_core_poly(
    core: CorePolynomial, rules: SubstitutionRules, order: int
) -> TruncatedSeries:
    """Substitute fillers into an explicit core polynomial, then mark a root."""
    total = TruncatedSeries.zero(order)
    for (profile, m), coeff in core.terms.items():
        term = TruncatedSeries.one(order)
        for (i, j), c in profile.counts:
            if i == 0:
                term = term.scale(rules.arcless(j) ** c)
            else:
                term = term * (rules.kernel(i, j, order) ** c)
        weight = YPoly.y_power(m, coeff) if rules.bivariate else coeff
        total = total + term.scale(weight)
    return total.x_dx()


def gf_k(family: Family, k: int, order: int) -> TruncatedSeries:
    """Series of the family's configurations with exactly k crossings.

    k = 0 is the crossing-free series itself; positive k goes through
    core_polynomial, whose per-family bounds limit the supported range.
    Output is univariate for matchings, otherwise bivariate with y
    marking blocks.
    """
    if k < 0:
        raise ContractViolation("crossing count must be nonnegative")
    rules = default_rules(family)
    if k == 0:
        return crossing_free_series(family, order, bivariate=rules.bivariate)
    return gf_k_from_core_poly(core_polynomial(family, k), rules, order)


def gf_k_json(family: Family, k: int, order: int) -> dict:
    """JSON payload for one series: {family, k, N, coefficients}."""
    return {
        "family": family.tag,
        "k": k,
        "N": order,
        "coefficients": series_coefficients_json(gf_k(family, k, order)),
    }


def touchard_riordan(m: int) -> TruncatedSeries:
    """Crossing histogram of matchings on 2m points, as a polynomial in z.

    Expands (1-z)^(-m) * sum_{t=-m..m} (-1)^t binom(2m, m+t) z^(t(t-1)/2)
    exactly, multiplying in the inverse power as its series expansion
    truncated at the maximal crossing number m(m-1)/2.
    """
    if m < 0:
        raise ContractViolation("negative matching size")
    if m == 0:
        return TruncatedSeries([Fraction(1)], 0)
    deg = m * (m - 1) // 2
    num = [0] * (deg + 1)
    for t in range(-m, m + 1):
        e = t * (t - 1) // 2
        if e <= deg:
            sign = -1 if t % 2 else 1
            num[e] += sign * comb(2 * m, m + t)
    out = [Fraction(0)] * (deg + 1)
    for e in range(deg + 1):
        if num[e]:
            for d in range(deg + 1 - e):
                out[e + d] += num[e] * comb(d + m - 1, m - 1)
    return TruncatedSeries(out, deg)


@dataclass(frozen=True)
class TotalsRow:
    """One n of a totals report: series partial sums against brute force."""

    n: int
    series_total: int
    brute_total: int
    covered: bool
    ok: bool | None


def verify_totals(family: Family, order: int, k_max: int) -> list[TotalsRow]:
    """Compare sum over k <= k_max of [x^n] gf_k at y=1 with exhaustive counts.

    ``covered`` records whether k_max reaches the largest crossing number
    seen at that n; only then is ``ok`` a verdict, since otherwise the
    partial sum is a strict lower bound.  Mismatches are reported in the
    rows, never raised.
    """
    totals = [Fraction(0)] * (order + 1)
    for k in range(k_max + 1):
        F = gf_k(family, k, order).eval_y(1)
        for n in range(order + 1):
            totals[n] += F.coeff(n)
    rows = []
    for n in range(1, order + 1):
        brute = 0
        k_top = 0
        for sys in enumerate_all(family, n):
            brute += 1
            k_top = max(k_top, crossing_number(sys))
        covered = k_top <= k_max
        exact = totals[n]
        if exact.denominator != 1:
            raise ContractViolation(f"non-integral series total {exact} at n={n}")
        ok = (int(exact) == brute) if covered else None
        rows.append(TotalsRow(n, int(exact), brute, covered, ok))
    return rows
