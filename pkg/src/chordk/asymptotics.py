"""Growth constants for configurations with k crossings.

Coefficient asymptotics here all take the shape Lambda * n^alpha * rho^-n
on the supported residue class of n.  The exponent alpha is decided by the
maximum of the potential function over k-cores; Lambda aggregates the
singular behaviour of the crossing-free series over the maximizing cores.
For the four unrestricted families both are available in closed form; for
size-restricted partitions and hyperchord families the constants are roots
of explicit polynomial systems and are computed by exact bisection plus
high-precision Newton refinement.

Working precision is per call: ``precision`` (decimal digits) defaults to
the ``CHORDK_PRECISION`` environment variable, or 60.  No global mpmath
state is touched.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Iterator, Mapping

import mpmath as mp

from .chords_core import (
    DIAGRAM,
    HYPERCHORD,
    MATCHING,
    PARTITION,
    ChordError,
    ChordSystem,
    ContractViolation,
    Family,
    RegionProfile,
    ResourceBoundExceeded,
    SizeSet,
    blocks_cross_count,
)
from . import enumeration
from .enumeration import enumerate_cores
from .series_engine import connected_series

__all__ = [
    "AsymptoticEstimate",
    "RestrictedConstants",
    "HyperchordSingularity",
    "BlockLaw",
    "RatioReport",
    "potential",
    "maximal_cores",
    "closed_form_asymptotics",
    "matching_block_lambda",
    "restricted_partition_constants",
    "restricted_partition_asymptotics",
    "hyperchord_constants",
    "block_law_constants",
    "empirical_ratio_check",
]


# ---------------------------------------------------------------------------
# Precision plumbing


_DEFAULT_DPS = 60
_GUARD_DPS = 10


def _resolve_dps(precision: int | None) -> int:
    if precision is None:
        precision = int(os.environ.get("CHORDK_PRECISION", str(_DEFAULT_DPS)))
    if precision < 15:
        raise ContractViolation("working precision below 15 digits")
    return precision


def _mpf_frac(q: Fraction) -> mp.mpf:
    return mp.mpf(q.numerator) / mp.mpf(q.denominator)


def _double_factorial(n: int) -> int:
    """n!! for odd n >= -1 ((-1)!! = 1)."""
    if n < -1 or n % 2 == 0:
        raise ContractViolation("double factorial defined here for odd n >= -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# ---------------------------------------------------------------------------
# Exact bivariate polynomials.  Small dicts, exact coefficients; used for
# the functional systems, their derivatives, and implicit differentiation.


class _Poly2:
    """Polynomial in two variables with integer or rational coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[tuple[int, int], int | Fraction]):
        self.c = {k: v for k, v in coeffs.items() if v}

    def __add__(self, other: "_Poly2") -> "_Poly2":
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) + v
        return _Poly2(out)

    def __sub__(self, other: "_Poly2") -> "_Poly2":
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) - v
        return _Poly2(out)

    def __mul__(self, other: "_Poly2") -> "_Poly2":
        out: dict[tuple[int, int], int | Fraction] = {}
        for (i, j), u in self.c.items():
            for (a, b), v in other.c.items():
                k = (i + a, j + b)
                out[k] = out.get(k, 0) + u * v
        return _Poly2(out)

    def scale(self, s: int | Fraction) -> "_Poly2":
        return _Poly2({k: s * v for k, v in self.c.items()})

    def pow(self, e: int) -> "_Poly2":
        out = _Poly2({(0, 0): 1})
        for _ in range(e):
            out = out * self
        return out

    def dx(self) -> "_Poly2":
        return _Poly2({(i - 1, j): i * v for (i, j), v in self.c.items() if i})

    def dy(self) -> "_Poly2":
        return _Poly2({(i, j - 1): j * v for (i, j), v in self.c.items() if j})

    def __call__(self, x, y):
        total = 0
        for (i, j), v in self.c.items():
            total += v * x**i * y**j
        return total


_X = _Poly2({(1, 0): 1})
_Y = _Poly2({(0, 1): 1})
_ONE = _Poly2({(0, 0): 1})


def _bisect_exact(
    f: Callable[[Fraction], Fraction], lo: Fraction, hi: Fraction, width: Fraction
) -> tuple[Fraction, Fraction]:
    """Shrink a sign-changing rational interval below ``width``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo < 0) == (fhi < 0):
        raise ContractViolation("bisection needs a sign change")
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo, hi


def _newton2(
    F1: _Poly2, F2: _Poly2, x0: mp.mpf, y0: mp.mpf, tol: mp.mpf
) -> tuple[mp.mpf, mp.mpf]:
    """Newton iteration for F1(x,y) = F2(x,y) = 0 from (x0, y0)."""
    f1x, f1y = F1.dx(), F1.dy()
    f2x, f2y = F2.dx(), F2.dy()
    x, y = mp.mpf(x0), mp.mpf(y0)
    for _ in range(200):
        a, b = f1x(x, y), f1y(x, y)
        c, d = f2x(x, y), f2y(x, y)
        det = a * d - b * c
        if det == 0:
            raise ChordError("singular Jacobian in Newton iteration")
        r1, r2 = F1(x, y), F2(x, y)
        dx = (r1 * d - r2 * b) / det
        dy = (r2 * a - r1 * c) / det
        x, y = x - dx, y - dy
        if abs(dx) < tol and abs(dy) < tol:
            return x, y
    raise ChordError("Newton iteration did not converge")


# ---------------------------------------------------------------------------
# Result records


@dataclass(frozen=True)
class AsymptoticEstimate:
    """Leading coefficient estimate Lambda * n^alpha * rho^-n.

    ``period`` is the support modulus: coefficients vanish off n ≡ 0
    (mod period).  ``alpha`` stays an exact rational; the reals carry the
    working precision they were computed at.
    """

    family: str
    k: int
    Lambda: mp.mpf
    alpha: Fraction
    rho: mp.mpf
    rho_inverse: mp.mpf
    period: int
    provenance: str
    residuals: dict[str, mp.mpf] = field(default_factory=dict)
    precision: int = _DEFAULT_DPS
    # matchings only: the same estimate rewritten per chord count m = n/2,
    # a_n = lambda_per_m * m^alpha * 4^m.  None for other families.
    lambda_per_m: mp.mpf | None = None

    def value(self, n: int) -> mp.mpf:
        if n % self.period:
            return mp.mpf(0)
        with mp.workdps(self.precision):
            return self.Lambda * mp.mpf(n) ** _mpf_frac(self.alpha) * self.rho_inverse**n

    def to_json(self) -> dict[str, object]:
        out: dict[str, object] = {
            "family": self.family,
            "k": self.k,
            "Lambda": mp.nstr(self.Lambda, self.precision),
            "alpha": str(self.alpha),
            "rho": mp.nstr(self.rho, self.precision),
            "rho_inverse": mp.nstr(self.rho_inverse, self.precision),
            "period": self.period,
            "residuals": {k: mp.nstr(v, 8) for k, v in sorted(self.residuals.items())},
            "provenance": self.provenance,
        }
        if self.lambda_per_m is not None:
            out["lambda_per_m"] = mp.nstr(self.lambda_per_m, self.precision)
        return out


@dataclass(frozen=True)
class RestrictedConstants:
    """Singularity data (tau, rho, alpha, beta) of a size-restricted family.

    tau is the critical point of the inverse map, rho the singularity,
    alpha the value of the crossing-free series there, beta the
    square-root coefficient.  ``kind`` records which functional system
    produced the numbers ("partition" or "hyperchord").
    """

    sizes: SizeSet
    tau: mp.mpf
    rho: mp.mpf
    alpha: mp.mpf
    beta: mp.mpf
    residuals: dict[str, mp.mpf]
    precision: int
    provenance: str = "polynomial-root"
    kind: str = "partition"

    def verify(self, tol: float = 1e-12) -> bool:
        """Re-evaluate the defining relations at the stored values."""
        res = _reevaluate_restricted(self)
        return all(abs(v) < tol for v in res.values())

    def to_json(self) -> dict[str, object]:
        return {
            "sizes": str(self.sizes),
            "kind": self.kind,
            "tau": mp.nstr(self.tau, self.precision),
            "rho": mp.nstr(self.rho, self.precision),
            "alpha": mp.nstr(self.alpha, self.precision),
            "beta": mp.nstr(self.beta, self.precision),
            "residuals": {k: mp.nstr(v, 8) for k, v in sorted(self.residuals.items())},
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class HyperchordSingularity:
    """Singular expansion data of the crossing-free hyperchord series.

    rho is the smallest positive root of an explicit integer quartic,
    isolated in the exact rational ``interval``; h0 and h1 are the value
    and square-root coefficient of the series at rho.
    """

    rho: mp.mpf
    h0: mp.mpf
    h1: mp.mpf
    interval: tuple[Fraction, Fraction]
    residuals: dict[str, mp.mpf]
    precision: int

    def to_json(self) -> dict[str, object]:
        return {
            "rho": mp.nstr(self.rho, self.precision),
            "h0": mp.nstr(self.h0, self.precision),
            "h1": mp.nstr(self.h1, self.precision),
            "interval": [str(self.interval[0]), str(self.interval[1])],
            "residuals": {k: mp.nstr(v, 8) for k, v in sorted(self.residuals.items())},
        }


@dataclass(frozen=True)
class BlockLaw:
    """Per-vertex mean and variance of the block count, crossing-free case."""

    family: str
    mu: object  # Fraction when exact, else mp.mpf
    sigma2: object
    exact: bool
    residuals: dict[str, mp.mpf]
    precision: int

    def to_json(self) -> dict[str, object]:
        fmt = lambda v: str(v) if self.exact else mp.nstr(v, self.precision)
        return {
            "family": self.family,
            "mu": fmt(self.mu),
            "sigma2": fmt(self.sigma2),
            "exact": self.exact,
            "residuals": {k: mp.nstr(v, 8) for k, v in sorted(self.residuals.items())},
        }


@dataclass(frozen=True)
class RatioReport:
    """Coefficient-to-estimate ratios along a grid of sizes."""

    family: str
    k: int
    points: tuple[tuple[int, mp.mpf], ...]
    monotone: bool
    final_gap: mp.mpf

    def to_json(self) -> dict[str, object]:
        return {
            "family": self.family,
            "k": self.k,
            "points": [[m, mp.nstr(r, 12)] for m, r in self.points],
            "monotone": self.monotone,
            "final_gap": mp.nstr(self.final_gap, 12),
        }


# ---------------------------------------------------------------------------
# Potential function and maximal cores


def potential(profile: RegionProfile | Mapping) -> int:
    """Sum of (2i - 3) over regions with i > 1 boundary arcs.

    Accepts a RegionProfile, an {arcs: count} mapping, or an
    {(arcs, peaks): count} mapping.
    """
    if isinstance(profile, RegionProfile):
        items = [(i, c) for (i, j), c in profile.counts]
    else:
        items = []
        for key, c in profile.items():
            i = key[0] if isinstance(key, tuple) else int(key)
            if c < 0:
                raise ContractViolation("negative region count")
            items.append((i, c))
    return sum((2 * i - 3) * c for i, c in items if i > 1)


def maximal_cores(family: Family, k: int) -> tuple[list[ChordSystem], int]:
    """All k-cores attaining the maximal potential, plus that maximum."""
    if k < 1:
        raise ContractViolation("maximal cores need k >= 1")
    cores = enumerate_cores(family, k)
    if not cores:
        raise ContractViolation(f"no {family} cores at k={k}")
    scored = [(enumeration.potential(core), core) for core in cores]
    phi_max = max(phi for phi, _ in scored)
    return [core for phi, core in scored if phi == phi_max], phi_max


# ---------------------------------------------------------------------------
# Closed forms for the unrestricted families


def _diagram_radicals() -> tuple[mp.mpf, mp.mpf, mp.mpf]:
    """(rho, d0, d1) for crossing-free chord diagrams, current precision."""
    s2 = mp.sqrt(2)
    rho = (3 - 2 * s2) / 2
    d0 = 3 * s2 / 2 - 1
    d1 = mp.sqrt(99 * s2 - 140) / 2
    return rho, d0, d1


def closed_form_asymptotics(
    family: Family, k: int, precision: int | None = None
) -> AsymptoticEstimate:
    """Leading estimate of [x^n] for the family's k-crossing series.

    Counts are by vertices for all four families; matchings are supported
    on even n only (period 2).  k = 0 returns the crossing-free estimate
    with alpha = -3/2.
    """
    if k < 0:
        raise ContractViolation("crossing count must be nonnegative")
    if family.sizes is not None:
        raise ContractViolation(
            "size-restricted families: use restricted_partition_asymptotics "
            "or hyperchord_constants"
        )
    dps = _resolve_dps(precision)
    with mp.workdps(dps + _GUARD_DPS):
        dfact = mp.mpf(_double_factorial(2 * k - 3)) if k >= 1 else None
        residuals: dict[str, mp.mpf] = {}
        provenance = "closed-form"
        if family.kind == "matching":
            rho, period = mp.mpf(1) / 2, 2
            if k == 0:
                lam, alpha = 2 * mp.sqrt(2) / mp.sqrt(mp.pi), Fraction(-3, 2)
            else:
                lam = (
                    mp.sqrt(2)
                    * dfact
                    / (mp.mpf(4) ** (k - 1) * factorial(k) * mp.gamma(k - mp.mpf(1) / 2))
                )
                alpha = Fraction(2 * k - 3, 2)
        elif family.kind == "partition":
            rho, period = mp.mpf(1) / 4, 1
            if k == 0:
                lam, alpha = 1 / mp.sqrt(mp.pi), Fraction(-3, 2)
            else:
                lam = dfact / (
                    mp.mpf(2) ** (6 * k - 1) * factorial(k) * mp.gamma(k - mp.mpf(1) / 2)
                )
                alpha = Fraction(2 * k - 3, 2)
        elif family.kind == "diagram":
            rho, d0, d1 = _diagram_radicals()
            period = 1
            if k == 0:
                lam, alpha = d1 / (2 * mp.sqrt(mp.pi)), Fraction(-3, 2)
            else:
                kappa = (d0 - 1 - rho) / rho  # = sqrt(2) - 1 exactly
                residuals["kappa"] = abs(kappa - (mp.sqrt(2) - 1))
                lam = (
                    kappa**k
                    * d1
                    * dfact
                    / (factorial(k) * mp.gamma(k - mp.mpf(1) / 2))
                )
                alpha = Fraction(2 * k - 3, 2)
        elif family.kind == "hyperchord":
            sing = hyperchord_constants(precision=dps)
            rho, period = sing.rho, 1
            provenance = "polynomial-root"
            residuals.update(sing.residuals)
            if k == 0:
                lam, alpha = sing.h1 / (2 * mp.sqrt(mp.pi)), Fraction(-3, 2)
            else:
                kappa = (sing.h0 - 1 - 2 * rho) / rho
                lam = (
                    kappa ** (3 * k)
                    * sing.h1
                    * dfact
                    / ((2 * rho) ** k * factorial(k) * mp.gamma(k - mp.mpf(1) / 2))
                )
                alpha = Fraction(2 * k - 3, 2)
        else:
            raise ContractViolation(f"unknown family kind {family.kind!r}")
        rho_inv = 1 / rho
        residuals["rho_product"] = abs(rho * rho_inv - 1)
        # n = 2m turns Lambda * n^alpha * 2^n into (Lambda 2^alpha) m^alpha 4^m
        per_m = lam * mp.mpf(2) ** _mpf_frac(alpha) if family.kind == "matching" else None
        return AsymptoticEstimate(
            family=family.tag,
            k=k,
            Lambda=lam,
            alpha=alpha,
            rho=rho,
            rho_inverse=rho_inv,
            period=period,
            provenance=provenance,
            residuals=residuals,
            precision=dps,
            lambda_per_m=per_m,
        )


def matching_block_lambda(k: int, precision: int | None = None) -> mp.mpf:
    """Leading constant when matchings are sized by chord count m.

    [x^{2m}] of the k-crossing matching series behaves like
    Lambda_m * m^{k-3/2} * 4^m; this is Lambda_m, equal to the per-vertex
    constant times 2^{k-3/2}.
    """
    if k < 0:
        raise ContractViolation("crossing count must be nonnegative")
    dps = _resolve_dps(precision)
    with mp.workdps(dps + _GUARD_DPS):
        if k == 0:
            return 1 / mp.sqrt(mp.pi)
        return mp.mpf(_double_factorial(2 * k - 3)) / (
            mp.mpf(2) ** (k - 1) * factorial(k) * mp.gamma(k - mp.mpf(1) / 2)
        )


# ---------------------------------------------------------------------------
# Size-restricted partitions: constants


def _as_sizeset(S: SizeSet | Family | object) -> SizeSet:
    if isinstance(S, SizeSet):
        return S
    if isinstance(S, Family):
        if S.sizes is None:
            return SizeSet.all_sizes()
        return S.sizes
    try:
        return SizeSet.of(*sorted(set(int(s) for s in S)))  # type: ignore[arg-type]
    except TypeError:
        raise ContractViolation(f"cannot interpret {S!r} as a size set") from None


def restricted_partition_constants(
    S: SizeSet | object, precision: int | None = None
) -> RestrictedConstants:
    """Singularity constants for partitions with block sizes in S.

    tau solves sum over s in S of (s-1) tau^s = 1 in (0, 1]; then
    rho = tau / (1 + sum tau^s), alpha = tau/rho, and beta is the
    square-root coefficient sqrt(2 B^3 / C) with B = sum s tau^s and
    C = sum s(s-1) tau^s.  Sums over infinite ultimately periodic S are
    closed rational functions of tau, so the bisection stage is exact.
    """
    sizes = _as_sizeset(S)
    if sizes.is_finite and not any(s >= 2 for s in sizes.finite):
        raise ContractViolation("size set needs an element >= 2 to cross")
    dps = _resolve_dps(precision)

    def defect(t: Fraction) -> Fraction:
        return sizes.power_sum(t, 1) - sizes.power_sum(t, 0) - 1

    with mp.workdps(dps + _GUARD_DPS):
        if sizes.is_finite and sum(s - 1 for s in sizes.finite) == 1:
            # only S = {2} (with optional 1s): tau = 1 exactly
            lo = hi = Fraction(1)
        else:
            hi = Fraction(1)
            if not sizes.is_finite:
                # stay inside the unit radius of the periodic sums
                hi = Fraction(1, 2)
                while defect(hi) < 0:
                    hi = (hi + 1) / 2
            lo, hi = _bisect_exact(
                defect, Fraction(1, 10**6), hi, Fraction(1, 10**13)
            )
        tau = (mp.mpf(lo.numerator) / lo.denominator + mp.mpf(hi.numerator) / hi.denominator) / 2
        # Newton on the defining equation; derivative is C(tau)/tau
        for _ in range(100):
            g = sizes.power_sum(tau, 1) - sizes.power_sum(tau, 0) - 1
            dg = (sizes.power_sum(tau, 2) - sizes.power_sum(tau, 1)) / tau
            step = g / dg
            tau -= step
            if abs(step) < mp.mpf(10) ** (-(dps + 5)):
                break
        A = sizes.power_sum(tau, 0)
        B = sizes.power_sum(tau, 1)
        C = sizes.power_sum(tau, 2) - B
        alpha = 1 + A
        rho = tau / alpha
        beta = mp.sqrt(2 * B**3 / C)
        residuals = {
            "defining": abs(B - A - 1),
            "rho": abs(rho * B - tau),
            "interval": mp.mpf(float(hi - lo)),
        }
        return RestrictedConstants(
            sizes=sizes,
            tau=tau,
            rho=rho,
            alpha=alpha,
            beta=beta,
            residuals=residuals,
            precision=dps,
            kind="partition",
        )


def _reevaluate_restricted(rc: RestrictedConstants) -> dict[str, mp.mpf]:
    with mp.workdps(rc.precision + _GUARD_DPS):
        if rc.kind == "partition":
            A = rc.sizes.power_sum(rc.tau, 0)
            B = rc.sizes.power_sum(rc.tau, 1)
            C = rc.sizes.power_sum(rc.tau, 2) - B
            return {
                "defining": abs(B - A - 1),
                "rho": abs(rc.rho * B - rc.tau),
                "alpha": abs(rc.alpha - 1 - A),
                "beta": abs(rc.beta - mp.sqrt(2 * B**3 / C)),
            }
        G = _hyperchord_system(rc.sizes)
        c = rc.alpha - 1
        crit = (1 + c) * G.dy()(rc.tau, c) + rc.tau * G.dx()(rc.tau, c)
        return {
            "system": abs(G(rc.tau, c)),
            "critical": abs(crit),
            "rho": abs(rc.rho * (1 + c) - rc.tau),
        }


# ---------------------------------------------------------------------------
# Size-restricted partitions: core enumeration and asymptotics


def _pair_crossing_values(s: int, t: int) -> tuple[int, int]:
    """(min positive, max) crossings of two disjoint blocks of sizes s, t."""
    best_min, best_max = None, 0
    n = s + t
    for posA in itertools.combinations(range(1, n + 1), s):
        A = list(posA)
        B = [v for v in range(1, n + 1) if v not in posA]
        c = blocks_cross_count(A, B)
        if c > 0 and (best_min is None or c < best_min):
            best_min = c
        best_max = max(best_max, c)
    if best_min is None:
        raise ContractViolation(f"blocks of sizes {s},{t} can never cross")
    return best_min, best_max


_PAIR_CROSSINGS: dict[tuple[int, int], tuple[int, int]] = {}


def _pair_crossings(s: int, t: int) -> tuple[int, int]:
    key = (min(s, t), max(s, t))
    if key not in _PAIR_CROSSINGS:
        _PAIR_CROSSINGS[key] = _pair_crossing_values(*key)
    return _PAIR_CROSSINGS[key]


def _partitions_with_sizes(
    verts: tuple[int, ...], sizes: tuple[int, ...]
) -> Iterator[tuple[frozenset[int], ...]]:
    """Set partitions of ``verts`` with the given multiset of block sizes."""
    if not verts:
        yield ()
        return
    anchor, rest = verts[0], verts[1:]
    seen: set[int] = set()
    for idx, s in enumerate(sizes):
        if s in seen:
            continue
        seen.add(s)
        remaining = sizes[:idx] + sizes[idx + 1 :]
        for members in itertools.combinations(rest, s - 1):
            block = frozenset((anchor,) + members)
            leftover = tuple(v for v in rest if v not in block)
            for tail in _partitions_with_sizes(leftover, remaining):
                yield (block,) + tail


_CORE_SCAN_BUDGET = 5_000_000


def _restricted_partition_cores(sizes: SizeSet, k: int) -> list[ChordSystem]:
    """All labeled k-cores whose block sizes lie in ``sizes``.

    A core block has 2..k+3 vertices and a core has at most 2k blocks;
    within that box, size multisets are pruned by the attainable range of
    pairwise crossings before any set partition is generated.
    """
    allowed = [s for s in sizes.elements_up_to(k + 3) if s >= 2]
    if not allowed:
        return []
    fam = Family.partition(sizes)
    c_min = {s: min(_pair_crossings(s, t)[0] for t in allowed) for s in allowed}
    c_max = {
        (s, t): _pair_crossings(s, t)[1] for s in allowed for t in allowed if s <= t
    }
    candidates: list[tuple[int, ...]] = []
    budget = 0
    for m in range(2, 2 * k + 1):
        for multi in itertools.combinations_with_replacement(allowed, m):
            # every block needs c_min incident crossings, each shared by two
            lb = -(-sum(c_min[s] for s in multi) // 2)
            ub = sum(
                c_max[(min(a, b), max(a, b))]
                for a, b in itertools.combinations(multi, 2)
            )
            if lb > k or ub < k:
                continue
            n = sum(multi)
            count = factorial(n)
            for s in multi:
                count //= factorial(s)
            for mult in {s: multi.count(s) for s in multi}.values():
                count //= factorial(mult)
            budget += count
            candidates.append(multi)
    if budget > _CORE_SCAN_BUDGET:
        raise ResourceBoundExceeded(
            f"restricted core scan would visit {budget} partitions "
            f"(budget {_CORE_SCAN_BUDGET})"
        )
    out: list[ChordSystem] = []
    for multi in candidates:
        n = sum(multi)
        verts = tuple(range(1, n + 1))
        for blocks in _partitions_with_sizes(verts, multi):
            sorted_blocks = [sorted(b) for b in blocks]
            total = 0
            covered = [False] * len(blocks)
            for i in range(len(blocks)):
                for j in range(i + 1, len(blocks)):
                    c = blocks_cross_count(sorted_blocks[i], sorted_blocks[j])
                    if c:
                        covered[i] = covered[j] = True
                        total += c
                if total > k:
                    break
            if total == k and all(covered):
                out.append(ChordSystem(n, list(blocks), fam))
    return out


def restricted_partition_asymptotics(
    S: SizeSet | object, k: int, precision: int | None = None
) -> AsymptoticEstimate:
    """Leading estimate for partitions with k crossings, sizes in S.

    The exponent is half the maximal potential over the family's k-cores
    (-1/2 when the maximum is 0, -3/2 at k = 0); the constant sums the
    singular contribution of each maximizing core.  Support is n ≡ 0
    modulo gcd(S).
    """
    sizes = _as_sizeset(S)
    if k < 0:
        raise ContractViolation("crossing count must be nonnegative")
    dps = _resolve_dps(precision)
    consts = restricted_partition_constants(sizes, dps)
    g = sizes.gcd()
    with mp.workdps(dps + _GUARD_DPS):
        tau, rho, beta = consts.tau, consts.rho, consts.beta
        if k == 0:
            lam, alpha = g * beta / (2 * mp.sqrt(mp.pi)), Fraction(-3, 2)
        else:
            if sizes.is_finite and sizes.finite == (2,):
                cores = enumerate_cores(MATCHING, k)
            else:
                cores = _restricted_partition_cores(sizes, k)
            if not cores:
                raise ContractViolation(f"no cores for sizes {sizes} at k={k}")
            profs = [enumeration._core_profile(core) for core in cores]
            phis = [potential(p) for p in profs]
            phi_max = max(phis)
            maxi = [p for p, phi in zip(profs, phis) if phi == phi_max]
            if phi_max >= 1:
                total = mp.mpf(0)
                for prof in maxi:
                    n1 = prof.count(1, 0)
                    nK = sum(i * c for (i, _), c in prof.counts)
                    term = tau**n1 / nK
                    for (i, _), c in prof.counts:
                        if i > 1:
                            f = (
                                rho**i
                                * beta
                                * _double_factorial(2 * i - 5)
                                / (mp.mpf(2) ** (i - 1) * factorial(i - 1))
                            )
                            term *= f**c
                    total += term
                lam = g * total / mp.gamma(mp.mpf(phi_max) / 2)
                alpha = Fraction(phi_max, 2)
            else:
                total = mp.mpf(0)
                for prof in maxi:
                    n1 = prof.count(1, 0)
                    nK = sum(i * c for (i, _), c in prof.counts)
                    total += n1 * tau ** (n1 - 1) / nK
                lam = g * total * rho * beta / (2 * mp.sqrt(mp.pi))
                alpha = Fraction(-1, 2)
        rho_inv = 1 / rho
        residuals = dict(consts.residuals)
        residuals["rho_product"] = abs(rho * rho_inv - 1)
        return AsymptoticEstimate(
            family=Family.partition(sizes).tag,
            k=k,
            Lambda=lam,
            alpha=alpha,
            rho=rho,
            rho_inverse=rho_inv,
            period=g,
            provenance="polynomial-root",
            residuals=residuals,
            precision=dps,
        )


# ---------------------------------------------------------------------------
# Hyperchord constants


# Defining quartic of the crossing-free hyperchord singularity and the
# cubic satisfied by the series value z = H0(x).
_H_QUARTIC = [5, -336, 736, -768, 256]  # ascending powers of x
_H_CUBIC = _Poly2(
    {
        (0, 3): -1,
        (2, 2): 8,
        (1, 2): -2,
        (0, 2): 3,
        (3, 1): -32,
        (2, 1): 8,
        (1, 1): 4,
        (0, 1): -3,
        (2, 0): -16,
        (1, 0): -2,
        (0, 0): 1,
    }
)


def _eval_quartic(x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(_H_QUARTIC):
        total = total * x + c
    return total


def _hyperchord_system(sizes: SizeSet) -> _Poly2:
    """Algebraic equation G(x, C) = 0 of the connected series, sizes in S."""
    C2 = _Y * _Y + _Y - _X  # C^2 + C - x
    if sizes.is_finite and len(sizes.finite) == 1:
        q = sizes.finite[0]
        if q == 2:
            # connected chord diagrams: C^3 + C^2 - 3xC + 2x^2
            return _Poly2({(0, 3): 1, (0, 2): 1, (1, 1): -3, (2, 0): 2})
        if q >= 3:
            return (_Y - _X) * _X.pow(q - 1) - _Y * C2.pow(q - 1)
    if not sizes.is_finite and sizes.base == (sizes.period,) and not sizes.finite:
        q = sizes.period
        if q == 2:
            raise ContractViolation("even-size hyperchords not supported")
        if q >= 3:
            P = (
                _Poly2({(0, 5): 1, (0, 4): 2, (0, 3): 1})
                + _Poly2({(1, 4): -1, (1, 3): -3, (1, 2): -2})
                + _Poly2({(2, 2): 2, (2, 1): 2, (3, 0): -1})
            )
            return (_Y - _X) * _X.pow(q) - C2.pow(q - 2) * P
    raise ContractViolation(f"no connected functional system for sizes {sizes}")


def hyperchord_constants(
    S: SizeSet | object | None = None,
    N: int = 400,
    precision: int | None = None,
) -> HyperchordSingularity | RestrictedConstants:
    """Singularity data for hyperchord families.

    Without S: the unrestricted crossing-free series.  Its singularity is
    the smallest positive root of an integer quartic, isolated by exact
    rational bisection; the value h0 is the double root of the
    accompanying cubic there and h1 the square-root coefficient.

    With S: constants (tau, rho, alpha, beta) of the size-restricted
    family.  The connected series truncated at order N seeds the critical
    equation tau C'(tau) = 1 + C(tau); the pair (tau, C(tau)) is then
    refined on the exact algebraic system of the connected series, since
    the truncated equation alone converges too slowly in N for the target
    digits.  The gap between seed and refined value is reported as the
    ``seed_gap`` residual.
    """
    dps = _resolve_dps(precision)
    if S is None:
        return _hyperchord_unrestricted(dps)
    sizes = _as_sizeset(S)
    with mp.workdps(dps + _GUARD_DPS):
        G = _hyperchord_system(sizes)
        series = connected_series(Family.hyperchord(sizes), N)
        coeffs = [
            mp.mpf(c.numerator) / c.denominator
            for c in (series.coeff(i) for i in range(N + 1))
        ]

        def g_trunc(t: mp.mpf) -> mp.mpf:
            val, der = mp.mpf(0), mp.mpf(0)
            for c in reversed(coeffs):
                der = der * t + val
                val = val * t + c
            return t * der - val - 1

        lo = None
        prev_t, prev_g = None, None
        min_abs = mp.inf
        for j in range(1, 400):
            t = mp.mpf(j) / 400
            gt = g_trunc(t)
            min_abs = min(min_abs, abs(gt))
            if prev_g is not None and prev_g < 0 <= gt:
                lo, hi = prev_t, t
                break
            prev_t, prev_g = t, gt
        else:
            raise ChordError(
                f"truncation order {N} too small to bracket the critical "
                f"point (min residual {mp.nstr(min_abs, 6)})"
            )
        for _ in range(60):
            mid = (lo + hi) / 2
            if g_trunc(mid) < 0:
                lo = mid
            else:
                hi = mid
        tau_seed = (lo + hi) / 2
        c_seed = mp.polyval(list(reversed(coeffs)), tau_seed)
        F2 = (_ONE + _Y) * G.dy() + _X * G.dx()
        try:
            tau, c = _newton2(G, F2, tau_seed, c_seed, mp.mpf(10) ** (-(dps + 5)))
        except ChordError:
            raise ChordError(
                f"truncation order {N} seeds too far from the critical point "
                f"(system residual at seed {mp.nstr(abs(G(tau_seed, c_seed)), 6)}); "
                f"increase N"
            ) from None
        if not (0 < tau and 0 < c):
            raise ChordError("Newton refinement left the positive quadrant")
        Gx, Gy = G.dx(), G.dy()
        C1 = (1 + c) / tau
        C1_implicit = -Gx(tau, c) / Gy(tau, c)
        C2v = -(
            G.dx().dx()(tau, c)
            + 2 * G.dx().dy()(tau, c) * C1
            + G.dy().dy()(tau, c) * C1**2
        ) / Gy(tau, c)
        if C2v <= 0:
            raise ChordError("second derivative not positive at the critical point")
        alpha = 1 + c
        rho = tau / alpha
        beta = alpha ** mp.mpf("1.5") * mp.sqrt(2) / (tau * mp.sqrt(C2v))
        residuals = {
            "system": abs(G(tau, c)),
            "critical": abs(F2(tau, c)),
            "inverse": abs(C1 - C1_implicit),
            "seed_gap": abs(tau - tau_seed),
        }
        return RestrictedConstants(
            sizes=sizes,
            tau=tau,
            rho=rho,
            alpha=alpha,
            beta=beta,
            residuals=residuals,
            precision=dps,
            kind="hyperchord",
        )


def _hyperchord_unrestricted(dps: int) -> HyperchordSingularity:
    with mp.workdps(dps + _GUARD_DPS):
        lo, hi = _bisect_exact(
            _eval_quartic, Fraction(0), Fraction(1, 10), Fraction(1, 10**13)
        )
        rho = (mp.mpf(lo.numerator) / lo.denominator + mp.mpf(hi.numerator) / hi.denominator) / 2
        quartic = [mp.mpf(c) for c in reversed(_H_QUARTIC)]
        for _ in range(100):
            val = mp.polyval(quartic, rho)
            der = mp.polyval([4 * 256, 3 * -768, 2 * 736, -336], rho)
            step = val / der
            rho -= step
            if abs(step) < mp.mpf(10) ** (-(dps + 5)):
                break
        P, Pz = _H_CUBIC, _H_CUBIC.dy()
        # h0 is the double root: a root of the quadratic dP/dz minimizing |P|
        a = sum(v * rho**i for (i, j), v in Pz.c.items() if j == 2)
        b = sum(v * rho**i for (i, j), v in Pz.c.items() if j == 1)
        cc = sum(v * rho**i for (i, j), v in Pz.c.items() if j == 0)
        disc = mp.sqrt(b**2 - 4 * a * cc)
        roots = [(-b + disc) / (2 * a), (-b - disc) / (2 * a)]
        h0 = min(roots, key=lambda z: abs(P(rho, z)))
        Px = P.dx()(rho, h0)
        Pzz = P.dy().dy()(rho, h0)
        h1 = mp.sqrt(2 * rho * Px / Pzz)
        residuals = {
            "R": abs(mp.polyval(quartic, rho)),
            "P": abs(P(rho, h0)),
            "P_z": abs(Pz(rho, h0)),
            "interval": mp.mpf(float(hi - lo)),
        }
        return HyperchordSingularity(
            rho=rho,
            h0=h0,
            h1=h1,
            interval=(lo, hi),
            residuals=residuals,
            precision=dps,
        )


# ---------------------------------------------------------------------------
# Block count laws (crossing-free families)


# Singularity curves in (x, y), y marking blocks:
#   partitions: (xy - x - 1)^2 - 4x
#   diagrams:   discriminant of the quadratic for the crossing-free series
_PARTITION_CURVE = _Poly2(
    {(2, 2): 1, (2, 1): -2, (1, 1): -2, (2, 0): 1, (1, 0): -2, (0, 0): 1}
)


def _diagram_curve() -> _Poly2:
    B = _X * _X * (_ONE + _Y) - _X * (_ONE + _Y.scale(2)) - _Y.scale(2)
    return B * B - (_Y * (_X * (_ONE + _Y.scale(2)) + _Y)).scale(4)


# R(x, y): ascending y coefficients for each power of x; R(x, 1) is four
# times the unrestricted quartic above.
_H_CURVE_ROWS = [
    [1, 4, 10, 4, 1],
    [-6, -40, -142, -304, -390, -296, -130, -32, -4],
    [13, 100, 360, 748, 922, 636, 192, -12, -15],
    [-12, -96, -336, -672, -840, -672, -336, -96, -12],
    [4, 32, 112, 224, 280, 224, 112, 32, 4],
]
_H_CURVE = _Poly2(
    {
        (i, j): c
        for i, row in enumerate(_H_CURVE_ROWS)
        for j, c in enumerate(row)
    }
)


def _implicit_block_law(curve: _Poly2, x0, y0=1):
    """(mu, sigma2) from the singularity curve via implicit differentiation."""
    Fx, Fy = curve.dx(), curve.dy()
    Fxx, Fxy, Fyy = Fx.dx(), Fx.dy(), Fy.dy()
    rp = -Fy(x0, y0) / Fx(x0, y0)
    rpp = -(Fxx(x0, y0) * rp**2 + 2 * Fxy(x0, y0) * rp + Fyy(x0, y0)) / Fx(x0, y0)
    mu = -rp / x0
    sigma2 = -rpp / x0 - rp / x0 + (rp / x0) ** 2
    return mu, sigma2


def block_law_constants(family: Family, precision: int | None = None) -> BlockLaw:
    """Per-vertex mean and variance of the block count at y = 1.

    Partitions come out exact-rational (1/2, 1/8); diagrams match the
    radical forms 1/2 + sqrt(2)/2 and 1/4 + sqrt(2)/8; hyperchords are
    numeric from their bivariate singularity curve.
    """
    dps = _resolve_dps(precision)
    if family.sizes is not None:
        raise ContractViolation("block laws cover the unrestricted families")
    if family.kind == "partition":
        mu, sigma2 = _implicit_block_law(_PARTITION_CURVE, Fraction(1, 4), Fraction(1))
        return BlockLaw(family.tag, mu, sigma2, True, {}, dps)
    with mp.workdps(dps + _GUARD_DPS):
        if family.kind == "diagram":
            curve = _diagram_curve()
            rho, _, _ = _diagram_radicals()
            mu, sigma2 = _implicit_block_law(curve, rho, mp.mpf(1))
            s2 = mp.sqrt(2)
            residuals = {
                "curve": abs(curve(rho, mp.mpf(1))),
                "mu": abs(mu - (mp.mpf(1) / 2 + s2 / 2)),
                "sigma2": abs(sigma2 - (mp.mpf(1) / 4 + s2 / 8)),
            }
            return BlockLaw(family.tag, mu, sigma2, False, residuals, dps)
        if family.kind == "hyperchord":
            sing = _hyperchord_unrestricted(dps)
            mu, sigma2 = _implicit_block_law(_H_CURVE, sing.rho, mp.mpf(1))
            residuals = {"curve": abs(_H_CURVE(sing.rho, mp.mpf(1)))}
            return BlockLaw(family.tag, mu, sigma2, False, residuals, dps)
    raise ContractViolation(f"no block law for family {family.tag}")


# ---------------------------------------------------------------------------
# Empirical corroboration


def empirical_ratio_check(
    family: Family,
    k: int,
    m_max: int = 200,
    precision: int | None = None,
) -> RatioReport:
    """Ratios a_n / estimate along a grid, for families with closed-form a_n.

    Supports matchings at k = 1 (coefficient binom(2m, m-2) at n = 2m)
    and partitions at k = 0 (Catalan numbers).  The grid runs in steps of
    20 up to m_max.
    """
    dps = _resolve_dps(precision)
    if m_max < 40:
        raise ContractViolation("ratio grid needs m_max >= 40")
    with mp.workdps(dps + _GUARD_DPS):
        if family.kind == "matching" and k == 1:
            est = closed_form_asymptotics(MATCHING, 1, dps)
            points = []
            for m in range(20, m_max + 1, 20):
                a = comb(2 * m, m - 2)
                points.append((m, a / est.value(2 * m)))
        elif family.kind == "partition" and k == 0:
            est = closed_form_asymptotics(PARTITION, 0, dps)
            points = []
            for n in range(20, m_max + 1, 20):
                cat = comb(2 * n, n) // (n + 1)
                points.append((n, cat / est.value(n)))
        else:
            raise ContractViolation(
                "closed-form coefficients available for matching k=1 and "
                "partition k=0 only"
            )
        gaps = [abs(r - 1) for _, r in points]
        monotone = all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
        return RatioReport(
            family=family.tag,
            k=k,
            points=tuple(points),
            monotone=monotone,
            final_gap=gaps[-1],
        )
