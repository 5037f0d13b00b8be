"""Exact power-series arithmetic and algebraic-equation solving.

Everything downstream reduces to truncated power series in x whose
coefficients live in an exact ring: rationals for single-variable counts,
polynomials in the block-marking variable y for refined counts.  mpmath
floats are also accepted for numeric work; the solver then checks
residuals against a tolerance instead of demanding exact zeros.

The central tool is `solve_implicit`: given Phi(x, F) polynomial in F
with polynomial coefficients in x and enough initial terms of F, it
extracts one coefficient of F per step from the lowest unresolved order
of the residual, updating powers of F incrementally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .chords_core import ContractViolation, Family, SizeSet

__all__ = [
    "YPoly",
    "TruncatedSeries",
    "FPoly",
    "solve_implicit",
    "crossing_free_series",
    "connected_series",
    "marked_transform",
    "marked_transform_diagram",
    "series_coefficients_json",
    "series_coefficients_from_json",
]


_ZERO = Fraction(0)


def _is_zero(a) -> bool:
    if isinstance(a, YPoly):
        return not a.coeffs
    return a == 0


class YPoly:
    """Polynomial in y with Fraction coefficients, ascending powers."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):  # trailing zeros stripped
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c) -> "YPoly":
        return cls((c,))

    @classmethod
    def y_power(cls, j: int, c=1) -> "YPoly":
        return cls((0,) * j + (c,))

    @classmethod
    def coerce(cls, v) -> "YPoly":
        if isinstance(v, YPoly):
            return v
        return cls((v,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, YPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == YPoly.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        o = YPoly.coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return YPoly(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (o.coeffs[i] if i < len(o.coeffs) else 0)
                for i in range(n)
            ]
        )

    __radd__ = __add__

    def __neg__(self):
        return YPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-YPoly.coerce(other))

    def __rsub__(self, other):
        return YPoly.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return YPoly([c * other for c in self.coeffs])
        o = YPoly.coerce(other)
        if not self.coeffs or not o.coeffs:
            return YPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return YPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = YPoly((1,))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def div_exact(self, divisor) -> "YPoly":
        """Polynomial division that must leave no remainder."""
        if isinstance(divisor, (int, Fraction)):
            if divisor == 0:
                raise ZeroDivisionError
            return YPoly([c / divisor for c in self.coeffs])
        d = YPoly.coerce(divisor)
        if not d.coeffs:
            raise ZeroDivisionError
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(d.coeffs) + 1, 0)
        lead = d.coeffs[-1]
        for i in range(len(rem) - 1, len(d.coeffs) - 2, -1):
            f = rem[i] / lead
            q[i - (len(d.coeffs) - 1)] = f
            if f:
                for j, c in enumerate(d.coeffs):
                    rem[i - (len(d.coeffs) - 1) + j] -= f * c
        if any(rem):
            raise ContractViolation("inexact polynomial division")
        return YPoly(q)

    def __call__(self, y):
        out = 0
        for c in reversed(self.coeffs):
            out = out * y + c
        return out

    def coeff(self, j: int) -> Fraction:
        return self.coeffs[j] if j < len(self.coeffs) else Fraction(0)

    def deriv(self) -> "YPoly":
        return YPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            if j == 0:
                parts.append(str(c))
            else:
                yname = "y" if j == 1 else f"y^{j}"
                parts.append(yname if c == 1 else f"{c}*{yname}")
        return " + ".join(parts)

    __repr__ = __str__


def _div(a, u, tol=None):
    """a / u in whatever ring the operands live in."""
    if isinstance(a, YPoly) or isinstance(u, YPoly):
        return YPoly.coerce(a).div_exact(u)
    return a / u


class TruncatedSeries:
    """Power series in x truncated after x^order.

    Coefficients may be Fractions, YPoly values, or mpmath floats;
    zero entries are stored as Fraction(0) regardless of the ring.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        cs = list(coeffs)
        if order is None:
            order = len(cs) - 1
        if len(cs) < order + 1:
            cs += [_ZERO] * (order + 1 - len(cs))
        else:
            cs = cs[: order + 1]
        self.coeffs = cs
        self.order = order

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls([Fraction(1)], order)

    @classmethod
    def x_power(cls, k: int, order: int, c=Fraction(1)) -> "TruncatedSeries":
        cs = [_ZERO] * (order + 1)
        if k <= order:
            cs[k] = c
        return cls(cs, order)

    def coeff(self, n: int):
        if n > self.order:
            raise ContractViolation(f"coefficient {n} beyond truncation {self.order}")
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs[: order + 1], order)

    def pad(self, order: int) -> "TruncatedSeries":
        """Extend with zeros; valid only when the tail is known to vanish
        (polynomials)."""
        if order < self.order:
            return self.truncate(order)
        return TruncatedSeries(self.coeffs + [_ZERO] * (order - self.order), order)

    def valuation(self) -> int | None:
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return i
        return None

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries([other], self.order)
        n = min(self.order, other.order)
        return TruncatedSeries(
            [self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], n
        )

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries([other], self.order)
        n = min(self.order, other.order)
        return TruncatedSeries(
            [self.coeffs[i] - other.coeffs[i] for i in range(n + 1)], n
        )

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def scale(self, c) -> "TruncatedSeries":
        return TruncatedSeries([c * v for v in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        n = min(self.order, other.order)
        out = [_ZERO] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if _is_zero(a):
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if not _is_zero(b):
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries(out, n)

    def __pow__(self, k: int) -> "TruncatedSeries":
        out = TruncatedSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift_up(self, k: int) -> "TruncatedSeries":
        """Multiply by x^k, keeping the truncation order."""
        return TruncatedSeries([_ZERO] * k + self.coeffs, self.order)

    def shift_down(self, k: int) -> "TruncatedSeries":
        """Divide by x^k; the k lowest coefficients must vanish."""
        for i in range(min(k, self.order + 1)):
            if not _is_zero(self.coeffs[i]):
                raise ContractViolation(f"series not divisible by x^{k}")
        return TruncatedSeries(self.coeffs[k:], self.order - k)

    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries(
            [i * self.coeffs[i] for i in range(1, self.order + 1)], self.order - 1
        )

    def x_dx(self) -> "TruncatedSeries":
        return TruncatedSeries(
            [i * self.coeffs[i] for i in range(self.order + 1)], self.order
        )

    def inverse(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if _is_zero(c0):
            raise ContractViolation("no series inverse: zero constant term")
        inv0 = _div(Fraction(1), c0) if isinstance(c0, YPoly) else 1 / c0
        out = [inv0] + [_ZERO] * self.order
        for n in range(1, self.order + 1):
            acc = _ZERO
            for i in range(1, n + 1):
                if not _is_zero(self.coeffs[i]):
                    acc = acc + self.coeffs[i] * out[n - i]
            out[n] = -(acc * inv0) if not _is_zero(acc) else _ZERO
        return TruncatedSeries(out, self.order)

    def compose(self, g: "TruncatedSeries") -> "TruncatedSeries":
        """Substitute x -> g(x); g must have zero constant term."""
        if not _is_zero(g.coeffs[0]):
            raise ContractViolation("composition needs valuation >= 1")
        n = min(self.order, g.order)
        out = TruncatedSeries([self.coeffs[n]], n).pad(n)
        for i in range(n - 1, -1, -1):
            out = out * g + TruncatedSeries([self.coeffs[i]], n).pad(n)
        return out

    def map_coeffs(self, f: Callable) -> "TruncatedSeries":
        return TruncatedSeries([f(c) for c in self.coeffs], self.order)

    def eval_y(self, y) -> "TruncatedSeries":
        """Collapse YPoly coefficients at a numeric y."""
        return self.map_coeffs(lambda c: c(y) if isinstance(c, YPoly) else c)

    def __call__(self, x):
        """Horner evaluation of the truncated polynomial at numeric x."""
        out = 0
        for c in reversed(self.coeffs):
            v = c if not isinstance(c, YPoly) else c
            out = out * x + (v if not isinstance(v, Fraction) or v else 0)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return all(
            _is_zero(self.coeffs[i] - other.coeffs[i]) for i in range(n + 1)
        ) and self.order == other.order

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            cs = f"({c})" if isinstance(c, YPoly) and len(c.coeffs) > 1 else str(c)
            if i == 0:
                parts.append(cs)
            else:
                xn = "x" if i == 1 else f"x^{i}"
                parts.append(xn if cs == "1" else f"{cs}*{xn}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


@dataclass
class FPoly:
    """Polynomial in an unknown series F, coefficients truncated series.

    Represents Phi(x, F) = sum_b phi[b] * F^b.  All equations handled here
    have coefficients that are genuine polynomials in x, so padding the
    phi[b] with zeros to a larger order is always valid.
    """

    phi: list[TruncatedSeries]

    def padded(self, order: int) -> list[TruncatedSeries]:
        return [p.pad(order) for p in self.phi]

    def __add__(self, other: "FPoly") -> "FPoly":
        n = max(len(self.phi), len(other.phi))
        order = max(p.order for p in self.phi + other.phi)
        z = TruncatedSeries.zero(order)
        a = self.padded(order) + [z] * (n - len(self.phi))
        b = other.padded(order) + [z] * (n - len(other.phi))
        return FPoly([a[i] + b[i] for i in range(n)])

    def __mul__(self, other: "FPoly") -> "FPoly":
        order = max(p.order for p in self.phi + other.phi)
        a, b = self.padded(order), other.padded(order)
        out = [TruncatedSeries.zero(order) for _ in range(len(a) + len(b) - 1)]
        for i, p in enumerate(a):
            if all(_is_zero(c) for c in p.coeffs):
                continue
            for j, q in enumerate(b):
                out[i + j] = out[i + j] + p * q
        return FPoly(out)

    def __pow__(self, k: int) -> "FPoly":
        order = max(p.order for p in self.phi)
        out = FPoly([TruncatedSeries.one(order)])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "FPoly":
        return FPoly([p.scale(c) for p in self.phi])

    @classmethod
    def const(cls, s: TruncatedSeries) -> "FPoly":
        return cls([s])

    @classmethod
    def F(cls, order: int) -> "FPoly":
        return cls([TruncatedSeries.zero(order), TruncatedSeries.one(order)])

    def shift(self, c0) -> "FPoly":
        """Rewrite Phi(x, F) with F = c0 + x*G as a polynomial in G."""
        order = max(p.order for p in self.phi)
        B = len(self.phi) - 1
        phi = self.padded(order)
        psi = []
        for b in range(B + 1):
            acc = TruncatedSeries.zero(order)
            for c in range(b, B + 1):
                if _is_zero(c0) and c != b:
                    continue
                w = comb(c, b) * (YPoly.coerce(c0) ** (c - b) if isinstance(c0, YPoly) else c0 ** (c - b)) if c != b else comb(c, b)
                acc = acc + phi[c].scale(w)
            psi.append(acc.shift_up(b))
        return FPoly(psi)

    def reduce_common_power(self) -> tuple["FPoly", int]:
        """Divide every coefficient by the largest common power of x."""
        vals = [p.valuation() for p in self.phi]
        vals = [v for v in vals if v is not None]
        if not vals:
            raise ContractViolation("zero equation")
        v = min(vals)
        return FPoly([p.shift_down(v).pad(p.order) for p in self.phi]), v


def solve_implicit(
    eq: FPoly,
    seeds: Sequence,
    order: int,
    *,
    tol=None,
) -> TruncatedSeries:
    """Unique series solution of Phi(x, F) = 0 with the given initial terms.

    The derivative of Phi with respect to F, at the seeded prefix, must
    have a unit lowest coefficient; each later coefficient of F is then
    determined linearly.  The full residual is checked to vanish through
    the working order (within tol when tol is given).
    """

    def is_small(v) -> bool:
        if _is_zero(v):
            return True
        if tol is None:
            return False
        if isinstance(v, YPoly):
            return all(abs(float(c)) < tol for c in v.coeffs)
        return abs(float(v) if isinstance(v, Fraction) else v) < tol

    B = len(eq.phi) - 1
    s = len(seeds)
    if s < 1:
        raise ContractViolation("need at least one seed coefficient")

    # the valuation e of dPhi/dF at the seeded prefix, from a cheap probe
    probe_order = max(order, 8)
    phi_probe = [p.pad(probe_order) for p in eq.phi]
    F_probe = TruncatedSeries(list(seeds), probe_order)
    dphi = TruncatedSeries.zero(probe_order)
    for b in range(1, B + 1):
        dphi = dphi + phi_probe[b].scale(b) * F_probe ** (b - 1)
    e = dphi.valuation()
    if e is None:
        raise ContractViolation("degenerate equation: dPhi/dF = 0")

    W = order + e
    phi = [p.pad(W) for p in eq.phi]
    F = TruncatedSeries(list(seeds), W)
    P = [TruncatedSeries.one(W)]
    for b in range(1, B + 1):
        P.append(P[-1] * F)

    dphi = TruncatedSeries.zero(W)
    for b in range(1, B + 1):
        dphi = dphi + phi[b].scale(b) * P[b - 1]
    for i in range(e):
        if not is_small(dphi.coeffs[i]):
            raise ContractViolation("unstable unit in dPhi/dF")
    u = dphi.coeffs[e]

    if B >= 2:
        d2 = TruncatedSeries.zero(W)
        for b in range(2, B + 1):
            d2 = d2 + phi[b].scale(b * (b - 1)) * P[b - 2]
        v2 = d2.valuation()
        if v2 is not None and not s > e - v2:
            raise ContractViolation("seeds insufficient for the nonlinear terms")

    R = TruncatedSeries.zero(W)
    for b in range(B + 1):
        R = R + phi[b] * P[b]
    for i in range(min(s + e, W + 1)):
        if not is_small(R.coeffs[i]):
            raise ContractViolation(f"seeds do not satisfy the equation at x^{i}")

    for n in range(s, order + 1):
        cn = -R.coeffs[n + e]
        cn = _div(cn, u, tol) if not _is_zero(cn) else _ZERO
        F.coeffs[n] = cn
        if _is_zero(cn):
            continue
        cpow = [None, cn]
        deltas: dict[int, TruncatedSeries] = {}
        for b in range(B, 0, -1):
            delta = TruncatedSeries.zero(W)
            top = min(b, W // n if n else b)
            for j in range(1, max(top, 1) + 1):
                if n * j > W:
                    break
                while len(cpow) <= j:
                    cpow.append(cpow[-1] * cn)
                delta = delta + (P[b - j].scale(comb(b, j) * cpow[j])).shift_up(n * j)
            deltas[b] = delta
        for b, delta in deltas.items():
            P[b] = P[b] + delta
            R = R + phi[b] * delta

    # recompute the residual from scratch: the incrementally maintained R
    # would mask its own drift
    Pv = TruncatedSeries.one(W)
    Rv = phi[0]
    for b in range(1, B + 1):
        Pv = Pv * F
        Rv = Rv + phi[b] * Pv
    for i in range(W + 1):
        if not is_small(Rv.coeffs[i]):
            raise ContractViolation(f"residual nonzero at x^{i} after solving")
    return F.truncate(order)


# ---------------------------------------------------------------------------
# Crossing-free series


def _ypoly_x(order: int, data: dict[int, YPoly]) -> TruncatedSeries:
    cs = [_ZERO] * (order + 1)
    for k, v in data.items():
        if k <= order:
            cs[k] = v
    return TruncatedSeries(cs, order)


def crossing_free_series(
    family: Family, order: int, *, bivariate: bool = False
) -> TruncatedSeries:
    """Configurations with zero crossings, counted by vertices (x).

    With ``bivariate`` the coefficients are polynomials in y marking
    blocks.  Matchings are single-variable only.
    """
    kind = family.kind
    if kind == "matching":
        if bivariate:
            raise ContractViolation("matching series carry no block variable")
        c = [_ZERO] * (order + 1)
        c[0] = Fraction(1)
        for n in range(2, order + 1):
            acc = Fraction(0)
            for a in range(0, n - 1):
                acc += c[a] * c[n - 2 - a]
            c[n] = acc
        return TruncatedSeries(c, order)

    if kind == "partition":
        return _partition_cf(family.sizes, order, bivariate)

    if kind == "diagram":
        return _diagram_cf(order, bivariate)

    if kind == "hyperchord":
        if family.sizes is not None:
            raise ContractViolation(
                "size-restricted hyperchords: use connected_series and numeric composition"
            )
        return _hyperchord_cf(order, bivariate)

    raise ContractViolation(f"unknown family {family.tag}")


def _partition_cf(sizes: SizeSet | None, order: int, bivariate: bool) -> TruncatedSeries:
    y = YPoly.y_power(1) if bivariate else Fraction(1)
    one = YPoly.const(1) if bivariate else Fraction(1)
    if sizes is None:
        # x*F^2 + ((y-1)*x - 1)*F + 1 = 0
        eq = FPoly(
            [
                TruncatedSeries.one(order),
                _ypoly_x(order, {0: -one, 1: y - 1}) if bivariate
                else TruncatedSeries([Fraction(-1), Fraction(0)], order),
                TruncatedSeries.x_power(1, order),
            ]
        )
        return solve_implicit(eq, [one], order)
    if sizes.is_finite:
        # F = 1 + y * sum_s x^s F^s
        B = max(sizes.finite)
        if B > order:
            B = max([s for s in sizes.finite if s <= order], default=1)
        phi = [TruncatedSeries.zero(order) for _ in range(B + 2)]
        phi[0] = TruncatedSeries.one(order)
        phi[1] = TruncatedSeries([Fraction(-1)], order)
        for s in sizes.finite:
            if s <= order and s <= B:
                phi[s] = phi[s] + TruncatedSeries.x_power(s, order, y)
        return solve_implicit(FPoly(phi), [one], order)
    if sizes.base == (sizes.period,):
        # sizes q, 2q, ...: (F - 1)(1 - (xF)^q) = y (xF)^q
        q = sizes.period
        phi = [TruncatedSeries.zero(order) for _ in range(q + 2)]
        phi[0] = TruncatedSeries([Fraction(-1)], order)
        phi[1] = TruncatedSeries.one(order)
        phi[q] = phi[q] + TruncatedSeries.x_power(q, order, one - y)
        phi[q + 1] = TruncatedSeries.x_power(q, order, -one)
        return solve_implicit(FPoly(phi), [one], order)
    raise ContractViolation(f"unsupported size set {sizes}")


def _diagram_cf(order: int, bivariate: bool) -> TruncatedSeries:
    """Chord diagrams without crossings.

    Computed through the shifted unknown H with F = 1 + x H, whose
    coefficients obey h_n = (1+y) h_{n-1} + y * sum h_a h_{n-a}.
    """
    one_y = YPoly([1, 1]) if bivariate else Fraction(2)
    y = YPoly.y_power(1) if bivariate else Fraction(1)
    h = [_ZERO] * max(order, 1)
    if order >= 1:
        h[0] = YPoly.const(1) if bivariate else Fraction(1)
    for n in range(1, order):
        acc = one_y * h[n - 1]
        for a in range(1, n):
            acc = acc + y * h[a] * h[n - a]
        h[n] = acc
    cs = [YPoly.const(1) if bivariate else Fraction(1)] + list(h[:order])
    return TruncatedSeries(cs, order)


def _hyperchord_p_coeffs(bivariate: bool) -> list[TruncatedSeries]:
    """The cubic for hyperchord configurations without crossings."""

    def yp(*cs):
        return YPoly(cs)

    p0 = {0: yp(0, 0, 1), 1: yp(-1, -3, 0, 2), 2: yp(-2, -7, -7, -1, 1)}
    p1 = {
        0: yp(0, 0, -3),
        1: yp(2, 6, 0, -4),
        2: yp(1, 4, 4, 0, -1),
        3: yp(-2, -8, -12, -8, -2),
    }
    p2 = {0: yp(0, 0, 3), 1: yp(-1, -3, 0, 2), 2: yp(1, 3, 3, 1)}
    p3 = {0: yp(0, 0, -1)}
    order = 3
    out = []
    for data in (p0, p1, p2, p3):
        if bivariate:
            out.append(_ypoly_x(order, data))
        else:
            cs = [_ZERO] * (order + 1)
            for k, v in data.items():
                cs[k] = v(Fraction(1))
            out.append(TruncatedSeries(cs, order))
    return out


def _hyperchord_cf(order: int, bivariate: bool) -> TruncatedSeries:
    phi = _hyperchord_p_coeffs(bivariate)
    eq = FPoly([p.pad(order + 3) for p in phi])
    one = YPoly.const(1) if bivariate else Fraction(1)
    shifted = eq.shift(one)
    reduced, v = shifted.reduce_common_power()
    if v != 3:
        raise ContractViolation(f"unexpected common power {v} in the shifted cubic")
    g0 = YPoly([1, 1]) if bivariate else Fraction(2)
    if order == 0:
        return TruncatedSeries([one], 0)
    G = solve_implicit(reduced, [g0], order - 1)
    return TruncatedSeries([one] + G.coeffs, order)


# ---------------------------------------------------------------------------
# Connected series


def connected_series(
    family: Family, order: int, *, bivariate: bool = False
) -> TruncatedSeries:
    """Crossing-free configurations with no isolated vertex whose blocks
    form a single component (adjacency = crossing or sharing a vertex).

    Available for chord diagrams (optionally with the block variable y)
    and for size-restricted hyperchords with sizes {q} or q, 2q, 3q, ...
    at y = 1.
    """
    kind = family.kind
    if kind == "diagram" or (
        kind == "hyperchord" and family.sizes is not None and family.sizes == SizeSet.of(2)
    ):
        return _connected_diagram(order, bivariate)
    if kind == "hyperchord" and family.sizes is not None:
        if bivariate:
            raise ContractViolation("restricted connected series: y = 1 only")
        s = family.sizes
        if s.is_finite and len(s.finite) == 1:
            q = s.finite[0]
            if q == 2:
                return _connected_diagram(order, False)
            return _connected_uniform(q, order)
        if s.base == (s.period,) and not s.finite:
            q = s.period
            if q == 2:
                raise ContractViolation("even-size hyperchords not supported")
            return _connected_multiple(q, order)
    raise ContractViolation(f"no connected-series equation for {family.tag}")


def _connected_diagram(order: int, bivariate: bool) -> TruncatedSeries:
    # y C^3 + y C^2 - x (1+2y) C + x^2 (1+y) = 0, with C = x G
    y = YPoly.y_power(1) if bivariate else Fraction(1)
    one2y = YPoly([1, 2]) if bivariate else Fraction(3)
    one_y = YPoly([1, 1]) if bivariate else Fraction(2)
    ord2 = order + 2
    eq = FPoly(
        [
            TruncatedSeries.x_power(2, ord2, one_y),
            TruncatedSeries.x_power(1, ord2, -one2y),
            TruncatedSeries.x_power(0, ord2, y),
            TruncatedSeries.x_power(0, ord2, y),
        ]
    )
    shifted = eq.shift(Fraction(0))
    reduced, v = shifted.reduce_common_power()
    if v != 2:
        raise ContractViolation("unexpected valuation in the connected cubic")
    one = YPoly.const(1) if bivariate else Fraction(1)
    if order == 0:
        return TruncatedSeries.zero(0)
    G = solve_implicit(reduced, [one], order - 1)
    return TruncatedSeries([_ZERO] + G.coeffs, order)


def _connected_uniform(q: int, order: int) -> TruncatedSeries:
    # (C - x) x^(q-1) = C (C^2 + C - x)^(q-1)
    W = order + q
    C = FPoly.F(W)
    xS = FPoly.const(TruncatedSeries.x_power(1, W))
    lhs = (C + xS.scale(-1)) * FPoly.const(TruncatedSeries.x_power(q - 1, W))
    inner = C * C + C + xS.scale(-1)
    rhs = C * (inner ** (q - 1))
    eq = lhs + rhs.scale(-1)
    return solve_implicit(eq, [Fraction(0), Fraction(1)], order)


def _connected_multiple(q: int, order: int) -> TruncatedSeries:
    # (C - x) x^q = (C^2 + C - x)^(q-2) * P(C, x)
    W = order + q + 1
    C = FPoly.F(W)
    xS = FPoly.const(TruncatedSeries.x_power(1, W))
    x2 = FPoly.const(TruncatedSeries.x_power(2, W))
    x3 = FPoly.const(TruncatedSeries.x_power(3, W))
    two = FPoly.const(TruncatedSeries([Fraction(2)], W))
    one = FPoly.const(TruncatedSeries.one(W))
    P = (
        C ** 5
        + (two + xS.scale(-1)) * C ** 4
        + (one + xS.scale(-3)) * C ** 3
        + (x2.scale(2) + xS.scale(-2)) * C ** 2
        + x2.scale(2) * C
        + x3.scale(-1)
    )
    lhs = (C + xS.scale(-1)) * FPoly.const(TruncatedSeries.x_power(q, W))
    inner = C * C + C + xS.scale(-1)
    eq = lhs + (inner ** (q - 2) * P).scale(-1)
    return solve_implicit(eq, [Fraction(0), Fraction(1)], order)


# ---------------------------------------------------------------------------
# Marked substitutions


def marked_transform(F0: TruncatedSeries, i: int, order: int) -> TruncatedSeries:
    """Filler for a region with i arcs in a covering family.

    Coefficient rule: [x^s] = binom(s-1, i-1) * [x^(s-i)] F0.
    """
    if i < 1:
        raise ContractViolation("arc count must be positive")
    cs = [_ZERO] * (order + 1)
    for s in range(i, order + 1):
        base = F0.coeff(s - i)
        if not _is_zero(base):
            cs[s] = comb(s - 1, i - 1) * base
    return TruncatedSeries(cs, order)


def marked_transform_diagram(
    A: TruncatedSeries, i: int, j: int, order: int
) -> TruncatedSeries:
    """Filler for a region with i arcs and j peaks in a non-covering family.

    Coefficient rule: [x^s] = binom(s-1, i-1) * [x^(s+i+j)] A, so A must
    carry i + j orders of margin beyond the requested order.
    """
    if i < 1:
        raise ContractViolation("use the bare coefficient of A for arcless regions")
    if A.order < order + i + j:
        raise ContractViolation("insufficient margin on A for the marked transform")
    cs = [_ZERO] * (order + 1)
    for s in range(i, order + 1):
        base = A.coeff(s + i + j)
        if not _is_zero(base):
            cs[s] = comb(s - 1, i - 1) * base
    return TruncatedSeries(cs, order)


# ---------------------------------------------------------------------------
# Serialization


def _frac_str(c) -> str:
    return str(c if isinstance(c, Fraction) else Fraction(c))


def series_coefficients_json(F: TruncatedSeries) -> list:
    """Coefficients as "p/q" strings; lists of those for y-polynomials."""
    out = []
    bivariate = any(isinstance(c, YPoly) for c in F.coeffs)
    for c in F.coeffs:
        if bivariate:
            p = YPoly.coerce(c)
            out.append([_frac_str(v) for v in p.coeffs])
        else:
            out.append(_frac_str(c))
    return out

def series_coefficients_from_json(data: list) -> TruncatedSeries:
    cs = []
    for item in data:
        if isinstance(item, list):
            cs.append(YPoly([Fraction(v) for v in item]))
        else:
            cs.append(Fraction(item))
    return TruncatedSeries(cs, len(cs) - 1)
