"""Boltzmann samplers for chord configurations.

Crossing-free matchings and diagrams are sampled at a control parameter
theta, and matchings with exactly k crossings through the three-step
scheme: pick a core, fill its regions with marked crossing-free
matchings, reroot at a pointed vertex.  Every output C with n vertices
has probability theta^n / F(theta) for the relevant series F, so
conditioned on its size the output is uniform.

All numerics are closed-form evaluations at theta (no series
truncation): the crossing-free matching series from its quadratic
equation, derivatives by Taylor jets, region weights from the marked
transforms.  Randomness flows through a seedable splittable 64-bit
generator, so identical configurations reproduce identical output.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .chords_core import (
    DIAGRAM,
    MATCHING,
    ChordError,
    ChordSystem,
    ContractViolation,
    Family,
    ResourceBoundExceeded,
    crossing_number,
)
from .enumeration import enumerate_cores
from .series_engine import connected_series

__all__ = [
    "SamplerConfig",
    "SplitMix64",
    "component_choice_law",
    "connected_choice_law",
    "core_distribution",
    "sample_crossing_free",
    "sample_with_k_crossings",
    "size_moments",
]

_DPS = 50
_JET_LEN = 4  # value plus three derivatives: enough for mean and variance

_MASK64 = (1 << 64) - 1
_GAMMA64 = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit stream with forkable substreams.

    ``split`` derives an independent child stream from the next output,
    which keeps recursive samplers reproducible regardless of the order
    in which branches are consumed.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA64) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Exact uniform integer in [0, n); n may be a big integer."""
        if n < 1:
            raise ContractViolation("randrange needs n >= 1")
        if n == 1:
            return 0
        chunks = ((n - 1).bit_length() + 63) // 64
        span = 1 << (64 * chunks)
        limit = span - span % n
        while True:
            x = 0
            for _ in range(chunks):
                x = (x << 64) | self.next_u64()
            if x < limit:
                return x % n

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())


class _Budget:
    __slots__ = ("left",)

    def __init__(self, steps: int):
        self.left = steps

    def spend(self, amount: int = 1) -> None:
        self.left -= amount
        if self.left < 0:
            raise ResourceBoundExceeded(
                "sampling budget exhausted; retry with a fresh seed or a larger max_steps"
            )


def _to_mpf(value) -> mp.mpf:
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    return mp.mpf(value)


def _diagram_theta_bound() -> mp.mpf:
    # singularity of the crossing-free diagram series
    return mp.mpf(3) / 2 - mp.sqrt(2)


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of one sampling run.

    theta must lie strictly inside (0, singularity) for the family:
    1/2 for matchings, 3/2 - sqrt(2) for diagrams.  Only matchings and
    diagrams carry samplers.  max_steps bounds the total branching and
    rejection work of a single sample.
    """

    theta: float | Fraction
    k: int = 0
    family: Family = MATCHING
    seed: int = 0
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.family.kind not in ("matching", "diagram"):
            raise ContractViolation(f"no sampler for family {self.family.tag}")
        with mp.workdps(_DPS):
            th = _to_mpf(self.theta)
            if not th > 0:
                raise ContractViolation("theta must be positive")
            if self.family.kind == "matching":
                bound = mp.mpf(1) / 2
            else:
                bound = _diagram_theta_bound()
            if not th < bound:
                raise ContractViolation(
                    f"theta {self.theta} is not below the {self.family.kind} "
                    f"singularity {mp.nstr(bound, 12)}"
                )
        if int(self.k) != self.k or self.k < 0:
            raise ContractViolation("k must be a nonnegative integer")
        if self.max_steps < 1:
            raise ContractViolation("max_steps must be at least 1")


# ---------------------------------------------------------------------------
# Taylor jets at theta.
#
# A jet is a list of _JET_LEN coefficients c with f(theta + e) =
# sum c_i e^i, so f(theta) = c[0], f'(theta) = c[1], f''(theta) = 2 c[2].


def _jet_const(v) -> list:
    return [mp.mpf(v)] + [mp.mpf(0)] * (_JET_LEN - 1)


def _jet_mul(a: list, b: list) -> list:
    out = [mp.mpf(0)] * _JET_LEN
    for i in range(_JET_LEN):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(_JET_LEN - i):
            out[i + j] += ai * b[j]
    return out


def _jet_add(a: list, b: list) -> list:
    return [x + y for x, y in zip(a, b)]


def _jet_div(a: list, b: list) -> list:
    inv0 = 1 / b[0]
    out = [mp.mpf(0)] * _JET_LEN
    for i in range(_JET_LEN):
        acc = a[i]
        for j in range(1, i + 1):
            acc -= b[j] * out[i - j]
        out[i] = acc * inv0
    return out


def _jet_x_power(th: mp.mpf, i: int) -> list:
    # (theta + e)^i truncated; binomial coefficients stay tiny here
    out = [mp.mpf(0)] * _JET_LEN
    c = mp.mpf(1)
    for j in range(min(i, _JET_LEN - 1) + 1):
        out[j] = c * th ** (i - j)
        c = c * (i - j) / (j + 1)
    return out


def _m0_jet(th: mp.mpf) -> list:
    """Jet of the crossing-free matching series M0 at theta.

    The value is the closed form (1 - sqrt(1-4 theta^2)) / (2 theta^2);
    the derivatives come order by order from x^2 M^2 - M + 1 = 0, each a
    rational expression in the value and theta.
    """
    y0 = (1 - mp.sqrt(1 - 4 * th * th)) / (2 * th * th)
    x = [th, mp.mpf(1)] + [mp.mpf(0)] * (_JET_LEN - 2)
    x2 = _jet_mul(x, x)
    y = _jet_const(y0)
    den = 1 - 2 * th * th * y0
    for r in range(1, _JET_LEN):
        z = _jet_mul(x2, _jet_mul(y, y))
        z[0] += 1
        z = [z[i] - y[i] for i in range(_JET_LEN)]
        y[r] = z[r] / den
    return y


def _a_jets(th: mp.mpf, rmax: int) -> list[list]:
    """Jets of the marked series A_r, r = 0..rmax.

    A_r counts crossing-free matchings with an r-multiset of marked gaps,
    binom(n+r, r) m_n theta^n, and satisfies
    A_r (1 - 2 x^2 A_0) = A_{r-1} + x^2 sum_{p=1}^{r-1} A_p A_{r-p}.
    """
    x = [th, mp.mpf(1)] + [mp.mpf(0)] * (_JET_LEN - 2)
    x2 = _jet_mul(x, x)
    jets = [_m0_jet(th)]
    den = _jet_add(_jet_const(1), [-2 * v for v in _jet_mul(x2, jets[0])])
    for r in range(1, rmax + 1):
        num = list(jets[r - 1])
        for p in range(1, r):
            num = _jet_add(num, _jet_mul(x2, _jet_mul(jets[p], jets[r - p])))
        jets.append(_jet_div(num, den))
    return jets


# ---------------------------------------------------------------------------
# Matching tables at a fixed theta: series values and branch weights.


class _MatchTables:
    def __init__(self, theta):
        with mp.workdps(_DPS):
            self.theta = _to_mpf(theta)
        self.jets: list[list] = []
        self._branch_a: dict[int, tuple[list[float], list]] = {}
        self._branch_b: dict[int, tuple[list[float], list]] = {}

    def ensure(self, rmax: int) -> None:
        if len(self.jets) > rmax:
            return
        with mp.workdps(_DPS):
            self.jets = _a_jets(self.theta, rmax)
        self._branch_a.clear()
        self._branch_b.clear()

    def a_value(self, r: int) -> mp.mpf:
        self.ensure(r)
        return self.jets[r][0]

    def b_value(self, r: int) -> mp.mpf:
        """B_r = theta * A_r', the series of A_r objects with a pointed vertex."""
        self.ensure(r)
        return self.theta * self.jets[r][1]

    def branches_a(self, r: int) -> tuple[list[float], list]:
        """Cumulative weights for Gamma A_r: None is the empty branch,
        (s, p, q) places s marks, then a chord around a p-marked inside
        and before a q-marked tail."""
        if r not in self._branch_a:
            self.ensure(r)
            th2 = float(self.theta) ** 2
            options: list = [None]
            cum: list[float] = [1.0]
            for s in range(r + 1):
                for p in range(r - s + 1):
                    q = r - s - p
                    options.append((s, p, q))
                    cum.append(cum[-1] + th2 * float(self.a_value(p)) * float(self.a_value(q)))
            self._branch_a[r] = (cum, options)
        return self._branch_a[r]

    def branches_b(self, r: int) -> tuple[list[float], list]:
        """Cumulative weights for Gamma B_r; modes point at the root chord
        itself, inside it, or in the tail."""
        if r not in self._branch_b:
            self.ensure(r)
            th2 = float(self.theta) ** 2
            options: list = []
            cum: list[float] = []
            total = 0.0
            for s in range(r + 1):
                for p in range(r - s + 1):
                    q = r - s - p
                    ap, aq = float(self.a_value(p)), float(self.a_value(q))
                    bp, bq = float(self.b_value(p)), float(self.b_value(q))
                    for mode, w in (("root", 2 * th2 * ap * aq),
                                    ("inside", th2 * bp * aq),
                                    ("tail", th2 * ap * bq)):
                        total += w
                        options.append((mode, s, p, q))
                        cum.append(total)
            self._branch_b[r] = (cum, options)
        return self._branch_b[r]


_MATCH_TABLES: dict[str, _MatchTables] = {}


def _match_tables(theta) -> _MatchTables:
    key = repr(theta)
    tab = _MATCH_TABLES.get(key)
    if tab is None:
        tab = _MatchTables(theta)
        _MATCH_TABLES[key] = tab
    return tab


def _pick(cum: list[float], options: list, u: float):
    x = u * cum[-1]
    i = bisect.bisect_right(cum, x)
    return options[min(i, len(options) - 1)]


# ---------------------------------------------------------------------------
# Branching samplers.
#
# Objects are built left to right with an explicit task stack: an "A r"
# task emits either r marks at the current gap, or a chord opening at
# the next position whose partner is placed when the matching "close"
# task runs.  Marks record how a region filler is cut into segments.


def _gamma_marked(tab: _MatchTables, r: int, rng: SplitMix64, budget: _Budget
                  ) -> tuple[int, list[tuple[int, int]], list[int]]:
    """Sample Gamma A_r: returns (n, chords, marks) with chords on 1..n
    and marks a sorted list of gap indices in 0..n."""
    chords: list[tuple[int, int]] = []
    marks: list[int] = []
    open_stack: list[int] = []
    pos = 0
    tasks: list = [("A", r, rng)]
    while tasks:
        budget.spend()
        task = tasks.pop()
        if task[0] == "close":
            pos += 1
            chords.append((open_stack.pop(), pos))
            continue
        _, rr, stream = task
        cum, options = tab.branches_a(rr)
        branch = _pick(cum, options, stream.random())
        if branch is None:
            marks.extend([pos] * rr)
            continue
        s, p, q = branch
        marks.extend([pos] * s)
        pos += 1
        open_stack.append(pos)
        left, right = stream.split(), stream.split()
        tasks.append(("A", q, right))
        tasks.append(("close",))
        tasks.append(("A", p, left))
    marks.sort()
    return pos, chords, marks


def _gamma_pointed(tab: _MatchTables, r: int, rng: SplitMix64, budget: _Budget
                   ) -> tuple[int, list[tuple[int, int]], list[int], int]:
    """Sample Gamma B_r: as _gamma_marked plus a pointed vertex."""
    chords: list[tuple[int, int]] = []
    marks: list[int] = []
    open_stack: list[int] = []
    pos = 0
    point = -1
    tasks: list = [("B", r, rng)]
    while tasks:
        budget.spend()
        task = tasks.pop()
        kind = task[0]
        if kind == "close" or kind == "close_pt":
            pos += 1
            chords.append((open_stack.pop(), pos))
            if kind == "close_pt":
                point = pos
            continue
        _, rr, stream = task
        if kind == "A":
            cum, options = tab.branches_a(rr)
            branch = _pick(cum, options, stream.random())
            if branch is None:
                marks.extend([pos] * rr)
                continue
            s, p, q = branch
            marks.extend([pos] * s)
            pos += 1
            open_stack.append(pos)
            left, right = stream.split(), stream.split()
            tasks.append(("A", q, right))
            tasks.append(("close",))
            tasks.append(("A", p, left))
            continue
        # B task: the point sits on the root chord, inside it, or in the tail
        cum, options = tab.branches_b(rr)
        mode, s, p, q = _pick(cum, options, stream.random())
        marks.extend([pos] * s)
        pos += 1
        open_stack.append(pos)
        left, right = stream.split(), stream.split()
        close_kind = "close"
        if mode == "root":
            if stream.random() < 0.5:
                point = pos
            else:
                close_kind = "close_pt"
            inside, tail = ("A", p, left), ("A", q, right)
        elif mode == "inside":
            inside, tail = ("B", p, left), ("A", q, right)
        else:
            inside, tail = ("A", p, left), ("B", q, right)
        tasks.append(tail)
        tasks.append((close_kind,))
        tasks.append(inside)
    marks.sort()
    if point < 1:
        raise ChordError("pointed sampler finished without a point")
    return pos, chords, marks, point


# ---------------------------------------------------------------------------
# Cores: regions from chord sign vectors, weights, the k-crossing scheme.


def _regions_of_core(core: ChordSystem) -> list[list[int]]:
    """Gaps of each boundary region of a matching core.

    Gap g is the circle arc between vertices g and g+1 (gap n wraps to
    vertex 1).  Chords are full secants, so the complement regions are
    convex and two gaps lie in the same region exactly when every chord
    leaves them on the same side.
    """
    chords = [tuple(sorted(b)) for b in core.blocks]
    grouped: dict[tuple[int, ...], list[int]] = {}
    for g in range(1, core.n + 1):
        sig = tuple(1 if u <= g < w else 0 for (u, w) in chords)
        grouped.setdefault(sig, []).append(g)
    return sorted(grouped.values(), key=lambda gaps: gaps[0])


class _CorePrep:
    """Evaluated weights of every rooted core at a fixed theta."""

    def __init__(self, k: int, theta):
        if k < 1:
            raise ContractViolation("core sampling needs k >= 1")
        tab = _match_tables(theta)
        with mp.workdps(_DPS):
            th = tab.theta
            if not 0 < th < mp.mpf(1) / 2:
                raise ContractViolation("theta must lie in (0, 1/2)")
            self.cores = enumerate_cores(MATCHING, k)
            self.regions = [_regions_of_core(c) for c in self.cores]
            self.mode_cum: list[list[float]] = []
            self.mode_opts: list[list] = []
            weights = []
            for core, regions in zip(self.cores, self.regions):
                avals = [tab.a_value(len(g) - 1) for g in regions]
                bvals = [tab.b_value(len(g) - 1) for g in regions]
                prod_all = mp.mpf(1)
                for a in avals:
                    prod_all *= a
                opts: list = [("core",)]
                cum = [float(core.n * prod_all)]
                total = core.n * prod_all
                for j in range(len(regions)):
                    w = bvals[j] * prod_all / avals[j]
                    total += w
                    opts.append(("fill", j))
                    cum.append(cum[-1] + float(w))
                self.mode_opts.append(opts)
                self.mode_cum.append(cum)
                weights.append(th**core.n * total / core.n)
            self.mk = sum(weights, mp.mpf(0))
            self.probs = [w / self.mk for w in weights]
            cum = []
            acc = 0.0
            for p in self.probs:
                acc += float(p)
                cum.append(acc)
            self.core_cum = cum


_CORE_PREP: dict[tuple[int, str], _CorePrep] = {}


def _core_prep(k: int, theta) -> _CorePrep:
    key = (k, repr(theta))
    prep = _CORE_PREP.get(key)
    if prep is None:
        prep = _CorePrep(k, theta)
        _CORE_PREP[key] = prep
    return prep


def core_distribution(k: int, theta) -> list[tuple[ChordSystem, mp.mpf]]:
    """Probability of each rooted k-core under the Boltzmann scheme.

    The weight of a core K is M_K(theta): theta^n(K)/n(K) times the
    rerooted product of region fillers, evaluated in closed form.  The
    list pairs every core from enumerate_cores with M_K/M_k.
    """
    prep = _core_prep(k, theta)
    return list(zip(prep.cores, prep.probs))


def sample_crossing_free(cfg: SamplerConfig) -> ChordSystem:
    """Boltzmann sampler at cfg.theta: P(C) = theta^|C| / F0(theta).

    Matchings use the branching sampler of the quadratic equation;
    diagrams decompose along the connected component of the first
    vertex, drawing the component uniformly at its size by rejection.
    """
    if cfg.family.kind == "matching":
        tab = _match_tables(cfg.theta)
        rng = SplitMix64(cfg.seed)
        budget = _Budget(cfg.max_steps)
        n, chords, _ = _gamma_marked(tab, 0, rng, budget)
        return ChordSystem(n, [frozenset(c) for c in chords], MATCHING)
    return _sample_diagram(cfg)


def sample_with_k_crossings(cfg: SamplerConfig) -> ChordSystem:
    """Matching with exactly cfg.k crossings, Boltzmann in its size.

    Draws a core, a pointed mode, and marked region fillers with their
    joint exact law; the marks cut each filler into one segment per
    boundary arc, and labels rotate so the pointed vertex becomes 1.
    Conditioned on its size the output is uniform.
    """
    if cfg.family.kind != "matching":
        raise ContractViolation("exact-crossing sampling covers matchings only")
    if cfg.k < 1:
        raise ContractViolation("k >= 1 here; sample_crossing_free handles k = 0")
    prep = _core_prep(cfg.k, cfg.theta)
    tab = _match_tables(cfg.theta)
    rng = SplitMix64(cfg.seed)
    budget = _Budget(cfg.max_steps)

    idx = min(bisect.bisect_right(prep.core_cum, rng.random() * prep.core_cum[-1]),
              len(prep.cores) - 1)
    core = prep.cores[idx]
    regions = prep.regions[idx]
    mode = _pick(prep.mode_cum[idx], prep.mode_opts[idx], rng.random())

    fills = []
    point_fill = None
    for j, gaps in enumerate(regions):
        r = len(gaps) - 1
        sub = rng.split()
        if mode == ("fill", j):
            n_j, chords_j, marks_j, pt = _gamma_pointed(tab, r, sub, budget)
            point_fill = (j, pt)
        else:
            n_j, chords_j, marks_j = _gamma_marked(tab, r, sub, budget)
        fills.append((n_j, chords_j, marks_j))
    if mode == ("core",):
        point_core = rng.randrange(core.n) + 1

    # segment t of region j (cut by the sorted marks) goes into gap t
    per_gap: dict[int, tuple[int, int, int]] = {}
    for j, gaps in enumerate(regions):
        n_j, _, marks_j = fills[j]
        bounds = [0] + marks_j + [n_j]
        for t, g in enumerate(gaps):
            per_gap[g] = (j, bounds[t], bounds[t + 1])

    cpos: dict[int, int] = {}
    fpos: dict[tuple[int, int], int] = {}
    pos = 0
    for g in range(1, core.n + 1):
        cpos[g] = pos
        pos += 1
        j, lo, hi = per_gap[g]
        for idx_f in range(lo + 1, hi + 1):
            fpos[(j, idx_f)] = pos
            pos += 1
    n_total = pos

    if mode == ("core",):
        root = cpos[point_core]
    else:
        root = fpos[point_fill]

    def lab(p: int) -> int:
        return (p - root) % n_total + 1

    blocks = [frozenset((lab(cpos[u]), lab(cpos[w])))
              for (u, w) in (tuple(sorted(b)) for b in core.blocks)]
    for j, (n_j, chords_j, _) in enumerate(fills):
        blocks.extend(frozenset((lab(fpos[(j, a)]), lab(fpos[(j, b)])))
                      for (a, b) in chords_j)

    out = ChordSystem(n_total, blocks, MATCHING)
    if crossing_number(out) != cfg.k:
        raise ChordError(f"sampler invariant broken: {crossing_number(out)} crossings, wanted {cfg.k}")
    return out


def size_moments(k: int, theta) -> tuple[mp.mpf, mp.mpf]:
    """Mean and dispersion of the size N of a k-crossing Boltzmann sample.

    Returns (E, V) with E = theta M_k'(theta)/M_k(theta) and
    V = (theta^2 (M_k'' M_k - theta M_k'^2) + theta M_k') / M_k,
    all derivatives taken by jet arithmetic on the closed-form region
    weights.  V upper-bounds the plain Boltzmann size variance at these
    parameters and is the scale the empirical-mean checks run against.
    """
    tab = _match_tables(theta)
    with mp.workdps(_DPS):
        th = tab.theta
        if not 0 < th < mp.mpf(1) / 2:
            raise ContractViolation("theta must lie in (0, 1/2)")
        if k == 0:
            mk = _m0_jet(th)
        else:
            x_jet = [th, mp.mpf(1)] + [mp.mpf(0)] * (_JET_LEN - 2)
            total = _jet_const(0)
            for core in enumerate_cores(MATCHING, k):
                term = _jet_const(mp.mpf(1) / core.n)
                for gaps in _regions_of_core(core):
                    i = len(gaps)
                    tab.ensure(i - 1)
                    term = _jet_mul(term, _jet_mul(_jet_x_power(th, i), tab.jets[i - 1]))
                total = _jet_add(total, term)
            deriv = [(j + 1) * total[j + 1] for j in range(_JET_LEN - 1)] + [mp.mpf(0)]
            mk = _jet_mul(x_jet, deriv)
        val, d1, d2 = mk[0], mk[1], 2 * mk[2]
        mean = th * d1 / val
        second = (th * d1 + th * th * d2) / val
        return mean, second - mean * mean


# ---------------------------------------------------------------------------
# Diagrams: exact counts, uniform drawing, the component decomposition.
#
# t(n) counts crossing-free diagrams on n vertices.  Splitting at the
# farthest edge of vertex 1 gives
#     t(n) = t(n-1) + sum_{j=2}^{n} (t(j)/2) t(n-j+1),
# where t(j)/2 counts diagrams on 1..j containing the edge (1, j):
# adding that edge never creates a crossing, so toggling it pairs up all
# diagrams on 1..j.  The same two-to-one collapse turns a uniform draw
# plus a forced edge into a uniform draw of the inner part.

_T_DIAGRAM: list[int] = [1, 1]


def _t_diagram(n: int) -> int:
    # the j = n term of the sum is t(n)/2 itself, so the closed update
    # doubles: t(n) = 2 t(n-1) + sum_{j=2}^{n-1} t(j) t(n-j+1)
    while len(_T_DIAGRAM) <= n:
        m = len(_T_DIAGRAM)
        acc = 2 * _T_DIAGRAM[m - 1]
        for j in range(2, m):
            acc += _T_DIAGRAM[j] * _T_DIAGRAM[m - j + 1]
        _T_DIAGRAM.append(acc)
    return _T_DIAGRAM[n]


def _uniform_diagram(n: int, rng: SplitMix64, budget: _Budget) -> set[tuple[int, int]]:
    """Uniform crossing-free diagram on vertices 1..n, as an edge set."""
    edges: set[tuple[int, int]] = set()
    work = [(1, n)]
    while work:
        budget.spend()
        lo, hi = work.pop()
        size = hi - lo + 1
        if size <= 1:
            continue
        z = rng.randrange(_t_diagram(size))
        if z < _t_diagram(size - 1):
            work.append((lo + 1, hi))
            continue
        z -= _t_diagram(size - 1)
        j = 2
        while True:
            w = (_t_diagram(j) // 2) * _t_diagram(size - j + 1)
            if z < w:
                break
            z -= w
            j += 1
        b = lo + j - 1
        edges.add((lo, b))
        work.append((lo, b))
        work.append((b, hi))
    return edges


def _is_connected(n: int, edges: set[tuple[int, int]]) -> bool:
    if n <= 1:
        return True
    parent = list(range(n + 1))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    comps = n
    for (a, b) in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps == 1


def _d0_value(th: mp.mpf) -> mp.mpf:
    """Crossing-free diagram series D0(theta) from its closed form.

    D0 = 1 + theta H with H^2 + (2 theta - 3) H + 2 = 0 on the branch
    with H(0) = 1.
    """
    h = (3 - 2 * th - mp.sqrt(4 * th * th - 12 * th + 1)) / 2
    return 1 + th * h


def _cd0_value(th: mp.mpf) -> mp.mpf:
    """Connected diagram series CD0(theta), root of
    C^3 + C^2 - 3 theta C + 2 theta^2 near its series value."""
    cs = connected_series(DIAGRAM, 12)
    seed = mp.mpf(0)
    for i in range(12, 0, -1):
        seed = (seed + int(cs.coeff(i))) * th
    c = seed
    for _ in range(80):
        f = c**3 + c**2 - 3 * th * c + 2 * th * th
        fp = 3 * c**2 + 2 * c - 3 * th
        step = f / fp
        c -= step
        if abs(step) < mp.mpf(10) ** (-_DPS):
            break
    return c


def connected_choice_law(theta, terms: int = 40) -> tuple[mp.mpf, list[mp.mpf]]:
    """Branch law of the connected-diagram decomposition at theta.

    Returns (p_single, [p_0, p_1, ...]): p_single = theta/CD0(theta) is
    the single-vertex branch and p_r = CD0 * w^r with
    w = (CD0 - theta + CD0^2)/theta the r-th product branch.  Requires
    theta below the connected radius sqrt(3)/18.
    """
    with mp.workdps(_DPS):
        th = _to_mpf(theta)
        if not 0 < th < mp.sqrt(3) / 18:
            raise ContractViolation("theta must lie in (0, sqrt(3)/18)")
        cd = _cd0_value(th)
        w = (cd - th + cd * cd) / th
        ps = []
        acc = cd
        for _ in range(terms):
            ps.append(acc)
            acc = acc * w
        return th / cd, ps


def component_choice_law(theta, terms: int = 40) -> tuple[mp.mpf, list[mp.mpf]]:
    """Law of the connected component of vertex 1 in a Boltzmann diagram.

    Returns (p_empty, [q_1, q_2, ...]): p_empty = 1/D0(theta), and
    q_s = cd_s theta^s D0(theta)^(s-1) picks an s-vertex component,
    with cd_s the number of connected diagrams on s vertices.
    """
    with mp.workdps(_DPS):
        th = _to_mpf(theta)
        if not 0 < th < _diagram_theta_bound():
            raise ContractViolation("theta must lie below 3/2 - sqrt(2)")
        d0 = _d0_value(th)
        cs = connected_series(DIAGRAM, terms)
        qs = [int(cs.coeff(s)) * th**s * d0 ** (s - 1) for s in range(1, terms + 1)]
        return 1 / d0, qs


class _DiagramLaw:
    """Cumulative component-size law with a lazily grown count table."""

    def __init__(self, theta):
        with mp.workdps(_DPS):
            self.th = _to_mpf(theta)
            self.d0 = _d0_value(self.th)
            self.p_empty = float(1 / self.d0)
        self.cum: list[float] = [self.p_empty]
        self._order = 0

    def ensure(self, smax: int) -> None:
        if self._order >= smax:
            return
        with mp.workdps(_DPS):
            cs = connected_series(DIAGRAM, smax)
            for s in range(self._order + 1, smax + 1):
                q = int(cs.coeff(s)) * self.th**s * self.d0 ** (s - 1)
                self.cum.append(self.cum[-1] + float(q))
        self._order = smax

    def draw_size(self, u: float, budget: _Budget) -> int:
        """Component size with cumulative law; 0 means the empty diagram."""
        if u < self.p_empty:
            return 0
        self.ensure(16)
        while u >= self.cum[-1]:
            if 1.0 - self.cum[-1] < 1e-15:
                return len(self.cum) - 1
            budget.spend()
            self.ensure(2 * self._order)
        return bisect.bisect_right(self.cum, u)


_DIAGRAM_LAW: dict[str, _DiagramLaw] = {}


def _diagram_law(theta) -> _DiagramLaw:
    key = repr(theta)
    law = _DIAGRAM_LAW.get(key)
    if law is None:
        law = _DiagramLaw(theta)
        _DIAGRAM_LAW[key] = law
    return law


def _uniform_connected(s: int, rng: SplitMix64, budget: _Budget) -> set[tuple[int, int]]:
    # rejection: uniform diagrams conditioned on connectivity
    while True:
        budget.spend()
        edges = _uniform_diagram(s, rng, budget)
        if _is_connected(s, edges):
            return edges


def _sample_diagram(cfg: SamplerConfig) -> ChordSystem:
    law = _diagram_law(cfg.theta)
    rng = SplitMix64(cfg.seed)
    budget = _Budget(cfg.max_steps)
    blocks: list[tuple[int, int]] = []
    pos = 0
    # a component task interleaves its vertices with recursive gap fills
    work: list = [("D",)]
    while work:
        budget.spend()
        task = work.pop()
        if task[0] == "D":
            s = law.draw_size(rng.random(), budget)
            if s == 0:
                continue
            comp = _uniform_connected(s, rng, budget)
            slots = [0] * (s + 1)
            for i in range(s, 0, -1):
                work.append(("D",))
                work.append(("V", i, slots, comp if i == s else None))
            continue
        _, i, slots, comp = task
        pos += 1
        slots[i] = pos
        if comp is not None:
            blocks.extend((slots[a], slots[b]) for (a, b) in comp)
    return ChordSystem(pos, [frozenset(b) for b in blocks], DIAGRAM)
