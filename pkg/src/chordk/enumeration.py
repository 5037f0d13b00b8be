"""Generation of crossing-connected configurations and k-cores.

A configuration is crossing-connected when the graph on its blocks, with
an edge for every crossing pair, is connected.  Connected configurations
are generated by a canonical branching procedure on the line (the circle
cut before vertex 1); k-cores are then assembled by arranging connected
components around the circle without creating new crossings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .chords_core import (
    MATCHING,
    ChordSystem,
    ContractViolation,
    Family,
    RegionProfile,
    ResourceBoundExceeded,
    blocks_cross_count,
    crossing_number,
    region_profile,
)

_CONNECTED_KMAX = {"matching": 10, "partition": 8, "diagram": 7}
_CORE_KMAX = {"matching": 6, "partition": 3, "diagram": 3}


# ---------------------------------------------------------------------------
# Connected configurations.
#
# The level of a block is its distance, in the crossing graph, from the
# block owning vertex 1.  Sorting blocks by (level, left endpoint, -right
# endpoint) gives a unique build order: a block of the current level
# starts no earlier than the previous one, crosses a block one level
# down and none deeper; the first block of a new level starts anywhere
# after vertex 1, crosses a block of the deepest level and none below
# it.  Every intermediate state is itself connected, so one depth-first
# walk with a crossing budget emits each connected object exactly once.
#
# New endpoints live in gaps, encoded as half-integers g + 0.5 (the gap
# after position g); diagram endpoints may also land on existing
# positions.  After each insertion all coordinates are re-ranked to
# 1..P.


class _State:
    __slots__ = ("blocks", "levels", "P", "k", "last_left")

    def __init__(self, blocks: list[tuple[int, ...]], levels: list[int],
                 P: int, k: int, last_left: int):
        self.blocks = blocks
        self.levels = levels
        self.P = P
        self.k = k
        self.last_left = last_left


def _with_block(state: _State, new_block: tuple[float, ...], level: int,
                added: int) -> _State:
    coords = sorted({c for b in state.blocks for c in b} | set(new_block))
    rank = {c: i + 1 for i, c in enumerate(coords)}
    blocks = [tuple(rank[c] for c in b) for b in state.blocks]
    blocks.append(tuple(rank[c] for c in new_block))
    return _State(blocks, state.levels + [level], len(coords),
                  state.k + added, blocks[-1][0])


def _legal(per_block: list[int], levels: list[int], lvl: int) -> bool:
    # must cross a block at lvl-1 and nothing below lvl-1
    hit = False
    for c, l in zip(per_block, levels):
        if c:
            if l < lvl - 1:
                return False
            if l == lvl - 1:
                hit = True
    return hit


def _arc_moves(state: _State, family: Family, room: int
               ) -> Iterator[tuple[tuple[float, ...], int, int]]:
    """Legal placements of one more 2-block: (block, level, added).

    An arc sharing its left endpoint p with earlier arcs must end before
    all of their right endpoints; together with the build order this
    keeps left-sharing arcs properly nested, widest first.
    """
    P, levels = state.P, state.levels
    cur = levels[-1]
    diagram = family.kind == "diagram"
    existing = set(state.blocks)

    min_right: dict[int, int] = {}
    for b in state.blocks:
        if b[0] not in min_right or b[1] < min_right[b[0]]:
            min_right[b[0]] = b[1]

    all_slots = [g + 0.5 for g in range(P + 1)]
    if diagram:
        all_slots += [float(p) for p in range(1, P + 1)]
    all_slots.sort()

    for lvl in (cur, cur + 1):
        lo = state.last_left - 0.5 if lvl == cur else 0.6
        for a in all_slots:
            if a <= lo:
                continue
            a_shared = a == int(a)
            hi = min_right.get(int(a)) if a_shared else None
            for b in all_slots:
                if b <= a:
                    continue
                if hi is not None and b >= hi:
                    break
                b_shared = b == int(b)
                if a_shared and b_shared and (int(a), int(b)) in existing:
                    continue
                cand = (a, b)
                per = [blocks_cross_count(cand, blk) for blk in state.blocks]
                added = sum(per)
                if added > room or not _legal(per, levels, lvl):
                    continue
                yield cand, lvl, added


def _partition_moves(state: _State, family: Family, room: int
                     ) -> Iterator[tuple[tuple[float, ...], int, int]]:
    """Legal placements of one more block of any allowed size >= 2.

    A block of size s contributes at least s - 1 crossings once it
    crosses anything, which bounds the sizes worth trying.
    """
    P, levels = state.P, state.levels
    cur = levels[-1]
    sizes = [s for s in range(2, room + 2) if family.allows_size(s)]
    if not sizes:
        return

    for lvl in (cur, cur + 1):
        lo = state.last_left if lvl == cur else 0.6
        gaps = [g for g in range(P + 1) if g + 0.5 > lo]
        for s in sizes:
            for combo in itertools.combinations_with_replacement(gaps, s):
                seen: dict[int, int] = {}
                block = []
                for g in combo:
                    j = seen.get(g, 0)
                    seen[g] = j + 1
                    block.append(g + (j + 1) / (s + 1))
                cand = tuple(block)
                per = [blocks_cross_count(cand, blk) for blk in state.blocks]
                added = sum(per)
                if added > room or added == 0:
                    continue
                if not _legal(per, levels, lvl):
                    continue
                yield cand, lvl, added


def enumerate_connected(family: Family, k_max: int,
                        k_min: int = 1) -> Iterator[ChordSystem]:
    """Stream all crossing-connected configurations with k_min <= k <= k_max.

    Objects come out in lexicographic order of (k, m, block encoding).
    Connected matchings satisfy n <= 2 * (k + 1), which is asserted on
    every emitted object.
    """
    if family.kind not in _CONNECTED_KMAX:
        raise ContractViolation(f"no connected generator for {family.kind}")
    if k_max > _CONNECTED_KMAX[family.kind]:
        raise ResourceBoundExceeded(
            f"k_max={k_max} beyond supported bound "
            f"{_CONNECTED_KMAX[family.kind]} for {family.kind}")

    moves = _partition_moves if family.kind == "partition" else _arc_moves
    out: list[tuple[int, int, tuple, ChordSystem]] = []

    def seeds() -> Iterator[tuple[int, ...]]:
        if family.kind == "partition":
            for s in range(2, k_max + 2):
                if family.allows_size(s):
                    yield tuple(range(1, s + 1))
        else:
            yield (1, 2)

    def rec(state: _State) -> None:
        if len(state.blocks) >= 2 and state.k >= k_min:
            if family.kind == "matching" and state.P > 2 * (state.k + 1):
                raise ContractViolation("connected matching too wide")
            sys = ChordSystem(state.P, state.blocks, family)
            enc = tuple(sorted(state.blocks))
            out.append((state.k, len(state.blocks), enc, sys))
        for cand, lvl, added in moves(state, family, k_max - state.k):
            rec(_with_block(state, cand, lvl, added))

    if k_max >= 1:
        for seed in seeds():
            rec(_State([seed], [0], len(seed), 0, seed[0]))

    out.sort(key=lambda t: t[:3])
    for item in out:
        yield item[3]


@dataclass
class ConnectedTable:
    """Counts of connected configurations by crossings and size."""

    family: Family
    k_max: int
    by_m: dict[tuple[int, int], int]
    by_n: dict[tuple[int, int], int]

    def __post_init__(self) -> None:
        if self.family.kind == "matching":
            for (k, m), c in self.by_m.items():
                if c and not (m - 1 <= k <= m * (m - 1) // 2):
                    raise ContractViolation(
                        f"impossible matching cell k={k} m={m}")

    def cells(self, size_stat: str = "m") -> dict[tuple[int, int], int]:
        if size_stat == "m":
            return dict(self.by_m)
        if size_stat == "n":
            return dict(self.by_n)
        raise ContractViolation(f"unknown size statistic {size_stat!r}")

    def total(self, k: int) -> int:
        return sum(c for (kk, _), c in self.by_m.items() if kk == k)

    def to_csv(self, size_stat: str = "m") -> str:
        rows = ["k,size,count"]
        for (k, s), c in sorted(self.cells(size_stat).items()):
            rows.append(f"{k},{s},{c}")
        return "\n".join(rows) + "\n"


def connected_table(family: Family, k_max: int) -> ConnectedTable:
    by_m: dict[tuple[int, int], int] = {}
    by_n: dict[tuple[int, int], int] = {}
    for sys in enumerate_connected(family, k_max):
        k = crossing_number(sys)
        key_m = (k, sys.m)
        key_n = (k, sys.n)
        by_m[key_m] = by_m.get(key_m, 0) + 1
        by_n[key_n] = by_n.get(key_n, 0) + 1
    return ConnectedTable(family, k_max, by_m, by_n)


# ---------------------------------------------------------------------------
# Core assembly.
#
# A core (every vertex used, every block crossing) decomposes uniquely
# on the line into a sequence of trees: each tree is a connected
# component together with sequences of sub-trees filling its internal
# gaps.  Conversely any such structure materializes to a core, and
# distinct structures give distinct cores, because a component strictly
# inside a gap of another crosses nothing outside that gap.  For
# diagrams, adjacent vertices from distinct components may additionally
# be merged into shared vertices; the wrap-around pair (n, 1) is never
# merged, so the root arc survives the cut.


def _component_pool(family: Family, k: int) -> dict[int, list[tuple]]:
    pool: dict[int, list[tuple]] = {kk: [] for kk in range(1, k + 1)}
    for sys in enumerate_connected(family, k):
        blocks = tuple(tuple(sorted(b)) for b in sys.blocks)
        pool[crossing_number(sys)].append((sys.n, blocks))
    return pool


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _structures(family: Family, k: int) -> list:
    """All sequences of trees with total crossing budget exactly k."""
    pool = _component_pool(family, k)
    trees_memo: dict[int, list] = {}
    seqs_memo: dict[int, list] = {}

    def trees(budget: int) -> list:
        if budget not in trees_memo:
            out = []
            for kc in range(1, budget + 1):
                for comp in pool[kc]:
                    rest = budget - kc
                    for split in _compositions(rest, comp[0] - 1):
                        fills = [seqs(b) if b else [()] for b in split]
                        for fill in itertools.product(*fills):
                            out.append((comp, fill))
            trees_memo[budget] = out
        return trees_memo[budget]

    def seqs(budget: int) -> list:
        if budget not in seqs_memo:
            out = []
            for first in range(1, budget + 1):
                for t in trees(first):
                    if first == budget:
                        out.append((t,))
                    else:
                        for tail in seqs(budget - first):
                            out.append((t,) + tail)
            seqs_memo[budget] = out
        return seqs_memo[budget]

    return seqs(k)


def _materialize(seq, offset: int, blocks: list[tuple[int, ...]],
                 comp_ids: list[int], next_id: list[int]) -> int:
    """Lay out a sequence of trees after position `offset`; returns the end."""
    pos = offset
    for (comp_n, comp_blocks), fill in seq:
        cid = next_id[0]
        next_id[0] += 1
        placed: dict[int, int] = {}
        cursor = pos
        for v in range(1, comp_n + 1):
            cursor += 1
            placed[v] = cursor
            if v < comp_n:
                cursor = _materialize(fill[v - 1], cursor, blocks,
                                      comp_ids, next_id)
        for b in comp_blocks:
            blocks.append(tuple(placed[v] for v in b))
            comp_ids.append(cid)
        pos = cursor
    return pos


def _merge_variants(n: int, blocks: list[tuple[int, ...]],
                    comp_ids: list[int]) -> Iterator[tuple[int, tuple]]:
    """All vertex-merge patterns of a laid-out diagram core.

    Mergeable junctions are adjacent positions (p, p+1) owned by
    distinct components; chains collapse several vertices into one.
    """
    owner: dict[int, int] = {}
    for b, cid in zip(blocks, comp_ids):
        for p in b:
            owner[p] = cid
    junctions = [p for p in range(1, n) if owner[p] != owner[p + 1]]
    for r in range(len(junctions) + 1):
        for chosen in itertools.combinations(junctions, r):
            drop = set(p + 1 for p in chosen)
            rep = {}
            cur = None
            for p in range(1, n + 1):
                if p not in drop:
                    cur = p
                rep[p] = cur
            labels = sorted(set(rep.values()))
            rank = {c: i + 1 for i, c in enumerate(labels)}
            merged = tuple(sorted(tuple(sorted({rank[rep[p]] for p in b}))
                                  for b in blocks))
            yield len(labels), merged


def enumerate_cores(family: Family, k: int) -> list[ChordSystem]:
    """All cores with exactly k crossings, sorted by (n, blocks).

    A core has every vertex in some block and every block in at least
    one crossing.  Matchings are supported for k <= 6, partitions and
    diagrams for k <= 3.
    """
    if family.kind not in _CORE_KMAX:
        raise ContractViolation(f"no core generator for {family.kind}")
    if k > _CORE_KMAX[family.kind]:
        raise ResourceBoundExceeded(
            f"k={k} beyond supported core bound for {family.kind}")
    if k < 1:
        return []

    results: dict[tuple[int, tuple], ChordSystem] = {}
    for seq in _structures(family, k):
        blocks: list[tuple[int, ...]] = []
        comp_ids: list[int] = []
        n = _materialize(seq, 0, blocks, comp_ids, [0])
        if family.kind == "diagram":
            for nn, merged in _merge_variants(n, blocks, comp_ids):
                if len(set(merged)) != len(merged):
                    continue
                mkey = (nn, merged)
                if mkey not in results:
                    sys = ChordSystem(nn, merged, family)
                    if crossing_number(sys) != k:
                        raise ContractViolation("merge changed crossings")
                    results[mkey] = sys
        else:
            key = (n, tuple(sorted(blocks)))
            if key in results:
                raise ContractViolation("duplicate core structure")
            results[key] = ChordSystem(n, key[1], family)
    return [results[key] for key in sorted(results)]


# ---------------------------------------------------------------------------
# Core polynomials.


@dataclass
class CorePolynomial:
    """Sum over k-cores K of x^(region profile of K) * y^m(K) / n(K).

    Terms map (profile, m) to a positive rational.  Multiplying a
    coefficient by the vertex count n recovers the integer number of
    labeled cores with that profile and block count.
    """

    family: Family
    k: int
    terms: dict[tuple[RegionProfile, int], Fraction]

    def __post_init__(self) -> None:
        total = 0
        for (prof, m), c in self.terms.items():
            if c <= 0:
                raise ContractViolation("core polynomial coefficient <= 0")
            cnt = c * prof.n_total
            if cnt.denominator != 1:
                raise ContractViolation("labeled core count not integral")
            total += cnt.numerator
        if self.terms and total <= 0:
            raise ContractViolation("empty core polynomial total")

    def labeled_total(self) -> int:
        return sum(int(c * prof.n_total)
                   for (prof, _), c in self.terms.items())

    def _ordered(self) -> list[tuple[tuple[RegionProfile, int], Fraction]]:
        return sorted(self.terms.items(),
                      key=lambda kv: (kv[0][0].n_total, kv[0][0].counts,
                                      kv[0][1]))

    def text(self) -> str:
        with_y = self.family.kind != "matching"
        parts = []
        for (prof, m), c in self._ordered():
            mono = prof.monomial(with_peaks=self.family.kind == "diagram")
            if with_y:
                mono = f"{mono}*y^{m}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "family": self.family.tag,
            "k": self.k,
            "terms": [
                {"profile": [[list(ij), c] for ij, c in prof.counts],
                 "m": m, "coefficient": str(coeff)}
                for (prof, m), coeff in self._ordered()
            ],
        }


_CORE_POLY_CACHE: dict[tuple[str, int], CorePolynomial] = {}


def core_polynomial(family: Family, k: int) -> CorePolynomial:
    # memoized: the k = 6 matching enumeration takes tens of seconds
    cached = _CORE_POLY_CACHE.get((family.tag, k))
    if cached is not None:
        return cached
    terms: dict[tuple[RegionProfile, int], Fraction] = {}
    for core in enumerate_cores(family, k):
        key = (_core_profile(core), core.m)
        terms[key] = terms.get(key, Fraction(0)) + Fraction(1, core.n)
    poly = CorePolynomial(family, k, terms)
    _CORE_POLY_CACHE[(family.tag, k)] = poly
    return poly


def _core_profile(core: ChordSystem) -> RegionProfile:
    if core.family.kind == "diagram":
        return region_profile(core)
    return _profile_peakless(core)


def _profile_peakless(core: ChordSystem) -> RegionProfile:
    """Region profile without geometry, for vertex-disjoint blocks.

    Cut the circle before vertex 1.  Component spans nest or are
    disjoint, so they form a forest under span inclusion; each circular
    gap between consecutive vertices of a component holds some number t
    of directly nested components and yields a region with t + 1 arcs,
    while the r top-level components share the region around the root
    cut, with r arcs.
    """
    blocks = [tuple(sorted(b)) for b in core.blocks]
    nb = len(blocks)
    comp = list(range(nb))

    def find(i: int) -> int:
        while comp[i] != i:
            comp[i] = comp[comp[i]]
            i = comp[i]
        return i

    for i in range(nb):
        for j in range(i + 1, nb):
            if blocks_cross_count(blocks[i], blocks[j]):
                ri, rj = find(i), find(j)
                if ri != rj:
                    comp[ri] = rj

    verts: dict[int, list[int]] = {}
    for i in range(nb):
        r = find(i)
        verts.setdefault(r, []).extend(blocks[i])
    for r in verts:
        verts[r] = sorted(verts[r])

    comps = sorted(verts, key=lambda r: (verts[r][0], -verts[r][-1]))
    parent: dict[int, int | None] = {}
    stack: list[int] = []
    for r in comps:
        while stack and verts[stack[-1]][-1] < verts[r][0]:
            stack.pop()
        parent[r] = stack[-1] if stack else None
        stack.append(r)

    # number of directly nested components per gap, and at top level
    gap_fill: dict[tuple[int | None, int], int] = {}
    for r in comps:
        p = parent[r]
        if p is None:
            key = (None, 0)
        else:
            vs = verts[p]
            lo = verts[r][0]
            gap = max(i for i, v in enumerate(vs) if v < lo)
            key = (p, gap)
        gap_fill[key] = gap_fill.get(key, 0) + 1

    profile: dict[tuple[int, int], int] = {}

    def bump(i: int) -> None:
        profile[(i, 0)] = profile.get((i, 0), 0) + 1

    for r in comps:
        for g in range(len(verts[r]) - 1):
            bump(gap_fill.get((r, g), 0) + 1)
    bump(gap_fill.get((None, 0), 0))
    return RegionProfile(profile)


# ---------------------------------------------------------------------------
# Tree polynomials for matchings.
#
# Matching cores biject with sequences of plane trees whose internal
# vertices carry odd numbers 2j - 1 >= 3 of child slots, each slot
# filled by a leaf or a subtree; t_j marks an internal vertex with 2j
# leaves and x_i marks a pair of consecutive leaves separated by i - 1
# siblings.  Truncation keeps monomials with sum (j - 1) p_j <= p.


@dataclass(frozen=True)
class _TreeTerm:
    xs: tuple[tuple[int, int], ...]
    ts: tuple[tuple[int, int], ...]

    def degree(self) -> int:
        return sum((j - 1) * m for j, m in self.ts)


class TreePolynomial:
    """Integer polynomial in x_1, x_2, ... and t_2, t_3, ..."""

    def __init__(self, terms: dict[_TreeTerm, int] | None = None):
        self.terms = {t: c for t, c in (terms or {}).items() if c}

    @staticmethod
    def mono(xs: dict[int, int], ts: dict[int, int],
             coeff: int = 1) -> "TreePolynomial":
        term = _TreeTerm(tuple(sorted(xs.items())), tuple(sorted(ts.items())))
        return TreePolynomial({term: coeff})

    def __add__(self, other: "TreePolynomial") -> "TreePolynomial":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return TreePolynomial(out)

    def mul_trunc(self, other: "TreePolynomial", p: int) -> "TreePolynomial":
        out: dict[_TreeTerm, int] = {}
        for t1, c1 in self.terms.items():
            for t2, c2 in other.terms.items():
                ts = dict(t1.ts)
                for j, m in t2.ts:
                    ts[j] = ts.get(j, 0) + m
                if sum((j - 1) * m for j, m in ts.items()) > p:
                    continue
                xs = dict(t1.xs)
                for i, m in t2.xs:
                    xs[i] = xs.get(i, 0) + m
                term = _TreeTerm(tuple(sorted(xs.items())),
                                 tuple(sorted(ts.items())))
                out[term] = out.get(term, 0) + c1 * c2
        return TreePolynomial(out)

    def pow_trunc(self, e: int, p: int) -> "TreePolynomial":
        out = TreePolynomial.mono({}, {})
        for _ in range(e):
            out = out.mul_trunc(self, p)
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TreePolynomial) and self.terms == other.terms


def tree_poly(p: int) -> TreePolynomial:
    """Fixed point of T = sum_j t_j (sum_i x_i T^(i-1))^(2j-1), truncated
    to total weight sum (j-1) p_j <= p."""
    T = TreePolynomial()
    for _ in range(p + 2):
        powers = [TreePolynomial.mono({}, {})]
        for _ in range(p + 1):
            powers.append(powers[-1].mul_trunc(T, p))
        inner = TreePolynomial()
        for i in range(1, p + 2):
            inner = inner + powers[i - 1].mul_trunc(
                TreePolynomial.mono({i: 1}, {}), p)
        new = TreePolynomial()
        for j in range(2, p + 2):
            new = new + inner.pow_trunc(2 * j - 1, p).mul_trunc(
                TreePolynomial.mono({}, {j: 1}), p)
        if new == T:
            break
        T = new
    else:
        raise ContractViolation("tree polynomial failed to stabilize")
    _check_tree_identities(T)
    return T


def _check_tree_identities(T: TreePolynomial) -> None:
    for term in T.terms:
        internal = sum(m for _, m in term.ts)
        leaves = 2 * sum(j * m for j, m in term.ts)
        if 1 + sum((i - 1) * m for i, m in term.xs) != internal:
            raise ContractViolation("tree identity (internal count) fails")
        if 1 + sum(i * m for i, m in term.xs) != leaves:
            raise ContractViolation("tree identity (leaf count) fails")


def _xz_mul(a: dict, b: dict, k: int) -> dict:
    out: dict[tuple[tuple[int, int], ...], dict[int, int]] = {}
    for xs1, z1 in a.items():
        for xs2, z2 in b.items():
            xs = dict(xs1)
            for i, m in xs2:
                xs[i] = xs.get(i, 0) + m
            key = tuple(sorted(xs.items()))
            tgt = out.setdefault(key, {})
            for za, ca in z1.items():
                for zb, cb in z2.items():
                    if za + zb <= k:
                        tgt[za + zb] = tgt.get(za + zb, 0) + ca * cb
    return out


def core_polynomial_via_trees(k: int) -> CorePolynomial:
    """Matching core polynomial recomputed through the tree bijection.

    Substitutes t_j <- (count of connected matchings with 2j vertices,
    marked by crossings), closes into sequences of trees with the root
    region marked by x_i, weights every monomial by 1 / n, and extracts
    the crossing-degree-k part.
    """
    if k < 1:
        raise ContractViolation("tree route needs k >= 1")
    table = connected_table(MATCHING, k)
    cm: dict[int, dict[int, int]] = {}
    for (kk, m), cnt in table.by_m.items():
        cm.setdefault(m, {})[kk] = cnt

    T = tree_poly(k)
    # t-substitution: each tree monomial becomes an x-vector with a
    # polynomial in the crossing marker z
    subbed: dict[tuple[tuple[int, int], ...], dict[int, int]] = {}
    for term, coeff in T.terms.items():
        zpoly = {0: coeff}
        for j, mult in term.ts:
            comp = cm.get(j, {})
            for _ in range(mult):
                nxt: dict[int, int] = {}
                for z1, c1 in zpoly.items():
                    for z2, c2 in comp.items():
                        if z1 + z2 <= k:
                            nxt[z1 + z2] = nxt.get(z1 + z2, 0) + c1 * c2
                zpoly = nxt
        if zpoly:
            acc = subbed.setdefault(term.xs, {})
            for z, c in zpoly.items():
                acc[z] = acc.get(z, 0) + c

    terms: dict[tuple[RegionProfile, int], Fraction] = {}
    power: dict = {(): {0: 1}}
    for i in range(1, 4 * k + 1):
        power = _xz_mul(power, subbed, k)
        if not power:
            break
        for xs, zpoly in power.items():
            c = zpoly.get(k, 0)
            if not c:
                continue
            xvec = dict(xs)
            xvec[i] = xvec.get(i, 0) + 1
            n = sum(ii * m for ii, m in xvec.items())
            prof = RegionProfile({(ii, 0): m for ii, m in xvec.items()})
            key = (prof, n // 2)
            terms[key] = terms.get(key, Fraction(0)) + Fraction(c, n)
    terms = {kk: v for kk, v in terms.items() if v}
    return CorePolynomial(MATCHING, k, terms)


# ---------------------------------------------------------------------------
# Potential function on cores.


def potential(core: ChordSystem) -> int:
    """Sum of (2i - 3) over regions with i > 1 arcs of the core's profile."""
    prof = _core_profile(core)
    return sum((2 * i - 3) * c for (i, j), c in prof.counts if i > 1)


def maximal_cores(family: Family, k: int) -> list[ChordSystem]:
    """Cores attaining the potential bound 2k - 3 (k >= 2 only)."""
    if k < 2:
        raise ContractViolation("potential bound needs k >= 2")
    bound = 2 * k - 3
    out = []
    for core in enumerate_cores(family, k):
        phi = potential(core)
        if phi > bound:
            raise ContractViolation(
                f"potential {phi} exceeds bound {bound} at k={k}")
        if phi == bound:
            out.append(core)
    return out
