"""Chord configurations on a disk.

A configuration lives on ``n`` labeled points ``1..n`` in counterclockwise
(ccw) order on a circle.  Its blocks are vertex sets: single chords for
matchings and chord diagrams, arbitrary parts for partitions, convex
polygons (hyperchords) in general.  This module owns the object model:
family validation rules, crossing counts with multiplicity, cores, exact
region profiles of cores, exhaustive generation, fast censuses, and the
canonical rotation used to identify unrooted shapes.

All geometry here is exact: circle points are parameterized by rational
tangent half-angles, so intersection coordinates are rational and face
traversal never sees a rounding error.
"""

from __future__ import annotations

import itertools
import json
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator, Mapping, Sequence

__all__ = [
    "ChordError",
    "ContractViolation",
    "ResourceBoundExceeded",
    "SizeSet",
    "Family",
    "MATCHING",
    "PARTITION",
    "DIAGRAM",
    "HYPERCHORD",
    "ChordSystem",
    "RegionProfile",
    "crossing_number",
    "blocks_cross_count",
    "core_of",
    "region_profile",
    "enumerate_all",
    "canonical_rotation",
    "rotate",
    "diagram_census",
    "matching_census",
]


class ChordError(Exception):
    """Base class for all package errors."""


class ContractViolation(ChordError):
    """An operation was fed input outside its documented domain."""


class ResourceBoundExceeded(ChordError):
    """A computation would exceed its documented practical bound."""


# ---------------------------------------------------------------------------
# Block-size sets


@dataclass(frozen=True)
class SizeSet:
    """An ultimately periodic set of positive integers.

    Membership is ``finite ∪ {b + j*period : b in base, j >= 0}``.  This
    covers every size restriction used by the package: finite sets such as
    ``{3}``, arithmetic families such as ``q, 2q, 3q, ...``, and the
    unrestricted set of all positive integers.
    """

    finite: tuple[int, ...] = ()
    base: tuple[int, ...] = ()
    period: int = 0

    def __post_init__(self) -> None:
        if any(s < 1 for s in self.finite) or any(s < 1 for s in self.base):
            raise ContractViolation("block sizes must be positive")
        if self.base and self.period < 1:
            raise ContractViolation("periodic part needs a positive period")
        if not self.base and self.period != 0:
            raise ContractViolation("period without a periodic base")
        if not self.finite and not self.base:
            raise ContractViolation("empty size set")
        fin = tuple(sorted(set(self.finite)))
        bas = tuple(sorted(set(self.base)))
        # keep the representation canonical: the finite part never repeats
        # something the periodic part already covers
        if bas:
            fin = tuple(s for s in fin if not self._periodic_contains(bas, self.period, s))
        object.__setattr__(self, "finite", fin)
        object.__setattr__(self, "base", bas)

    @staticmethod
    def _periodic_contains(base: tuple[int, ...], period: int, s: int) -> bool:
        return any(s >= b and (s - b) % period == 0 for b in base)

    @classmethod
    def of(cls, *sizes: int) -> "SizeSet":
        return cls(finite=tuple(sizes))

    @classmethod
    def multiples(cls, q: int) -> "SizeSet":
        """The set q, 2q, 3q, ..."""
        return cls(base=(q,), period=q)

    @classmethod
    def all_sizes(cls) -> "SizeSet":
        return cls(base=(1,), period=1)

    def __contains__(self, s: int) -> bool:
        if s in self.finite:
            return True
        return bool(self.base) and self._periodic_contains(self.base, self.period, s)

    @property
    def is_finite(self) -> bool:
        return not self.base

    def elements_up_to(self, bound: int) -> list[int]:
        out = {s for s in self.finite if s <= bound}
        for b in self.base:
            out.update(range(b, bound + 1, self.period))
        return sorted(out)

    def min_element(self) -> int:
        cands = list(self.finite) + list(self.base)
        return min(cands)

    def gcd(self) -> int:
        g = 0
        for s in self.finite:
            g = gcd(g, s)
        for b in self.base:
            g = gcd(g, b)
        if self.base:
            g = gcd(g, self.period)
        return g

    def power_sum(self, tau, r: int):
        """Sum of s^r * tau^s over the set, r in {0, 1, 2}.

        Works for any numeric tau with |tau| below the radius of the
        periodic part (exact for rationals, mpmath floats welcome).
        """
        if r not in (0, 1, 2):
            raise ContractViolation("power_sum supports r in {0,1,2}")
        total = 0
        for s in self.finite:
            total += (s ** r) * tau ** s
        for b in self.base:
            p = self.period
            u = tau ** p
            one = 1 - u
            if r == 0:
                total += tau ** b / one
            elif r == 1:
                total += tau ** b * (b / one + p * u / one ** 2)
            else:
                total += tau ** b * (
                    b * b / one + (2 * b * p + p * p) * u / one ** 2 + 2 * p * p * u * u / one ** 3
                )
        return total

    def tag_fragment(self) -> str:
        parts = [str(s) for s in self.finite]
        parts += [f"{b}N*" if b == self.period else f"{b}+{self.period}N" for b in self.base]
        return ",".join(parts)

    @classmethod
    def parse(cls, text: str) -> "SizeSet":
        finite: list[int] = []
        base: list[int] = []
        period = 0
        for frag in text.split(","):
            frag = frag.strip()
            m = re.fullmatch(r"(\d+)N\*", frag)
            m2 = re.fullmatch(r"(\d+)\+(\d+)N", frag)
            if m:
                b = int(m.group(1))
                if period and period != b:
                    raise ContractViolation("mixed periods in size set tag")
                base.append(b)
                period = b
            elif m2:
                b, p = int(m2.group(1)), int(m2.group(2))
                if period and period != p:
                    raise ContractViolation("mixed periods in size set tag")
                base.append(b)
                period = p
            elif re.fullmatch(r"\d+", frag):
                finite.append(int(frag))
            else:
                raise ContractViolation(f"bad size set fragment {frag!r}")
        return cls(finite=tuple(finite), base=tuple(base), period=period)

    def __str__(self) -> str:
        return "{" + self.tag_fragment() + "}"


# ---------------------------------------------------------------------------
# Families


_KINDS = ("matching", "partition", "diagram", "hyperchord")


@dataclass(frozen=True)
class Family:
    """A family of configurations: the validation rule for block structure.

    ``sizes`` restricts block cardinalities (partitions / hyperchords); the
    unrestricted families keep it ``None``.
    """

    kind: str
    sizes: SizeSet | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ContractViolation(f"unknown family kind {self.kind!r}")
        if self.sizes is not None and self.kind not in ("partition", "hyperchord"):
            raise ContractViolation("size restrictions apply to partitions and hyperchords only")

    # -- constructors -------------------------------------------------------

    @classmethod
    def matching(cls) -> "Family":
        return cls("matching")

    @classmethod
    def partition(cls, sizes: SizeSet | None = None) -> "Family":
        return cls("partition", sizes)

    @classmethod
    def diagram(cls) -> "Family":
        return cls("diagram")

    @classmethod
    def hyperchord(cls, sizes: SizeSet | None = None) -> "Family":
        return cls("hyperchord", sizes)

    # -- structure ----------------------------------------------------------

    @property
    def covers_vertices(self) -> bool:
        """Every vertex belongs to exactly one block."""
        return self.kind in ("matching", "partition")

    @property
    def blocks_are_pairs(self) -> bool:
        return self.kind in ("matching", "diagram")

    def allows_size(self, s: int) -> bool:
        if self.kind == "matching" or self.kind == "diagram":
            return s == 2
        if self.sizes is not None:
            return s in self.sizes
        return s >= 1

    @property
    def tag(self) -> str:
        if self.sizes is None:
            return self.kind
        return f"{self.kind}{{{self.sizes.tag_fragment()}}}"

    @classmethod
    def from_tag(cls, tag: str) -> "Family":
        m = re.fullmatch(r"([a-z]+)(?:\{([^{}]*)\})?", tag.strip())
        if not m:
            raise ContractViolation(f"bad family tag {tag!r}")
        kind, frag = m.group(1), m.group(2)
        sizes = SizeSet.parse(frag) if frag is not None else None
        return cls(kind, sizes)

    def __str__(self) -> str:
        return self.tag


MATCHING = Family.matching()
PARTITION = Family.partition()
DIAGRAM = Family.diagram()
HYPERCHORD = Family.hyperchord()


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class ChordSystem:
    """An immutable configuration: ``n`` circle points plus a block list.

    Equality is literal: same family, same ``n``, same set of blocks.
    Blocks are normalized to a sorted tuple of frozensets at construction,
    so two structurally equal systems compare and hash equal.
    """

    n: int
    blocks: tuple[frozenset[int], ...]
    family: Family

    def __init__(self, n: int, blocks, family: Family):
        norm = tuple(sorted((frozenset(b) for b in blocks), key=lambda b: tuple(sorted(b))))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "blocks", norm)
        object.__setattr__(self, "family", family)
        self._validate()

    def _validate(self) -> None:
        fam = self.family
        if self.n < 0:
            raise ContractViolation("negative vertex count")
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise ContractViolation("empty block")
            for v in b:
                if not (1 <= v <= self.n):
                    raise ContractViolation(f"vertex {v} outside 1..{self.n}")
            if not fam.allows_size(len(b)):
                raise ContractViolation(f"block size {len(b)} not allowed by {fam.tag}")
            if fam.covers_vertices:
                if b & seen:
                    raise ContractViolation("blocks must be disjoint")
                seen |= b
        if fam.covers_vertices and len(seen) != self.n:
            raise ContractViolation("blocks must cover every vertex")
        if len(set(self.blocks)) != len(self.blocks):
            raise ContractViolation("repeated block")

    # -- sizes --------------------------------------------------------------

    @property
    def m(self) -> int:
        """Number of blocks."""
        return len(self.blocks)

    # -- serialization ------------------------------------------------------

    def text(self) -> str:
        inner = ",".join("{" + ",".join(map(str, sorted(b))) + "}" for b in self.blocks)
        return f"family={self.family.tag}; n={self.n}; blocks=[{inner}]"

    @classmethod
    def from_text(cls, line: str) -> "ChordSystem":
        m = re.fullmatch(
            r"\s*family=([^;]+);\s*n=(\d+);\s*blocks=\[(.*)\]\s*", line
        )
        if not m:
            raise ContractViolation(f"unparsable configuration {line!r}")
        fam = Family.from_tag(m.group(1))
        n = int(m.group(2))
        body = m.group(3).strip()
        blocks = []
        if body:
            for part in re.findall(r"\{([^{}]*)\}", body):
                blocks.append(frozenset(int(v) for v in part.split(",") if v.strip()))
        return cls(n, blocks, fam)

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": self.family.tag,
                "n": self.n,
                "blocks": [sorted(b) for b in self.blocks],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, payload: str) -> "ChordSystem":
        data = json.loads(payload)
        return cls(data["n"], [frozenset(b) for b in data["blocks"]], Family.from_tag(data["family"]))


# ---------------------------------------------------------------------------
# Crossings


def blocks_cross_count(U: Sequence[int], V: Sequence[int]) -> int:
    """Crossings between two blocks, with multiplicity.

    Counts unordered pairs of chords, one pair from each block, whose
    endpoints strictly interleave around the circle.  Both inputs must be
    sorted ascending.  Shared vertices never interleave strictly, so they
    contribute nothing.
    """
    total = 0
    for a_idx in range(len(U)):
        u1 = U[a_idx]
        for b_idx in range(a_idx + 1, len(U)):
            u2 = U[b_idx]
            inside = bisect_left(V, u2) - bisect_right(V, u1)
            endpoints = (u1 in V) + (u2 in V)
            outside = len(V) - inside - endpoints
            total += inside * outside
    return total


def crossing_number(sys: ChordSystem) -> int:
    """Total crossings of a configuration, with multiplicity."""
    sorted_blocks = [sorted(b) for b in sys.blocks]
    total = 0
    for i in range(len(sorted_blocks)):
        for j in range(i + 1, len(sorted_blocks)):
            total += blocks_cross_count(sorted_blocks[i], sorted_blocks[j])
    return total


def core_of(sys: ChordSystem) -> ChordSystem:
    """Sub-configuration of the blocks involved in at least one crossing.

    Vertices are relabeled 1..n(core) in their original ccw order, which
    keeps the root on the same arc of the core.  A crossing-free input
    yields the empty configuration.
    """
    sorted_blocks = [sorted(b) for b in sys.blocks]
    crossing = [False] * len(sorted_blocks)
    for i in range(len(sorted_blocks)):
        for j in range(i + 1, len(sorted_blocks)):
            if crossing[i] and crossing[j]:
                continue
            if blocks_cross_count(sorted_blocks[i], sorted_blocks[j]):
                crossing[i] = crossing[j] = True
    kept = [b for b, c in zip(sorted_blocks, crossing) if c]
    verts = sorted({v for b in kept for v in b})
    relabel = {v: r + 1 for r, v in enumerate(verts)}
    return ChordSystem(len(verts), [frozenset(relabel[v] for v in b) for b in kept], sys.family)


# ---------------------------------------------------------------------------
# Region profiles


@dataclass(frozen=True)
class RegionProfile:
    """Counts of complement regions of a core, by (arcs, peaks).

    ``counts`` maps (i, j) to the number of regions with ``i`` boundary
    arcs and ``j`` peaks.  Regions touching the circle nowhere are not
    recorded.  Matching and partition cores only ever have j = 0.
    """

    counts: tuple[tuple[tuple[int, int], int], ...]

    def __init__(self, counts):
        items = tuple(sorted((tuple(k), int(v)) for k, v in dict(counts).items() if v))
        for (i, j), v in items:
            if i < 0 or j < 0 or (i, j) == (0, 0) or v < 0:
                raise ContractViolation(f"bad profile entry {(i, j)}: {v}")
        object.__setattr__(self, "counts", items)

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.counts)

    def count(self, i: int, j: int = 0) -> int:
        return dict(self.counts).get((i, j), 0)

    @property
    def n_total(self) -> int:
        """Vertex count recovered from the identity n = sum of i * n_{i,j}."""
        return sum(i * c for (i, j), c in self.counts)

    @property
    def peakless(self) -> bool:
        return all(j == 0 for (_, j), _ in self.counts)

    def vector(self) -> tuple[int, ...]:
        """(n_1, n_2, ..., n_max) for peakless profiles."""
        if not self.peakless:
            raise ContractViolation("vector form needs a peakless profile")
        if not self.counts:
            return ()
        top = max(i for (i, _), _ in self.counts)
        d = self.as_dict()
        return tuple(d.get((i, 0), 0) for i in range(1, top + 1))

    def monomial(self, with_peaks: bool) -> str:
        parts = []
        for (i, j), c in self.counts:
            name = f"x{i}_{j}" if with_peaks else f"x{i}"
            parts.append(name if c == 1 else f"{name}^{c}")
        return "*".join(parts)


class _Concurrency(Exception):
    """Three chords through one point at the current parameterization."""


def _point(t: Fraction) -> tuple[Fraction, Fraction]:
    d = 1 + t * t
    return (1 - t * t) / d, 2 * t / d


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _dir_key(d: tuple[Fraction, Fraction]):
    # exact ccw angle ordering starting just above direction (1, 0)
    upper = 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1
    return upper, d


def _angle_sort(dirs: list[tuple[tuple[Fraction, Fraction], int]]) -> list[int]:
    def cmp_key(item):
        (dx, dy), _ = item
        half = 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1
        return half

    halves: dict[int, list] = {0: [], 1: []}
    for item in dirs:
        halves[cmp_key(item)].append(item)
    out = []
    for h in (0, 1):
        bucket = halves[h]
        # within a half-plane, d1 precedes d2 ccw iff cross(d1, d2) > 0
        import functools

        def c(a, b):
            cr = a[0][0] * b[0][1] - a[0][1] * b[0][0]
            if cr > 0:
                return -1
            if cr < 0:
                return 1
            raise _Concurrency("collinear directions at a node")

        bucket.sort(key=functools.cmp_to_key(c))
        out.extend(idx for _, idx in bucket)
    return out


def _hull_edges(block: Sequence[int]) -> list[tuple[int, int]]:
    s = sorted(block)
    if len(s) == 2:
        return [(s[0], s[1])]
    return [(s[i], s[(i + 1) % len(s)]) for i in range(len(s))]


def region_profile(core: ChordSystem) -> RegionProfile:
    """Exact region profile of a core.

    Rejects input with a non-crossing block.  The construction places the
    vertices at rational points of the circle, computes the exact chord
    arrangement, and walks its faces; each complement region reports its
    number of boundary arcs and of peaks (isolated circle contacts).
    """
    if core.n == 0 and not core.blocks:
        return RegionProfile({})
    sorted_blocks = [sorted(b) for b in core.blocks]
    for i, U in enumerate(sorted_blocks):
        if not any(
            blocks_cross_count(U, V) for j, V in enumerate(sorted_blocks) if j != i
        ):
            raise ContractViolation("not a core: a block has no crossing")
    for attempt in range(6):
        try:
            counts = _profile_attempt(core, sorted_blocks, attempt)
        except _Concurrency:
            continue
        prof = RegionProfile(counts)
        if prof.n_total != core.n:
            raise ContractViolation(
                f"profile identity failed: {prof.n_total} != {core.n}"
            )
        if core.family.kind in ("matching", "partition") and not prof.peakless:
            raise ContractViolation("unexpected peaks in a matching/partition core")
        return prof
    raise ContractViolation("could not reach a concurrency-free placement")


def _profile_attempt(core: ChordSystem, sorted_blocks, attempt: int) -> dict:
    n = core.n

    def jitter(v: int) -> Fraction:
        if attempt == 0:
            return Fraction(0)
        return Fraction((v * 2654435761 + attempt * 40503) % 9973, 2 * 9973)

    tparam = {v: Fraction(v) + jitter(v) for v in range(1, n + 1)}
    pts: dict[object, tuple[Fraction, Fraction]] = {}
    for v in range(1, n + 1):
        pts[("v", v)] = _point(tparam[v])
    # one auxiliary circle point inside each arc keeps arcs off the chords
    for v in range(1, n + 1):
        w = v + 1 if v < n else 1
        t = tparam[v] + 1 if v == n else (tparam[v] + tparam[w]) / 2
        pts[("a", v)] = _point(t)

    # merge coincident hull edges; remember which fat blocks they bound
    seg_owner_toggle: dict[tuple[int, int], set[int]] = {}
    for bidx, blk in enumerate(sorted_blocks):
        for (u, w) in _hull_edges(blk):
            seg_owner_toggle.setdefault((u, w), set())
            if len(blk) >= 3:
                seg_owner_toggle[(u, w)].add(bidx)
    segments = sorted(seg_owner_toggle)

    # exact pairwise intersections of open segments
    hits: dict[int, list[tuple[Fraction, tuple[Fraction, Fraction]]]] = {
        i: [] for i in range(len(segments))
    }
    point_seen: dict[tuple[Fraction, Fraction], set[int]] = {}
    for i in range(len(segments)):
        (u1, w1) = segments[i]
        A, B = pts[("v", u1)], pts[("v", w1)]
        for j in range(i + 1, len(segments)):
            (u2, w2) = segments[j]
            if {u1, w1} & {u2, w2}:
                continue
            C, D = pts[("v", u2)], pts[("v", w2)]
            den = (B[0] - A[0]) * (D[1] - C[1]) - (B[1] - A[1]) * (D[0] - C[0])
            if den == 0:
                continue
            s = ((C[0] - A[0]) * (D[1] - C[1]) - (C[1] - A[1]) * (D[0] - C[0])) / den
            u = ((C[0] - A[0]) * (B[1] - A[1]) - (C[1] - A[1]) * (B[0] - A[0])) / den
            if 0 < s < 1 and 0 < u < 1:
                p = (A[0] + s * (B[0] - A[0]), A[1] + s * (B[1] - A[1]))
                owners = point_seen.setdefault(p, set())
                owners.update((i, j))
                if len(owners) > 2:
                    raise _Concurrency("three segments through one point")
                hits[i].append((s, p))
                hits[j].append((u, p))

    for p in point_seen:
        pts[("x", p)] = p

    # nodes and undirected edges of the arrangement
    edges: list[tuple[object, object, str, frozenset[int]]] = []
    for v in range(1, n + 1):
        w = v + 1 if v < n else 1
        edges.append((("v", v), ("a", v), "arc", frozenset()))
        edges.append((("a", v), ("v", w), "arc", frozenset()))
    for i, (u, w) in enumerate(segments):
        chain: list[object] = [("v", u)]
        for _, p in sorted(hits[i], key=lambda sp: sp[0]):
            chain.append(("x", p))
        chain.append(("v", w))
        tg = frozenset(seg_owner_toggle[(u, w)])
        for a, b in zip(chain, chain[1:]):
            edges.append((a, b, "chord", tg))

    incident: dict[object, list[tuple[int, int]]] = {}
    for eid, (a, b, _, _) in enumerate(edges):
        incident.setdefault(a, []).append((eid, 0))
        incident.setdefault(b, []).append((eid, 1))

    # rotation system: outgoing half-edges in exact ccw order at each node
    rotation: dict[object, list[tuple[int, int]]] = {}
    for node, halves in incident.items():
        p0 = pts[node]
        dirs = []
        for idx, (eid, side) in enumerate(halves):
            a, b, _, _ = edges[eid]
            other = b if side == 0 else a
            p1 = pts[other]
            dirs.append(((p1[0] - p0[0], p1[1] - p0[1]), idx))
        order = _angle_sort(dirs)
        rotation[node] = [halves[idx] for idx in order]

    # face traversal: each directed half-edge belongs to the face on its left
    half_face: dict[tuple[int, int], int] = {}
    faces: list[list[tuple[int, int]]] = []
    for start in list(incident):
        for h in rotation[start]:
            if h in half_face:
                continue
            cycle = []
            cur = h
            while cur not in half_face:
                half_face[cur] = len(faces)
                cycle.append(cur)
                eid, side = cur
                a, b, _, _ = edges[eid]
                head = b if side == 0 else a
                rev = (eid, 1 - side)
                ring = rotation[head]
                pos = ring.index(rev)
                cur = ring[pos - 1]
            faces.append(cycle)

    V = len(incident)
    E = len(edges)
    F = len(faces)
    if V - E + F != 2:
        raise ContractViolation(f"face traversal inconsistent: V-E+F = {V - E + F}")

    def face_area(cycle) -> Fraction:
        s = Fraction(0)
        for eid, side in cycle:
            a, b, _, _ = edges[eid]
            tail, head = (a, b) if side == 0 else (b, a)
            p, q = pts[tail], pts[head]
            s += p[0] * q[1] - p[1] * q[0]
        return s / 2

    areas = [face_area(c) for c in faces]
    outer = [f for f, ar in enumerate(areas) if ar < 0]
    if len(outer) != 1:
        raise ContractViolation("expected exactly one outer face")
    outer_face = outer[0]

    # hull membership states by breadth-first propagation across edges
    state: dict[int, frozenset[int]] = {outer_face: frozenset()}
    queue = [outer_face]
    while queue:
        f = queue.pop()
        for eid, side in faces[f]:
            g = half_face[(eid, 1 - side)]
            toggled = state[f] ^ edges[eid][3]
            if g in state:
                if state[g] != toggled:
                    raise ContractViolation("inconsistent hull membership")
            else:
                state[g] = toggled
                queue.append(g)
    if len(state) != F:
        raise ContractViolation("disconnected face adjacency")

    counts: dict[tuple[int, int], int] = {}
    for f, cycle in enumerate(faces):
        if f == outer_face or state[f]:
            continue
        arcs = 0
        peaks = 0
        L = len(cycle)
        for pos, (eid, side) in enumerate(cycle):
            a, b, kind, _ = edges[eid]
            tail = a if side == 0 else b
            if kind == "arc" and tail[0] == "a":
                arcs += 1
            if tail[0] == "v":
                prev_kind = edges[cycle[pos - 1][0]][2]
                if prev_kind == "chord" and kind == "chord":
                    peaks += 1
        if (arcs, peaks) != (0, 0):
            counts[(arcs, peaks)] = counts.get((arcs, peaks), 0) + 1
    return counts


# ---------------------------------------------------------------------------
# Exhaustive generation


_ENUM_BOUNDS = {"matching": 14, "partition": 11, "diagram": 8, "hyperchord": 4}


def enumerate_all(family: Family, n: int) -> Iterator[ChordSystem]:
    """Stream every configuration of the family on exactly n vertices.

    Practical bounds (raising ResourceBoundExceeded above them):
    matchings n <= 14, partitions n <= 11, diagrams n <= 8 (the n = 8
    stream is lazy but takes hours to drain; use diagram_census for
    counting), hyperchords n <= 4.
    """
    bound = _ENUM_BOUNDS[family.kind]
    if n > bound:
        raise ResourceBoundExceeded(f"{family.tag} enumeration bounded at n = {bound}")
    if n < 0:
        raise ContractViolation("negative n")
    if family.kind == "matching":
        if n % 2:
            return iter(())
        return _enumerate_matchings(family, n)
    if family.kind == "partition":
        return _enumerate_partitions(family, n)
    if family.kind == "diagram":
        return _enumerate_diagrams(family, n)
    return _enumerate_hyperchords(family, n)


def _enumerate_matchings(family: Family, n: int) -> Iterator[ChordSystem]:
    def rec(free: tuple[int, ...], acc: list[tuple[int, int]]) -> Iterator[ChordSystem]:
        if not free:
            yield ChordSystem(n, [frozenset(p) for p in acc], family)
            return
        a = free[0]
        rest = free[1:]
        for idx in range(len(rest)):
            b = rest[idx]
            acc.append((a, b))
            yield from rec(rest[:idx] + rest[idx + 1 :], acc)
            acc.pop()

    return rec(tuple(range(1, n + 1)), [])


def _enumerate_partitions(family: Family, n: int) -> Iterator[ChordSystem]:
    sizes = family.sizes

    def rec(v: int, blocks: list[list[int]]) -> Iterator[ChordSystem]:
        if v > n:
            if sizes is None or all(len(b) in sizes for b in blocks):
                yield ChordSystem(n, [frozenset(b) for b in blocks], family)
            return
        for b in blocks:
            b.append(v)
            yield from rec(v + 1, blocks)
            b.pop()
        blocks.append([v])
        yield from rec(v + 1, blocks)
        blocks.pop()

    return rec(1, [])


def _enumerate_diagrams(family: Family, n: int) -> Iterator[ChordSystem]:
    chords = list(itertools.combinations(range(1, n + 1), 2))
    for mask in range(1 << len(chords)):
        picked = [frozenset(chords[i]) for i in range(len(chords)) if mask >> i & 1]
        yield ChordSystem(n, picked, family)


def _enumerate_hyperchords(family: Family, n: int) -> Iterator[ChordSystem]:
    pool = []
    for r in range(1, n + 1):
        if family.sizes is not None and r not in family.sizes:
            continue
        pool.extend(frozenset(c) for c in itertools.combinations(range(1, n + 1), r))
    for mask in range(1 << len(pool)):
        picked = [pool[i] for i in range(len(pool)) if mask >> i & 1]
        yield ChordSystem(n, picked, family)


def rotate(sys: ChordSystem, r: int) -> ChordSystem:
    """Rotate labels by r steps ccw (vertex v becomes v + r, cyclically)."""
    if sys.n == 0:
        return sys
    return ChordSystem(
        sys.n,
        [frozenset((v - 1 + r) % sys.n + 1 for v in b) for b in sys.blocks],
        sys.family,
    )


def canonical_rotation(sys: ChordSystem) -> ChordSystem:
    """Lexicographically minimal representative over the n rotations.

    Reflections are deliberately not quotiented.
    """
    if sys.n == 0:
        return sys
    best = None
    best_key = None
    for r in range(sys.n):
        cand = rotate(sys, r)
        key = tuple(tuple(sorted(b)) for b in cand.blocks)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


# ---------------------------------------------------------------------------
# Fast censuses (brute-force oracles)


def matching_census(n: int) -> dict[int, int]:
    """Histogram of crossing numbers over all perfect matchings on n points.

    Pure recursion with incremental interleaving counts; practical to
    n = 16 (2 027 025 matchings).
    """
    if n > 16:
        raise ResourceBoundExceeded("matching census bounded at n = 16")
    if n % 2:
        return {}
    hist: dict[int, int] = {}

    def rec(free: tuple[int, ...], chords: list[tuple[int, int]], k: int) -> None:
        if not free:
            hist[k] = hist.get(k, 0) + 1
            return
        a = free[0]
        rest = free[1:]
        for idx in range(len(rest)):
            b = rest[idx]
            dk = 0
            for (c, d) in chords:
                # (a,b) interleaves (c,d) iff exactly one endpoint is inside (a,b)
                if (a < c < b) != (a < d < b):
                    dk += 1
            chords.append((a, b))
            rec(rest[:idx] + rest[idx + 1 :], chords, k + dk)
            chords.pop()

    rec(tuple(range(1, n + 1)), [], 0)
    return hist


def diagram_census(n: int) -> dict[tuple[int, int], int]:
    """Counts of chord diagrams on n vertices by (chord count, crossings).

    Vectorized meet-in-the-middle sweep over all 2^C(n,2) chord subsets;
    n = 8 (2^28 diagrams) takes seconds.  Cross-validated against literal
    enumeration for small n in the test suite.
    """
    if n > 8:
        raise ResourceBoundExceeded("diagram census bounded at n = 8")
    import numpy as np

    chords = list(itertools.combinations(range(1, n + 1), 2))
    C = len(chords)

    def interleaves(e, f) -> bool:
        (a, b), (c, d) = e, f
        if len({a, b, c, d}) < 4:
            return False
        return (a < c < b) != (a < d < b)

    cross_mask = [0] * C
    for i in range(C):
        for j in range(C):
            if i != j and interleaves(chords[i], chords[j]):
                cross_mask[i] |= 1 << j

    h = min(14, C)
    lowN, highN = h, C - h

    def self_counts(width: int, offset: int) -> list[int]:
        out = [0] * (1 << width)
        for mask in range(1, 1 << width):
            low = mask & -mask
            b = low.bit_length() - 1
            rest = mask ^ low
            within = (cross_mask[offset + b] >> offset) & ((1 << width) - 1)
            out[mask] = out[rest] + (within & rest).bit_count()
        return out

    k_low = np.array(self_counts(lowN, 0), dtype=np.int32)
    m_low = np.array([m.bit_count() for m in range(1 << lowN)], dtype=np.int32)
    k_high = self_counts(highN, lowN) if highN else [0]
    high_masks = range(1 << highN) if highN else [0]

    # bit matrix of low masks, used to batch the cross-split crossing counts
    bits = np.zeros((1 << lowN, lowN), dtype=np.float32)
    for b in range(lowN):
        bits[:, b] = (np.arange(1 << lowN) >> b) & 1
    cross_high_of_low = [cross_mask[b] >> lowN for b in range(lowN)]

    code_span = 4096  # m*128 + k stays well under this
    hist = np.zeros(code_span, dtype=np.int64)
    chunk = 1024
    high_list = list(high_masks)
    for c0 in range(0, len(high_list), chunk):
        block = high_list[c0 : c0 + chunk]
        w = np.zeros((lowN, len(block)), dtype=np.float32)
        kh = np.zeros(len(block), dtype=np.int32)
        mh = np.zeros(len(block), dtype=np.int32)
        for col, hm in enumerate(block):
            kh[col] = k_high[hm]
            mh[col] = hm.bit_count()
            for b in range(lowN):
                w[b, col] = (cross_high_of_low[b] & hm).bit_count()
        cross_split = (bits @ w).astype(np.int32)
        k_tot = cross_split + k_low[:, None] + kh[None, :]
        m_tot = m_low[:, None] + mh[None, :]
        codes = (m_tot << 7) + k_tot
        hist += np.bincount(codes.ravel(), minlength=code_span)
    out: dict[tuple[int, int], int] = {}
    for code in np.nonzero(hist)[0]:
        out[(int(code) >> 7, int(code) & 127)] = int(hist[code])
    return out
