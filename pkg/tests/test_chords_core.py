"""Object model: crossings, cores, region profiles, generation."""

import itertools
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from chordk.chords_core import (
    DIAGRAM,
    HYPERCHORD,
    MATCHING,
    PARTITION,
    ChordSystem,
    ContractViolation,
    Family,
    RegionProfile,
    ResourceBoundExceeded,
    SizeSet,
    canonical_rotation,
    core_of,
    crossing_number,
    diagram_census,
    enumerate_all,
    matching_census,
    region_profile,
    rotate,
)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for v in row:
            new.append(new[-1] + v)
        row = new
    return row[0]


def double_factorial_odd(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# ---------------------------------------------------------------------------
# crossing_number


def test_single_crossing_pair():
    assert crossing_number(ChordSystem(4, [{1, 3}, {2, 4}], MATCHING)) == 1


def test_shared_endpoint_never_crosses():
    assert crossing_number(ChordSystem(4, [{1, 3}, {1, 4}], DIAGRAM)) == 0
    assert crossing_number(ChordSystem(4, [{1, 3}, {3, 4}], DIAGRAM)) == 0


def test_nested_and_disjoint_chords_do_not_cross():
    assert crossing_number(ChordSystem(4, [{1, 4}, {2, 3}], MATCHING)) == 0
    assert crossing_number(ChordSystem(4, [{1, 2}, {3, 4}], MATCHING)) == 0


def test_two_triangles_cross_six_times():
    assert crossing_number(ChordSystem(6, [{1, 3, 5}, {2, 4, 6}], HYPERCHORD)) == 6


def test_triangle_pair_crossings_zero_or_two():
    fam = Family.hyperchord()
    seen = set()
    for tri in itertools.combinations(range(1, 6), 3):
        rest = [v for v in range(1, 6) if v not in tri]
        pair = frozenset(rest[:2])
        k = crossing_number(ChordSystem(5, [frozenset(tri), pair], fam))
        seen.add(k)
    assert seen <= {0, 2}
    assert 2 in seen


def test_crossing_invariant_under_rotation():
    sys = ChordSystem(8, [{1, 4, 6}, {2, 7}, {3, 5, 8}], PARTITION)
    k = crossing_number(sys)
    for r in range(8):
        assert crossing_number(rotate(sys, r)) == k


# ---------------------------------------------------------------------------
# core_of


def test_crossing_free_input_has_empty_core():
    sys = ChordSystem(6, [{1, 2}, {3, 6}, {4, 5}], MATCHING)
    core = core_of(sys)
    assert core.n == 0 and core.blocks == ()


def test_core_drops_noncrossing_chord_and_relabels():
    sys = ChordSystem(6, [{1, 3}, {2, 4}, {5, 6}], MATCHING)
    core = core_of(sys)
    assert core.n == 4
    assert set(core.blocks) == {frozenset({1, 3}), frozenset({2, 4})}


def test_core_preserves_cyclic_order():
    sys = ChordSystem(8, [{2, 6}, {4, 8}, {1, 2}, {5, 6}], DIAGRAM)
    # chords {1,2} and {5,6} cross nothing (shared endpoints never cross)
    core = core_of(sys)
    assert core.n == 4
    assert set(core.blocks) == {frozenset({1, 3}), frozenset({2, 4})}


def test_core_of_core_is_identity():
    sys = ChordSystem(6, [{1, 4}, {2, 5}, {3, 6}], MATCHING)
    core = core_of(sys)
    assert core == core_of(core)


# ---------------------------------------------------------------------------
# region_profile


def test_profile_of_single_crossing():
    p = region_profile(ChordSystem(4, [{1, 3}, {2, 4}], MATCHING))
    assert p.as_dict() == {(1, 0): 4}
    assert p.vector() == (4,)


def test_profile_ignores_fully_interior_region():
    # three pairwise crossing chords leave a central triangle touching no arc
    p = region_profile(ChordSystem(6, [{1, 4}, {2, 5}, {3, 6}], MATCHING))
    assert p.as_dict() == {(1, 0): 6}


def test_profile_two_crossing_pairs():
    p = region_profile(ChordSystem(8, [{1, 3}, {2, 4}, {5, 7}, {6, 8}], MATCHING))
    assert p.as_dict() == {(1, 0): 6, (2, 0): 1}


def test_profile_large_matching_core():
    sys = ChordSystem(
        24,
        [
            {1, 3}, {2, 4}, {5, 11}, {6, 12}, {7, 9}, {8, 10},
            {13, 23}, {14, 24}, {15, 17}, {16, 19}, {18, 21}, {20, 22},
        ],
        MATCHING,
    )
    assert crossing_number(sys) == 7
    core = core_of(sys)
    assert core.n == 24
    assert region_profile(core).as_dict() == {(1, 0): 17, (2, 0): 2, (3, 0): 1}


def test_profile_large_partition_core():
    sys = ChordSystem(
        20,
        [
            {1, 3, 5}, {2, 4}, {6, 8, 10}, {7, 9},
            {11, 19}, {12, 20}, {13, 14, 16}, {15, 17, 18},
        ],
        PARTITION,
    )
    assert crossing_number(sys) == 9
    core = core_of(sys)
    assert core.n == 20 and core.m == 8
    assert region_profile(core).as_dict() == {(1, 0): 15, (2, 0): 1, (3, 0): 1}


def test_profile_diagram_with_peak():
    p = region_profile(ChordSystem(5, [{1, 3}, {2, 4}, {2, 5}], DIAGRAM))
    assert p.as_dict() == {(0, 1): 1, (1, 0): 5}


def test_profile_rejects_non_core():
    with pytest.raises(ContractViolation):
        region_profile(ChordSystem(6, [{1, 3}, {2, 4}, {5, 6}], MATCHING))


def test_profile_empty_core():
    assert region_profile(ChordSystem(0, [], MATCHING)).as_dict() == {}


def test_profile_vertex_identity_over_small_matching_cores():
    for sys in enumerate_all(MATCHING, 8):
        core = core_of(sys)
        if core.n == 0:
            continue
        p = region_profile(core)
        assert p.n_total == core.n
        assert p.peakless


def test_profile_rotation_invariance():
    sys = ChordSystem(6, [{1, 4}, {2, 6}, {3, 5}], MATCHING)
    base = region_profile(sys).as_dict()
    for r in range(6):
        assert region_profile(rotate(sys, r)).as_dict() == base


# ---------------------------------------------------------------------------
# enumerate_all


def test_matching_count_is_double_factorial():
    for n in (2, 4, 6, 8):
        assert sum(1 for _ in enumerate_all(MATCHING, n)) == double_factorial_odd(n - 1)


def test_partition_count_is_bell_number():
    for n in (1, 2, 3, 4, 5):
        assert sum(1 for _ in enumerate_all(PARTITION, n)) == bell(n)


def test_diagram_count_is_power_of_two():
    for n in (2, 3, 4):
        assert sum(1 for _ in enumerate_all(DIAGRAM, n)) == 2 ** comb(n, 2)


def test_hyperchord_count_n2():
    assert sum(1 for _ in enumerate_all(HYPERCHORD, 2)) == 8


def test_restricted_partition_enumeration():
    fam = Family.partition(SizeSet.of(3))
    got = sum(1 for _ in enumerate_all(fam, 6))
    # choose the block of vertex 1, then the remaining triple is forced
    assert got == comb(5, 2)


def test_enumeration_bound_raises():
    with pytest.raises(ResourceBoundExceeded):
        enumerate_all(MATCHING, 16)
    with pytest.raises(ResourceBoundExceeded):
        enumerate_all(DIAGRAM, 9)


def test_enumerated_objects_validate():
    for sys in enumerate_all(PARTITION, 4):
        assert sys.n == 4
        assert sum(len(b) for b in sys.blocks) == 4


# ---------------------------------------------------------------------------
# canonical_rotation


def test_canonical_rotation_is_idempotent_and_invariant():
    for sys in itertools.islice(enumerate_all(MATCHING, 8), 40):
        c = canonical_rotation(sys)
        assert canonical_rotation(c) == c
        for r in range(sys.n):
            assert canonical_rotation(rotate(sys, r)) == c


def test_canonical_rotation_keeps_reflections_distinct():
    a = ChordSystem(5, [{1, 2}, {3, 5}], DIAGRAM)
    b = ChordSystem(5, [{1, 2}, {3, 4}], DIAGRAM)  # reflection of a
    orbits_a = {canonical_rotation(rotate(a, r)) for r in range(5)}
    assert len(orbits_a) == 1
    assert canonical_rotation(b) not in orbits_a


# ---------------------------------------------------------------------------
# serialization


def test_text_round_trip():
    sys = ChordSystem(6, [{1, 3, 5}, {2, 4}, {6}], PARTITION)
    assert sys.text() == "family=partition; n=6; blocks=[{1,3,5},{2,4},{6}]"
    assert ChordSystem.from_text(sys.text()) == sys


def test_json_round_trip():
    sys = ChordSystem(5, [{1, 3}, {2, 4}, {2, 5}], DIAGRAM)
    assert ChordSystem.from_json(sys.to_json()) == sys


def test_family_tag_round_trip():
    for tag in ("matching", "partition", "diagram", "hyperchord",
                "partition{3}", "partition{2,4}", "partition{3N*}",
                "hyperchord{2}"):
        assert Family.from_tag(tag).tag == tag


def test_empty_system_text():
    sys = ChordSystem(3, [], DIAGRAM)
    assert ChordSystem.from_text(sys.text()) == sys


# ---------------------------------------------------------------------------
# validation


def test_matching_must_cover():
    with pytest.raises(ContractViolation):
        ChordSystem(4, [{1, 3}], MATCHING)


def test_matching_rejects_overlap():
    with pytest.raises(ContractViolation):
        ChordSystem(4, [{1, 3}, {1, 4}, {2, 4}], MATCHING)


def test_diagram_rejects_repeated_chord():
    with pytest.raises(ContractViolation):
        ChordSystem(4, [{1, 3}, {1, 3}], DIAGRAM)


def test_partition_size_restriction_enforced():
    fam = Family.partition(SizeSet.of(3))
    with pytest.raises(ContractViolation):
        ChordSystem(5, [{1, 2, 3}, {4, 5}], fam)


def test_vertex_out_of_range():
    with pytest.raises(ContractViolation):
        ChordSystem(4, [{1, 5}, {2, 3}], DIAGRAM)


# ---------------------------------------------------------------------------
# size sets


def test_size_set_membership():
    s = SizeSet.multiples(3)
    assert 3 in s and 9 in s and 4 not in s
    assert s.gcd() == 3
    assert s.elements_up_to(10) == [3, 6, 9]


def test_size_set_power_sums_match_direct_summation():
    s = SizeSet.multiples(4)
    tau = Fraction(1, 3)
    for r in (0, 1, 2):
        direct = sum((4 * j) ** r * tau ** (4 * j) for j in range(1, 120))
        assert abs(s.power_sum(tau, r) - direct) < Fraction(1, 10 ** 50)


def test_size_set_all_sizes():
    s = SizeSet.all_sizes()
    assert all(v in s for v in range(1, 30))


# ---------------------------------------------------------------------------
# censuses


def test_matching_census_small():
    assert matching_census(2) == {0: 1}
    assert matching_census(4) == {0: 2, 1: 1}
    assert matching_census(6) == {0: 5, 1: 6, 2: 3, 3: 1}


def test_matching_census_matches_enumeration():
    for n in (6, 8):
        hist = {}
        for sys in enumerate_all(MATCHING, n):
            k = crossing_number(sys)
            hist[k] = hist.get(k, 0) + 1
        assert matching_census(n) == hist


def test_diagram_census_matches_enumeration():
    for n in (3, 4, 5):
        lit = {}
        for sys in enumerate_all(DIAGRAM, n):
            key = (sys.m, crossing_number(sys))
            lit[key] = lit.get(key, 0) + 1
        assert diagram_census(n) == lit


def test_diagram_census_total():
    dc = diagram_census(6)
    assert sum(dc.values()) == 2 ** comb(6, 2)


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_random_diagram_crossings_rotation_invariant(data):
    n = data.draw(st.integers(3, 8))
    pool = list(itertools.combinations(range(1, n + 1), 2))
    picked = data.draw(st.sets(st.sampled_from(pool), max_size=6))
    sys = ChordSystem(n, [frozenset(c) for c in picked], DIAGRAM)
    k = crossing_number(sys)
    r = data.draw(st.integers(0, n - 1))
    assert crossing_number(rotate(sys, r)) == k


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_random_core_profile_identity(data):
    n = data.draw(st.integers(4, 9))
    pool = list(itertools.combinations(range(1, n + 1), 2))
    picked = data.draw(st.sets(st.sampled_from(pool), min_size=2, max_size=5))
    sys = ChordSystem(n, [frozenset(c) for c in picked], DIAGRAM)
    core = core_of(sys)
    if core.n == 0:
        return
    p = region_profile(core)
    assert p.n_total == core.n


def test_region_profile_monomial_text():
    p = RegionProfile({(1, 0): 6, (2, 0): 1})
    assert p.monomial(with_peaks=False) == "x1^6*x2"
    assert p.monomial(with_peaks=True) == "x1_0^6*x2_0"
