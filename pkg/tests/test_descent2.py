from fractions import Fraction

import pytest

from app.arith.descent2 import (
    IDENTITY_PAIR,
    REAL_PLACE,
    SplitCurve,
    SquareClassPair,
    _check_group,
    candidate_pairs,
    descent_image,
    local_key,
    locally_solvable,
    places_for,
    rank_window,
    solvable_at,
    split_point_search,
    split_torsion,
    to_weierstrass,
    two_selmer,
)
from app.arith.elliptic import INFINITY, CurveQ, PointQ
from app.core.errors import PointNotOnCurveError, SelmerClosureError, UsageError

KNOWN_RANKS = {1: 0, 2: 0, 3: 0, 4: 0, 5: 1, 6: 1, 7: 1}


def congruent(N):
    return SplitCurve(0, N, -N)


def test_split_curve_needs_distinct_roots():
    with pytest.raises(UsageError):
        SplitCurve(1, 1, 2)
    assert SplitCurve(-1, 0, 1).disc_core == 4


def test_square_class_product():
    assert SquareClassPair(6, -1).times(SquareClassPair(10, -1)) == SquareClassPair(15, 1)
    with pytest.raises(UsageError):
        SquareClassPair(0, 1)


@pytest.mark.parametrize("roots, a, b, shift", [
    ((-1, 0, 1), -1, 0, 0),
    ((0, 5, -5), -25, 0, 0),
    ((0, 1, 2), -1, 0, 1),
])
def test_to_weierstrass(roots, a, b, shift):
    wt = to_weierstrass(SplitCurve(*roots))
    assert wt.curve == CurveQ(a, b)
    assert wt.shift == shift


def test_weierstrass_transport_round_trip():
    C = SplitCurve(0, 1, 2)
    wt = to_weierstrass(C)
    P = PointQ(2, 0)
    assert wt.to_split(wt.to_short(P)) == P
    assert wt.to_short(P) == PointQ(1, 0)
    assert wt.to_short(INFINITY) == INFINITY


def test_descent_image_examples():
    C = congruent(5)
    assert descent_image(C, PointQ(-4, 6)) == SquareClassPair(-1, -1)
    assert descent_image(C, PointQ(0, 0)) == SquareClassPair(-1, -5)
    assert descent_image(C, INFINITY) == IDENTITY_PAIR
    with pytest.raises(PointNotOnCurveError):
        descent_image(C, PointQ(1, 1))


def test_descent_image_at_each_root():
    C = SplitCurve(-1, 0, 1)
    assert descent_image(C, PointQ(-1, 0)) == SquareClassPair(2, -1)
    assert descent_image(C, PointQ(0, 0)) == SquareClassPair(1, -1)
    assert descent_image(C, PointQ(1, 0)) == SquareClassPair(2, 1)


@pytest.mark.parametrize("roots", [(-1, 0, 1), (0, 1, 2)])
def test_candidate_pairs(roots):
    cands = candidate_pairs(SplitCurve(*roots))
    assert len(cands) == 8
    assert IDENTITY_PAIR in cands
    assert {p.b1 for p in cands} == {-2, -1, 1, 2}
    assert {p.b2 for p in cands} == {-1, 1}


def test_candidate_pairs_split_by_root():
    # b1 | (0 - 5)(0 + 5) = -25, b2 | (5 - 0)(5 + 5) = 50
    cands = candidate_pairs(congruent(5))
    assert len(cands) == 32
    assert {p.b1 for p in cands} == {-5, -1, 1, 5}
    assert {p.b2 for p in cands} == {-10, -5, -2, -1, 1, 2, 5, 10}
    assert cands == sorted(cands)

    rep = two_selmer(congruent(5))
    assert len(rep.local_obstructions) == 24
    assert {p for p, _ in rep.local_obstructions}.isdisjoint(rep.accepted_pairs)


def test_places():
    assert places_for(SplitCurve(-1, 0, 1)) == [REAL_PLACE, 2]
    assert places_for(congruent(15)) == [REAL_PLACE, 2, 3, 5]


def test_real_place_obstruction():
    C = SplitCurve(-1, 0, 1)
    ok, place = locally_solvable(C, SquareClassPair(-1, -1))
    assert not ok and place == REAL_PLACE


def test_two_adic_obstruction():
    C = SplitCurve(-1, 0, 1)
    assert solvable_at(C, SquareClassPair(1, 2), REAL_PLACE)
    ok, place = locally_solvable(C, SquareClassPair(1, 2))
    assert not ok and place == 2


def test_identity_always_solvable():
    for N in range(1, 8):
        assert locally_solvable(congruent(N), IDENTITY_PAIR) == (True, None)


def test_point_image_is_solvable():
    assert locally_solvable(congruent(5), SquareClassPair(-1, -1)) == (True, None)


def test_local_key_depends_on_local_classes_only():
    assert local_key(SquareClassPair(3, -1), 5) == local_key(SquareClassPair(-7, 19), 5)
    assert local_key(SquareClassPair(3, 1), 2) != local_key(SquareClassPair(7, 1), 2)
    assert local_key(SquareClassPair(3, -2), REAL_PLACE) == (True, False)


def test_selmer_of_x3_minus_x():
    rep = two_selmer(SplitCurve(-1, 0, 1))
    assert set(rep.accepted_pairs) == {
        SquareClassPair(1, 1), SquareClassPair(1, -1), SquareClassPair(2, 1), SquareClassPair(2, -1),
    }
    assert (rep.selmer_dim, rep.selmer_rank_bound) == (2, 0)
    assert len(rep.accepted_pairs) + len(rep.local_obstructions) == 8


def test_selmer_json_shape():
    rep = two_selmer(congruent(5))
    js = rep.to_json()
    assert js["e"] == [0, 5, -5]
    assert js["rank_bound"] == 1
    assert js["dim"] == 3
    assert len(js["accepted"]) == 8
    assert all(set(o) == {"pair", "place"} for o in js["obstructions"])
    assert js["places"] == ["inf", 2, 5]


def test_selmer_same_for_any_worker_count():
    C = congruent(6)
    assert two_selmer(C, jobs=1) == two_selmer(C, jobs=2)


def test_closure_violation_detected():
    C = SplitCurve(-1, 0, 1)
    with pytest.raises(SelmerClosureError):
        _check_group([IDENTITY_PAIR, SquareClassPair(2, 1), SquareClassPair(1, -1)], C)
    with pytest.raises(SelmerClosureError):
        _check_group([IDENTITY_PAIR, SquareClassPair(2, 1), SquareClassPair(1, -1), SquareClassPair(3, 3)], C)
    with pytest.raises(SelmerClosureError):
        _check_group([SquareClassPair(2, 1)], C)


def test_rank_window_examples():
    w = rank_window(congruent(5), 10)
    assert (w.lower, w.upper, w.certified) == (1, 1, "rank-certified-1")
    assert not split_torsion(congruent(5), w.witness).is_torsion

    w = rank_window(SplitCurve(-1, 0, 1), 10)
    assert (w.lower, w.upper, w.certified) == (0, 0, "rank-certified-0")
    assert w.witness is None


def test_rank_window_uses_supplied_point():
    w = rank_window(congruent(5), 0, point=PointQ(-4, 6))
    assert w.lower == 1 and w.witness == PointQ(-4, 6)


def test_split_point_search_on_shifted_model():
    C = SplitCurve(0, 1, 2)
    found = split_point_search(C, 5)
    for x in (0, 1, 2):
        assert PointQ(x, 0) in found
    assert all(C.contains(P) for P in found)


@pytest.mark.slow
@pytest.mark.parametrize("N, rank", sorted(KNOWN_RANKS.items()))
def test_known_rank_suite(N, rank):
    C = congruent(N)
    rep = two_selmer(C)
    assert rep.selmer_rank_bound == rank
    # parity of the bound against the rank, kept as data
    assert rep.selmer_rank_bound % 2 == rank % 2

    w = rank_window(C, 50)
    assert w.lower <= w.upper
    if rank == 1:
        assert (w.lower, w.upper, w.certified) == (1, 1, "rank-certified-1")


@pytest.mark.slow
@pytest.mark.parametrize("N", sorted(KNOWN_RANKS))
def test_descent_soundness(N):
    C = congruent(N)
    rep = two_selmer(C)
    accepted = set(rep.accepted_pairs)
    n = len(accepted)
    assert n & (n - 1) == 0 and IDENTITY_PAIR in accepted
    for a in accepted:
        for b in accepted:
            assert a.times(b) in accepted
    for e in C.roots:
        assert descent_image(C, PointQ(e, 0)) in accepted
    for P in split_point_search(C, 50):
        assert descent_image(C, P) in accepted


def test_fraction_points_map_to_classes():
    C = congruent(5)
    P = PointQ(Fraction(1681, 144), Fraction(-62279, 1728))
    assert C.contains(P)
    assert descent_image(C, P) == IDENTITY_PAIR
