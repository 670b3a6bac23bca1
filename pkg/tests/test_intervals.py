import random

import pytest

from coca.intervals import (
    EMPTY,
    EMPTY_SET,
    FULL,
    Interval,
    IntervalSet,
    closed,
    format_interval,
    format_interval_set,
    interval,
    is_closure,
    is_contains,
    is_intersect,
    is_minkowski_update,
    is_union,
    iv_closure,
    iv_intersect,
    iv_minkowski_update,
    parse_interval,
    point,
)
from coca.rational import NEG_INF, POS_INF, rat


def ivs(*specs):
    return IntervalSet(
        interval(rat(lo), rat(hi), lc, hc) for lo, hi, lc, hc in specs
    )


# -- single intervals ---------------------------------------------------------


def test_canonicalization_of_degenerate():
    assert interval(rat(3), rat(3), False, True).is_empty()
    assert interval(rat(3), rat(2), True, True) == EMPTY
    assert interval(rat(3), rat(3), True, True) == point(rat(3))


def test_minkowski_update_positive():
    assert iv_minkowski_update(closed(rat(0), rat(5)), rat(3)) == interval(
        rat(0), rat(8), False, True
    )


def test_minkowski_update_negative():
    assert iv_minkowski_update(closed(rat(0), rat(5)), rat(-2)) == interval(
        rat(-2), rat(5), True, False
    )


def test_minkowski_update_zero_and_empty():
    box = closed(rat(0), rat(5))
    assert iv_minkowski_update(box, rat(0)) == box
    assert iv_minkowski_update(EMPTY, rat(4)) == EMPTY


def test_closure():
    assert iv_closure(interval(rat(3), rat(5), False, False)) == closed(
        rat(3), rat(5)
    )
    assert iv_closure(FULL) == FULL
    assert iv_closure(EMPTY) == EMPTY


def test_intersect():
    a = interval(rat(2), rat(4), False, True)
    b = closed(rat(4), rat(10))
    assert iv_intersect(a, b) == point(rat(4))
    assert iv_intersect(a, closed(rat(5), rat(6))) == EMPTY
    assert iv_intersect(FULL, a) == a


# -- interval sets ------------------------------------------------------------


def test_union_merges_adjacent():
    left = ivs((3, 4, True, True))
    right = IntervalSet(
        [interval(rat(4), rat(5), False, False), interval(rat(5), POS_INF, False, False)]
    )
    got = is_union(left, right)
    assert got.parts == (
        interval(rat(3), rat(5), True, False),
        interval(rat(5), POS_INF, False, False),
    )


def test_union_empty():
    assert is_union(EMPTY_SET, EMPTY_SET) == EMPTY_SET


def test_union_keeps_gap_point():
    got = is_union(ivs((0, 1, True, False)), ivs((1, 2, False, True)))
    assert len(got.parts) == 2
    assert not is_contains(got, rat(1))


def test_pointwise_update_then_clip():
    s = ivs((0, 1, True, True), (3, 4, True, True))
    got = is_intersect(is_minkowski_update(s, rat(1)), closed(rat(0), rat(2)))
    assert got.parts == (interval(rat(0), rat(2), False, True),)


def test_contains_boundary():
    s = IntervalSet(
        [interval(rat(3), rat(5), True, False), interval(rat(5), POS_INF, False, False)]
    )
    assert not is_contains(s, rat(5))
    assert is_contains(s, rat(100))


def test_set_closure():
    s = ivs((0, 1, False, False), (1, 2, False, True))
    assert is_closure(s).parts == (closed(rat(0), rat(2)),)


# -- parse/format -------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    ["[-5,15]", "(2,4]", "(-inf,5)", "(-inf,inf)", "[1/2,3/4)", "empty"],
)
def test_parse_format_round_trip(text):
    assert format_interval(parse_interval(text)) == text


def test_parse_degenerate_is_empty():
    assert parse_interval("(3,3]") == EMPTY
    assert format_interval(EMPTY) == "empty"


def test_parse_decimal_exact():
    got = parse_interval("[0.25,0.75)")
    assert got == interval(rat("1/4"), rat("3/4"), True, False)


def test_parse_rejects_malformed():
    for bad in ("", "[1,2", "1,2]", "[a,b]", "[1;2]", "[1,2,3]"):
        with pytest.raises(ValueError):
            parse_interval(bad)


def test_format_set():
    s = IntervalSet([closed(rat(3), rat(4)), interval(rat(5), POS_INF, False, False)])
    assert format_interval_set(s) == "[3,4] u (5,inf)"
    assert format_interval_set(EMPTY_SET) == "{}"


# -- algebraic properties (randomized, fixed seeds) ---------------------------


def random_interval(rng):
    lo = rat(rng.randint(-10, 10))
    hi = lo + rat(rng.randint(0, 8))
    if rng.random() < 0.15:
        return interval(NEG_INF, hi, False, rng.random() < 0.5)
    if rng.random() < 0.15:
        return interval(lo, POS_INF, rng.random() < 0.5, False)
    return interval(lo, hi, rng.random() < 0.5, rng.random() < 0.5)


def test_normalization_idempotent():
    rng = random.Random(7)
    for _ in range(300):
        parts = [random_interval(rng) for _ in range(rng.randint(0, 5))]
        once = IntervalSet(parts)
        assert IntervalSet(once.parts) == once


def sample_points(s, rng):
    pts = []
    for part in s.parts:
        for e in (part.lo, part.hi):
            if e not in (NEG_INF, POS_INF):
                for d in (rat(-1), rat(0), rat("1/2"), rat(1)):
                    pts.append(e + d)
    pts.extend(rat(rng.randint(-15, 15)) for _ in range(10))
    return pts


def test_structural_equality_matches_membership():
    rng = random.Random(11)
    for _ in range(200):
        a = IntervalSet(random_interval(rng) for _ in range(rng.randint(0, 4)))
        b = IntervalSet(random_interval(rng) for _ in range(rng.randint(0, 4)))
        u1, u2 = is_union(a, b), is_union(b, a)
        assert u1 == u2
        for x in sample_points(u1, rng):
            assert is_contains(u1, x) == (is_contains(a, x) or is_contains(b, x))


def test_no_point_in_three_part_closures():
    rng = random.Random(13)
    for _ in range(200):
        s = IntervalSet(random_interval(rng) for _ in range(6))
        cls = [iv_closure(p) for p in s.parts]
        for i in range(len(cls)):
            for j in range(i + 1, len(cls)):
                both = iv_intersect(cls[i], cls[j])
                if both.is_empty():
                    continue
                for k in range(len(cls)):
                    if k in (i, j):
                        continue
                    assert iv_intersect(both, cls[k]).is_empty()


def test_miun_part_bound_and_endpoint_anchoring():
    # Starting from a singleton and applying update/intersect/union with
    # guards from a fixed palette, every part's closure touches a palette
    # endpoint (or the seed), and part counts stay within 4*(#guards+1).
    rng = random.Random(17)
    for trial in range(120):
        palette = [random_interval(rng) for _ in range(rng.randint(1, 3))]
        palette = [g for g in palette if not g.is_empty()] or [FULL]
        a = rat(rng.randint(-5, 5))
        anchors = {a}
        for g in palette:
            for e in (g.lo, g.hi):
                if e not in (NEG_INF, POS_INF):
                    anchors.add(e)
        s = IntervalSet.of(point(a))
        history = [s]
        for _ in range(rng.randint(1, 12)):
            op = rng.randrange(3)
            if op == 0:
                s = is_minkowski_update(s, rat(rng.randint(-3, 3)))
            elif op == 1:
                s = is_intersect(s, rng.choice(palette))
            else:
                s = is_union(s, rng.choice(history))
            history.append(s)
            assert len(s.parts) <= 4 * (len(palette) + 1)
            for part in s.parts:
                c = iv_closure(part)
                assert any(c.contains(e) for e in anchors)
