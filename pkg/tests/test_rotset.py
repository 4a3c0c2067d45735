"""Tests for symmetric circle subsets: normalization, set algebra, scaling."""

from fractions import Fraction

import numpy as np
import pytest

from rotforce.rotset import RotSet, rotset_intersect, rotset_symmetrize, rotset_union

F = Fraction


def test_zero_always_present():
    s = RotSet.build()
    assert s.is_zero_only()
    assert s.contains(0) and s.contains(1) and s.contains(F(0))
    t = RotSet.from_points([F(1, 3)])
    assert t.contains(0)


def test_mirror_symmetry_of_points():
    s = RotSet.from_points([F(1, 5)])
    assert s.contains(F(4, 5))
    assert set(s.point_values()) == {F(0), F(1, 5), F(4, 5)}
    assert s.mirrored() == s


def test_mirror_symmetry_of_arcs():
    s = RotSet.from_intervals([(F(1, 10), F(2, 10))])
    assert s.contains(F(3, 20)) and s.contains(F(17, 20))
    assert not s.contains(F(1, 2))
    assert len(s.intervals) == 2


def test_full_circle_representations():
    full = RotSet.full()
    assert full.is_full()
    assert RotSet.build(intervals=[(0, 1)]) == full
    assert RotSet.build(intervals=[(0.0, 1.0)]) == full
    assert RotSet.build(intervals=[(F(1, 2), F(3, 2))]) == full
    assert RotSet.build(intervals=[(F(-1, 3), F(2, 3))]) == full
    # more than a full turn also covers everything
    assert RotSet.build(intervals=[(0.25, 1.75)]) == full


def test_full_circle_survives_scaling():
    # regression: a raw span of exactly 1 must not collapse to a point mod 1
    full = RotSet.full()
    assert full.scale_preimage(1) == full
    assert full.scale_image(1) == full
    assert full.scale_preimage(3) == full
    assert full.intersect(full) == full


def test_wrapping_arc_splits_at_zero():
    s = RotSet.build(intervals=[(F(9, 10), F(1, 10))])
    assert s.contains(0) and s.contains(F(19, 20)) and s.contains(F(1, 20))
    assert not s.contains(F(1, 2))
    for lo, hi in s.intervals:
        assert 0 <= lo <= hi <= 1


def test_degenerate_arc_is_a_point():
    s = RotSet.build(intervals=[(F(3, 10), F(3, 10))])
    assert s.intervals == ()
    assert s.contains(F(3, 10)) and s.contains(F(7, 10))


def test_points_absorbed_into_arcs():
    s = RotSet.build(points=[F(1, 4)], intervals=[(F(1, 5), F(3, 10))])
    assert s.point_values() == [F(0)]
    assert s.contains(F(1, 4))


def test_overlapping_arcs_merge():
    s = RotSet.build(intervals=[(F(1, 10), F(2, 10)), (F(15, 100), F(3, 10))])
    ups = [iv for iv in s.intervals if iv[1] <= F(1, 2)]
    assert ups == [(F(1, 10), F(3, 10))]


def test_exact_and_float_interop():
    a = RotSet.from_points([F(1, 4)])
    b = RotSet.from_points([0.25])
    assert a.contains(0.25) and b.contains(F(1, 4))
    assert a.intersect(b).contains(F(1, 4))


def test_union_and_intersect_basics():
    a = RotSet.from_intervals([(F(1, 10), F(3, 10))])
    b = RotSet.from_intervals([(F(2, 10), F(4, 10))])
    u = rotset_union(a, b)
    i = rotset_intersect(a, b)
    assert u.contains(F(1, 10)) and u.contains(F(4, 10))
    assert i.contains(F(25, 100))
    assert not i.contains(F(35, 100))
    assert i.is_subset(a) and i.is_subset(b)
    assert a.is_subset(u) and b.is_subset(u)


def test_intersect_reduces_to_boundary_point():
    a = RotSet.from_intervals([(F(1, 10), F(2, 10))])
    b = RotSet.from_intervals([(F(2, 10), F(3, 10))])
    i = a.intersect(b)
    assert i.intervals == ()
    assert F(2, 10) in set(i.point_values())


def test_scale_image_exact():
    s = RotSet.from_points([F(1, 6)])
    assert set(s.scale_image(2).point_values()) == {F(0), F(1, 3), F(2, 3)}
    arcs = RotSet.from_intervals([(F(1, 10), F(15, 100))]).scale_image(2)
    assert arcs.contains(F(1, 5)) and arcs.contains(F(3, 10))
    # sign never matters on a symmetric set
    assert s.scale_image(-2) == s.scale_image(2)


def test_scale_image_wide_arc_covers_circle():
    s = RotSet.from_intervals([(F(1, 10), F(5, 10))])
    assert s.scale_image(3) == RotSet.full()


def test_scale_preimage_exact():
    s = RotSet.from_points([F(1, 3)])
    pre = s.scale_preimage(2)
    expected = {F(0), F(1, 6), F(2, 6), F(4, 6), F(5, 6), F(1, 2)}
    assert expected <= set(pre.point_values())
    for p in pre.point_values():
        assert s.contains(2 * p)


def test_scale_roundtrip_subset_property():
    rng = np.random.default_rng(401)
    for _ in range(25):
        pts = [F(int(rng.integers(0, 12)), 12)]
        lo = float(rng.uniform(0, 1))
        s = RotSet.build(points=pts, intervals=[(lo, lo + float(rng.uniform(0, 0.2)))])
        for m in (2, 3, 5):
            assert s.is_subset(s.scale_preimage(m).scale_image(m))


def test_minkowski_points_and_arcs():
    a = RotSet.from_points([F(1, 4)])
    b = RotSet.from_intervals([(F(1, 10), F(2, 10))])
    m = a.minkowski(b)
    assert m.contains(F(1, 4) + F(15, 100))
    assert m.contains(F(15, 100))  # 0 in a keeps b inside
    wide = RotSet.from_intervals([(F(1, 10), F(6, 10))])
    assert wide.minkowski(wide) == RotSet.full()


def test_minkowski_contains_sampled_sums():
    rng = np.random.default_rng(409)
    a = RotSet.from_intervals([(0.1, 0.25)])
    b = RotSet.from_intervals([(0.05, 0.1)])
    m = a.minkowski(b)
    for _ in range(200):
        x = rng.uniform(0.1, 0.25)
        y = rng.uniform(0.05, 0.1)
        assert m.contains((x + y) % 1.0, tol=1e-12)


def test_subset_random_properties():
    rng = np.random.default_rng(419)
    for _ in range(30):
        xs = [float(rng.uniform(0, 1)) for _ in range(2)]
        a = RotSet.from_points(xs[:1])
        b = RotSet.from_points(xs)
        assert a.is_subset(b)
        assert RotSet.zero_only().is_subset(a)
        assert a.is_subset(RotSet.full())


def test_symmetrize_helper():
    s = rotset_symmetrize([(F(1, 8), F(1, 4))])
    assert s == RotSet.from_intervals([(F(1, 8), F(1, 4))])
    assert s.contains(F(3, 4))


def test_to_json_and_str_formats():
    s = RotSet.build(points=[F(1, 7)], intervals=[(0.25, 0.3)])
    d = s.to_json()
    assert "1/7" in d["points"] and "6/7" in d["points"] and "0" in d["points"]
    assert all(isinstance(iv, list) and len(iv) == 2 for iv in d["intervals"])
    text = str(s)
    assert text.startswith("{") and "1/7" in text


def test_contains_tolerance():
    s = RotSet.from_points([F(1, 3)])
    assert not s.contains(1 / 3 + 1e-9)
    assert s.contains(1 / 3 + 1e-9, tol=1e-8)
    assert s.contains(1e-10, tol=1e-9)  # wraps around 0


def test_equality_prefers_exact_endpoints():
    a = RotSet.build(intervals=[(F(1, 4), F(1, 2)), (0.25, 0.5)])
    assert a == RotSet.build(intervals=[(F(1, 4), F(1, 2))])


def test_preimage_by_zero_rejected():
    with pytest.raises(ValueError):
        RotSet.full().scale_preimage(0)
