import pytest
from hypothesis import given
from hypothesis import strategies as st

from paramcad.dsl import list_builtin
from paramcad.ergonomics import (BUILDS, BodyProfile, RecommendedRange,
                                 known_tags, recommend, reconcile)
from paramcad.errors import EmptyProfileList, InvalidProfile, UnknownTag

profiles = st.builds(BodyProfile,
                     stature=st.floats(1.0, 2.3, allow_nan=False),
                     build=st.sampled_from(BUILDS))


class TestProfile:
    def test_stature_bounds(self):
        with pytest.raises(InvalidProfile):
            BodyProfile(0.9)
        with pytest.raises(InvalidProfile):
            BodyProfile(2.4)

    def test_build_checked(self):
        with pytest.raises(InvalidProfile):
            BodyProfile(1.7, "gigantic")


class TestRecommend:
    def test_seat_height_proportional(self):
        r = recommend("seat_height", BodyProfile(1.77))
        assert r.lo == pytest.approx(0.23 * 1.77)
        assert r.hi == pytest.approx(0.27 * 1.77)

    def test_fixed_band_scaled_by_build(self):
        slim = recommend("seat_width_per_person", BodyProfile(1.7, "slim"))
        broad = recommend("seat_width_per_person", BodyProfile(1.7, "broad"))
        assert slim.lo == pytest.approx(0.55 * 0.9)
        assert broad.hi == pytest.approx(0.65 * 1.1)

    def test_unknown_tag(self):
        with pytest.raises(UnknownTag):
            recommend("hat_size", BodyProfile(1.7))

    @given(st.sampled_from(known_tags()), profiles)
    def test_ranges_are_ordered_and_positive(self, tag, profile):
        r = recommend(tag, profile)
        assert 0 < r.lo <= r.hi
        assert not r.compromise

    @given(profiles, profiles)
    def test_taller_never_gets_lower_range(self, a, b):
        if a.stature > b.stature:
            a, b = b, a
        ra = recommend("table_height", a)
        rb = recommend("table_height", b)
        assert rb.lo >= ra.lo and rb.hi >= ra.hi


class TestReconcile:
    def test_empty_list(self):
        with pytest.raises(EmptyProfileList):
            reconcile("seat_height", [])

    def test_single_profile_matches_recommend(self):
        p = BodyProfile(1.6)
        assert reconcile("seat_height", [p]) == recommend("seat_height", p)

    def test_overlapping_intersection(self):
        r = reconcile("seat_height", [BodyProfile(1.6), BodyProfile(1.7)])
        assert r.lo == pytest.approx(0.23 * 1.7)
        assert r.hi == pytest.approx(0.27 * 1.6)
        assert not r.compromise

    def test_disjoint_ranges_flag_compromise(self):
        r = reconcile("seat_height", [BodyProfile(1.0), BodyProfile(2.3)])
        assert r.compromise
        assert r.lo == pytest.approx(0.27 * 1.0)
        assert r.hi == pytest.approx(0.23 * 2.3)

    def test_seat_width_adds_per_person(self):
        pair = [BodyProfile(1.7), BodyProfile(1.8, "broad")]
        r = reconcile("seat_width_per_person", pair)
        assert r.lo == pytest.approx(0.55 + 0.55 * 1.1)
        assert r.hi == pytest.approx(0.65 + 0.65 * 1.1)

    @given(st.sampled_from(known_tags()),
           st.lists(profiles, min_size=1, max_size=5))
    def test_reconcile_always_well_formed(self, tag, group):
        r = reconcile(tag, group)
        assert isinstance(r, RecommendedRange)
        assert r.lo <= r.hi


def test_catalog_tags_resolve():
    tags = {p.ergonomic_tag for d in list_builtin() for p in d.parameters
            if p.ergonomic_tag}
    assert tags  # the catalog actually uses ergonomics annotations
    assert tags <= set(known_tags())
