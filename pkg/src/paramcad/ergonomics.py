"""Body-profile driven parameter range recommendation.

Ranges annotate sliders; they are never enforced on configurations. The
coefficient table lives in data/ergonomic_ranges.json so it can be replaced
without code changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import EmptyProfileList, InvalidProfile, UnknownTag

BUILDS = ("slim", "average", "broad")


@dataclass(frozen=True)
class BodyProfile:
    stature: float  # meters
    build: str = "average"

    def __post_init__(self):
        if not 1.0 <= self.stature <= 2.3:
            raise InvalidProfile(f"stature {self.stature} outside [1.0, 2.3] m")
        if self.build not in BUILDS:
            raise InvalidProfile(f"build must be one of {BUILDS}")


@dataclass(frozen=True)
class RecommendedRange:
    lo: float
    hi: float
    compromise: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("recommended range requires lo <= hi")


@lru_cache(maxsize=1)
def _table() -> dict:
    text = resources.files("paramcad").joinpath("data/ergonomic_ranges.json").read_text("utf-8")
    return json.loads(text)


def known_tags() -> tuple[str, ...]:
    t = _table()
    return tuple(t["stature_proportional"]) + tuple(t["fixed_band"])


def recommend(tag: str, profile: BodyProfile) -> RecommendedRange:
    t = _table()
    if tag in t["stature_proportional"]:
        c_lo, c_hi = t["stature_proportional"][tag]
        return RecommendedRange(c_lo * profile.stature, c_hi * profile.stature)
    if tag in t["fixed_band"]:
        lo, hi = t["fixed_band"][tag]
        mult = t["build_multiplier"][profile.build]
        return RecommendedRange(lo * mult, hi * mult)
    raise UnknownTag(f"unknown ergonomic tag {tag!r}")


def reconcile(tag: str, profiles: list[BodyProfile]) -> RecommendedRange:
    """Range serving all future users.

    Per-user ranges are intersected; if the intersection is empty the band
    between the two nearest interval endpoints is returned as a flagged
    compromise. Per-person seat widths add up instead.
    """
    if not profiles:
        raise EmptyProfileList("reconcile needs at least one profile")
    ranges = [recommend(tag, p) for p in profiles]
    if tag in _table()["fixed_band"]:
        return RecommendedRange(sum(r.lo for r in ranges), sum(r.hi for r in ranges))
    lo = max(r.lo for r in ranges)
    hi = min(r.hi for r in ranges)
    if lo <= hi:
        return RecommendedRange(lo, hi)
    return RecommendedRange(hi, lo, compromise=True)
