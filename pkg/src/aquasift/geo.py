"""Deterministic location mapping: raw location strings to countries via an
ordered substring gazetteer, countries to one of five world regions, and
group-by-location reporting with a minimum-count threshold.

The bundled gazetteer keeps longer (more specific) patterns first and the
first matching pattern wins, so "Indiana" resolves before "India" gets a
chance.  Unmapped locations are reported in a residual bucket, never
silently dropped.
"""

import csv
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from . import AquasiftError
from .corpus import Corpus

REGIONS = ("Africa", "America", "Asia", "Europe", "Oceania")
RESIDUAL = "(unmapped)"


@dataclass(frozen=True)
class Gazetteer:
    patterns: tuple  # ((casefolded pattern, country), ...) in match order
    regions: dict  # country -> region

    def __post_init__(self):
        for _, country in self.patterns:
            if country not in self.regions:
                raise AquasiftError(f"country {country!r} has no region entry")
        for country, region in self.regions.items():
            if region not in REGIONS:
                raise AquasiftError(f"unknown region {region!r} for {country!r}")


def _read_csv(path_or_text, expected_header):
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        lines = path_or_text.splitlines()
    else:
        lines = Path(path_or_text).read_text(encoding="utf-8").splitlines()
    reader = csv.reader(lines)
    header = next(reader, None)
    if header != expected_header:
        raise AquasiftError(f"expected header {expected_header}, got {header}")
    return [row for row in reader if row]


def load_gazetteer(patterns_path=None, regions_path=None) -> Gazetteer:
    """The bundled gazetteer, or custom pattern/region files.

    Pattern file: csv ``pattern,country`` applied in file order, first match
    wins.  Region file: csv ``country,region`` with the five-region scheme.
    """
    if patterns_path is None:
        patterns_src = resources.files("aquasift.data").joinpath("gazetteer_patterns.csv").read_text("utf-8")
    else:
        patterns_src = patterns_path
    if regions_path is None:
        regions_src = resources.files("aquasift.data").joinpath("country_regions.csv").read_text("utf-8")
    else:
        regions_src = regions_path

    patterns = tuple(
        (row[0].casefold(), row[1]) for row in _read_csv(patterns_src, ["pattern", "country"])
    )
    regions = {row[0]: row[1] for row in _read_csv(regions_src, ["country", "region"])}
    return Gazetteer(patterns=patterns, regions=regions)


def map_location(raw: Optional[str], gazetteer: Gazetteer) -> Optional[str]:
    """First pattern contained in the raw string (case-insensitive) gives
    the country; no match gives None."""
    if not raw:
        return None
    folded = raw.casefold()
    for pattern, country in gazetteer.patterns:
        if pattern in folded:
            return country
    return None


def to_region(country: str, gazetteer: Gazetteer) -> str:
    try:
        return gazetteer.regions[country]
    except KeyError:
        raise AquasiftError(f"unknown country {country!r}") from None


@dataclass(frozen=True)
class GroupReport:
    key: str
    count: int
    member_ids: tuple

    def __post_init__(self):
        if self.count != len(self.member_ids):
            raise AquasiftError("group count must equal its member list length")


def locate(corpus: Corpus, gazetteer: Gazetteer) -> dict:
    """tweet id -> mapped country (or None)."""
    return {t.id: map_location(t.location, gazetteer) for t in corpus}


def group_by_key(corpus: Corpus, gazetteer: Gazetteer, key: str = "country") -> list:
    """All groups, unmapped tweets included under the residual key, sorted
    by count descending (ties by key)."""
    if key not in ("country", "region"):
        raise AquasiftError("key must be 'country' or 'region'")
    members = defaultdict(list)
    for t in corpus:
        country = map_location(t.location, gazetteer)
        if country is None:
            members[RESIDUAL].append(t.id)
        elif key == "country":
            members[country].append(t.id)
        else:
            members[to_region(country, gazetteer)].append(t.id)
    reports = [
        GroupReport(key=k, count=len(ids), member_ids=tuple(ids))
        for k, ids in members.items()
    ]
    reports.sort(key=lambda r: (-r.count, r.key))
    return reports


def group_and_filter(
    corpus: Corpus,
    gazetteer: Gazetteer,
    key: str = "country",
    min_count: int = 70,
) -> list:
    """Located groups holding at least ``min_count`` tweets, sorted by count
    descending.  The residual bucket never passes the filter."""
    if min_count < 1:
        raise AquasiftError("min_count must be >= 1")
    return [
        r
        for r in group_by_key(corpus, gazetteer, key)
        if r.key != RESIDUAL and r.count >= min_count
    ]
