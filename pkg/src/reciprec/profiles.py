"""Learner profiles, partner preferences and their flat-file formats.

Profile file::

    id,age,gen,loc,qua,int[,crs]
    1,32,M,Frankfurt,Doctorate,ML,machine learning;java;python

Preference file (``x`` marks an attribute without preference)::

    id,age,gen,loc,qua,int,priority
    1,30-35,M,same city,>=Masters,x,age;gen
    4,<=25,x,same timezone,<=Bachelors,x,loc;qua

Level cells accept a range label (``25-30``), an age threshold (``<=25``,
``>=30``, ``<20``) or a qualification threshold (``>=Masters``), and several
forms may be joined with ``;``.  Thresholds expand to every level whose whole
interval lies on the accepted side.

Location table::

    city,country,timezone
    Frankfurt,Germany,Europe/Berlin
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "ATTRIBUTES",
    "AGE_LABELS",
    "QUALIFICATION_NAMES",
    "ParseError",
    "LocationScope",
    "LearnerProfile",
    "Preference",
    "LocationTable",
    "age_to_level",
    "qualification_level",
    "parse_age_levels",
    "parse_qualification_levels",
    "parse_profiles",
    "parse_preferences",
    "parse_locations",
    "format_profiles",
    "format_preferences",
    "read_profiles",
    "read_preferences",
    "read_locations",
]

# Attribute keys, in the order they are summed into a distance score.
ATTRIBUTES = ("age", "gen", "loc", "qua", "int")

AGE_BOUNDARIES = (20, 25, 30, 35)
AGE_LABELS = ("<20", "20-25", "25-30", "30-35", "35+")
# Inclusive [low, high] age interval per level; level 4 is open-ended.
_AGE_SPANS = ((1, 19), (20, 24), (25, 29), (30, 34), (35, None))

QUALIFICATION_NAMES = ("Less than secondary", "Secondary", "Bachelors", "Masters", "Doctorate")
_QUALIFICATION_KEYS = {
    "lessthansecondary": 0,
    "secondary": 1,
    "bachelors": 2,
    "masters": 3,
    "doctorate": 4,
}

PROFILE_COLUMNS = ("id", "age", "gen", "loc", "qua", "int")
PREFERENCE_COLUMNS = ("id", "age", "gen", "loc", "qua", "int", "priority")
NO_PREFERENCE = "x"


class ParseError(ValueError):
    """Raised when a profile, preference or location record is invalid."""


class LocationScope(str, Enum):
    SAME_CITY = "same city"
    SAME_COUNTRY = "same country"
    SAME_TIMEZONE = "same timezone"

    @classmethod
    def parse(cls, text: str) -> LocationScope:
        key = re.sub(r"[\s_\-]+", "", text.strip().lower())
        if key.startswith("same"):
            key = key[4:]
        for scope in cls:
            if scope.value.split()[1] == key:
                return scope
        raise ParseError(
            f"unknown location preference {text!r}; expected one of "
            + ", ".join(s.value for s in cls)
        )


def age_to_level(age: int) -> int:
    """Map an age in years to its level 0..4 (intervals closed on the left)."""
    if isinstance(age, bool) or not isinstance(age, int):
        raise ParseError(f"age must be an integer, got {age!r}")
    if age < 1:
        raise ParseError(f"age must be positive, got {age}")
    level = 0
    for boundary in AGE_BOUNDARIES:
        if age >= boundary:
            level += 1
    return level


def _normalize_city(city: str) -> str:
    return " ".join(city.split()).casefold()


def qualification_level(text: str) -> int:
    key = re.sub(r"[\s_\-]+", "", text.strip().lower())
    try:
        return _QUALIFICATION_KEYS[key]
    except KeyError:
        raise ParseError(
            f"unknown qualification {text!r}; valid levels: " + ", ".join(QUALIFICATION_NAMES)
        ) from None


_THRESHOLD = re.compile(r"^(<=|>=|<|>)\s*(.+)$")
_AGE_RANGE = re.compile(r"^(\d+)\s*-\s*(\d+)$")


def _age_levels_for_threshold(op: str, bound: int) -> set[int]:
    levels = set()
    for level, (low, high) in enumerate(_AGE_SPANS):
        if op == "<=":
            ok = high is not None and high <= bound
        elif op == "<":
            ok = high is not None and high < bound
        elif op == ">=":
            ok = low >= bound
        else:
            ok = low > bound
        if ok:
            levels.add(level)
    return levels


def parse_age_levels(text: str) -> frozenset[int]:
    """Expand an age preference cell into a non-empty set of age levels."""
    levels: set[int] = set()
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if part in AGE_LABELS:
            levels.add(AGE_LABELS.index(part))
            continue
        m = _THRESHOLD.match(part)
        if m and m.group(2).strip().isdigit():
            found = _age_levels_for_threshold(m.group(1), int(m.group(2)))
            if not found:
                raise ParseError(f"age preference {part!r} admits no age level")
            levels |= found
            continue
        m = _AGE_RANGE.match(part)
        if m:
            low, high = int(m.group(1)), int(m.group(2))
            if low in AGE_BOUNDARIES and high == low + 5:
                levels.add(AGE_BOUNDARIES.index(low) + 1)
                continue
            raise ParseError(f"age range {part!r} does not match a level ({', '.join(AGE_LABELS)})")
        raise ParseError(f"cannot parse age preference {part!r}")
    if not levels:
        raise ParseError("empty age preference")
    return frozenset(levels)


def parse_qualification_levels(text: str) -> frozenset[int]:
    """Expand a qualification preference cell into a non-empty level set."""
    levels: set[int] = set()
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        m = _THRESHOLD.match(part)
        if m:
            op, ref = m.group(1), qualification_level(m.group(2))
            found = {
                q
                for q in range(5)
                if (op == "<=" and q <= ref)
                or (op == "<" and q < ref)
                or (op == ">=" and q >= ref)
                or (op == ">" and q > ref)
            }
            if not found:
                raise ParseError(f"qualification preference {part!r} admits no level")
            levels |= found
        else:
            levels.add(qualification_level(part))
    if not levels:
        raise ParseError("empty qualification preference")
    return frozenset(levels)


def _split_list(text: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in text.split(";") if item.strip())


@dataclass(frozen=True)
class LearnerProfile:
    id: int
    age: int
    gender: str
    location: str
    qualification: int
    interests: frozenset[str]
    courses: tuple[str, ...] = ()

    def __post_init__(self):
        age_to_level(self.age)
        if self.gender not in ("M", "F"):
            raise ParseError(f"learner {self.id}: gender must be M or F, got {self.gender!r}")
        if not 0 <= self.qualification <= 4:
            raise ParseError(f"learner {self.id}: qualification level out of range")
        if not self.interests:
            raise ParseError(f"learner {self.id}: at least one interest required")
        if not isinstance(self.interests, frozenset):
            object.__setattr__(self, "interests", frozenset(self.interests))

    @property
    def age_level(self) -> int:
        return age_to_level(self.age)


@dataclass(frozen=True)
class Preference:
    """Constraints one learner places on recommended partners.

    ``None`` means the learner expressed no preference for that attribute.
    ``priorities`` holds attribute keys from :data:`ATTRIBUTES`.
    """

    learner_id: int
    age: frozenset[int] | None = None
    gender: str | None = None
    location: LocationScope | None = None
    qualification: frozenset[int] | None = None
    interests: frozenset[str] | None = None
    priorities: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.defined():
            raise ParseError(f"learner {self.learner_id}: at least one preference required")
        for name, levels in (("age", self.age), ("qualification", self.qualification)):
            if levels is not None and (not levels or not levels <= set(range(5))):
                raise ParseError(f"learner {self.learner_id}: invalid {name} level set {set(levels)}")
        if self.gender is not None and self.gender not in ("M", "F"):
            raise ParseError(f"learner {self.learner_id}: gender preference must be M or F")
        if self.interests is not None and not self.interests:
            raise ParseError(f"learner {self.learner_id}: interest preference must be non-empty")
        unknown = set(self.priorities) - set(ATTRIBUTES)
        if unknown:
            raise ParseError(f"learner {self.learner_id}: unknown priority attribute(s) {sorted(unknown)}")
        undefined = set(self.priorities) - self.defined()
        if undefined:
            raise ParseError(
                f"learner {self.learner_id}: priority on undefined attribute(s) {sorted(undefined)}"
            )

    def value(self, attribute: str):
        return {
            "age": self.age,
            "gen": self.gender,
            "loc": self.location,
            "qua": self.qualification,
            "int": self.interests,
        }[attribute]

    def defined(self) -> frozenset[str]:
        return frozenset(a for a in ATTRIBUTES if self.value(a) is not None)


class LocationTable:
    """City -> (country, timezone) lookup, keyed on trimmed, case-folded names."""

    def __init__(self, entries: Mapping[str, tuple[str, str]] | None = None):
        self._entries: dict[str, tuple[str, str]] = {}
        self._display: dict[str, str] = {}
        for city, (country, tz) in (entries or {}).items():
            self.add(city, country, tz)

    def add(self, city: str, country: str, timezone: str) -> None:
        key = _normalize_city(city)
        self._entries[key] = (country.strip(), timezone.strip())
        self._display[key] = city.strip()

    def lookup(self, city: str) -> tuple[str, str] | None:
        return self._entries.get(_normalize_city(city))

    def __contains__(self, city: str) -> bool:
        return _normalize_city(city) in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def cities(self) -> list[str]:
        """City names as first written, sorted by normalized key."""
        return [self._display[k] for k in sorted(self._entries)]

    def key(self, city: str) -> str:
        return _normalize_city(city)


def _reader(source: str, required: Iterable[str], what: str) -> csv.DictReader:
    reader = csv.DictReader(io.StringIO(source.lstrip("﻿")), skipinitialspace=True)
    header = [h.strip() for h in (reader.fieldnames or [])]
    reader.fieldnames = header
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseError(f"{what} file is missing column(s): {', '.join(missing)}")
    return reader


def _parse_id(cell: str, line: int) -> int:
    try:
        return int(cell.strip())
    except (ValueError, AttributeError):
        raise ParseError(f"line {line}: invalid id {cell!r}") from None


def parse_profiles(source: str) -> list[LearnerProfile]:
    """Parse profile CSV text. Duplicate ids are rejected."""
    reader = _reader(source, PROFILE_COLUMNS, "profile")
    profiles: list[LearnerProfile] = []
    seen: set[int] = set()
    for row in reader:
        line = reader.line_num
        if not any((v or "").strip() for v in row.values() if isinstance(v, str)):
            continue
        pid = _parse_id(row["id"], line)
        if pid in seen:
            raise ParseError(f"line {line}: duplicate learner id {pid}")
        seen.add(pid)
        try:
            age = int((row["age"] or "").strip())
        except ValueError:
            raise ParseError(f"line {line}: unparsable age {row['age']!r}") from None
        try:
            profiles.append(
                LearnerProfile(
                    id=pid,
                    age=age,
                    gender=(row["gen"] or "").strip().upper(),
                    location=(row["loc"] or "").strip(),
                    qualification=qualification_level(row["qua"] or ""),
                    interests=frozenset(_split_list(row["int"] or "")),
                    courses=_split_list(row.get("crs") or ""),
                )
            )
        except ParseError as exc:
            raise ParseError(f"line {line}: {exc}") from None
    return profiles


def parse_preferences(source: str) -> list[Preference]:
    """Parse preference CSV text; ``x`` (or an empty cell) means no preference."""
    reader = _reader(source, PREFERENCE_COLUMNS[:-1], "preference")
    prefs: list[Preference] = []
    seen: set[int] = set()
    for row in reader:
        line = reader.line_num
        if not any((v or "").strip() for v in row.values() if isinstance(v, str)):
            continue
        pid = _parse_id(row["id"], line)
        if pid in seen:
            raise ParseError(f"line {line}: duplicate preference for learner {pid}")
        seen.add(pid)

        def cell(name):
            value = (row.get(name) or "").strip()
            return None if value.lower() in ("", NO_PREFERENCE) else value

        try:
            gender = cell("gen")
            if gender is not None:
                gender = gender.upper()
            loc = cell("loc")
            interests = cell("int")
            priority = cell("priority")
            prefs.append(
                Preference(
                    learner_id=pid,
                    age=parse_age_levels(cell("age")) if cell("age") else None,
                    gender=gender,
                    location=LocationScope.parse(loc) if loc else None,
                    qualification=parse_qualification_levels(cell("qua")) if cell("qua") else None,
                    interests=frozenset(_split_list(interests)) if interests else None,
                    priorities=frozenset(p.lower() for p in _split_list(priority or "")),
                )
            )
        except ParseError as exc:
            raise ParseError(f"line {line}: {exc}") from None
    return prefs


def parse_locations(source: str) -> LocationTable:
    reader = _reader(source, ("city", "country", "timezone"), "location")
    table = LocationTable()
    for row in reader:
        city = (row["city"] or "").strip()
        if not city or city.startswith("#"):
            continue
        table.add(city, row["country"] or "", row["timezone"] or "")
    return table


def _levels_cell(levels: frozenset[int] | None, names: tuple[str, ...]) -> str:
    if levels is None:
        return NO_PREFERENCE
    return ";".join(names[level] for level in sorted(levels))


def format_profiles(profiles: Iterable[LearnerProfile]) -> str:
    """Render profiles in the format read by :func:`parse_profiles`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PROFILE_COLUMNS + ("crs",))
    for p in profiles:
        writer.writerow(
            [
                p.id,
                p.age,
                p.gender,
                p.location,
                QUALIFICATION_NAMES[p.qualification],
                ";".join(sorted(p.interests)),
                ";".join(p.courses),
            ]
        )
    return buf.getvalue()


def format_preferences(prefs: Iterable[Preference]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREFERENCE_COLUMNS)
    for p in prefs:
        writer.writerow(
            [
                p.learner_id,
                _levels_cell(p.age, AGE_LABELS),
                p.gender or NO_PREFERENCE,
                p.location.value if p.location else NO_PREFERENCE,
                _levels_cell(p.qualification, QUALIFICATION_NAMES),
                ";".join(sorted(p.interests)) if p.interests else NO_PREFERENCE,
                ";".join(a for a in ATTRIBUTES if a in p.priorities) or NO_PREFERENCE,
            ]
        )
    return buf.getvalue()


def read_profiles(path: str | Path) -> list[LearnerProfile]:
    return parse_profiles(Path(path).read_text(encoding="utf-8"))


def read_preferences(path: str | Path) -> list[Preference]:
    return parse_preferences(Path(path).read_text(encoding="utf-8"))


def read_locations(path: str | Path) -> LocationTable:
    return parse_locations(Path(path).read_text(encoding="utf-8"))
