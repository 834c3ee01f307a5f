"""Shared domain types: discourse events, roster snapshots, tenures, covariates.

All timestamps are integer UTC seconds since the epoch; no local-time
arithmetic happens anywhere in the toolkit. Every type is immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "DataError",
    "Sentiment",
    "EventKind",
    "DiscourseEvent",
    "RosterEntry",
    "ModSnapshot",
    "ModTenure",
    "CovariateRow",
    "CovariateTable",
    "TreatmentAssignment",
    "ValidationReport",
    "validate_events",
    "event_to_record",
    "event_from_record",
    "snapshot_to_record",
    "snapshot_from_record",
]


class DataError(ValueError):
    """Input data violates a documented invariant or wire format."""


class Sentiment(str, Enum):
    """Sentiment of an item discussing moderators.

    ``exclude`` marks detector hits that are out of scope (other communities'
    mods, false positives); it never counts as mod discourse downstream.
    """

    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"
    EXCLUDE = "exclude"

    @classmethod
    def parse(cls, raw: str) -> "Sentiment":
        try:
            return cls(raw)
        except ValueError:
            raise DataError(f"unknown label {raw!r}") from None


#: Sentiments that count as mod discourse.
MOD_DISCOURSE_SENTIMENTS = (Sentiment.POSITIVE, Sentiment.NEUTRAL, Sentiment.NEGATIVE)


class EventKind(str, Enum):
    POST = "post"
    COMMENT = "comment"

    @classmethod
    def parse(cls, raw: str) -> "EventKind":
        try:
            return cls(raw)
        except ValueError:
            raise DataError(f"unknown kind {raw!r}") from None


@dataclass(frozen=True)
class DiscourseEvent:
    """One post or comment.

    ``author_is_mod`` is materialized at ingestion by joining against tenures
    so downstream filters are pure functions of the event. ``removed`` and
    ``deleted`` reflect the literal "[removed]"/"[deleted]" body sentinels and
    cannot both be true. A ``label`` is only present on items that passed the
    mod-discourse prefilter.
    """

    event_id: str
    community: str
    author: str
    created_utc: int
    kind: EventKind
    author_is_mod: bool = False
    removed: bool = False
    deleted: bool = False
    label: Optional[Sentiment] = None

    def __post_init__(self):
        if not self.event_id:
            raise DataError("empty event_id")
        if not self.community:
            raise DataError(f"event {self.event_id!r}: empty community")
        if not self.author:
            raise DataError(f"event {self.event_id!r}: empty author")
        if not isinstance(self.created_utc, int) or self.created_utc <= 0:
            raise DataError(f"event {self.event_id!r}: malformed timestamp "
                            f"(created_utc={self.created_utc!r})")
        if isinstance(self.kind, str) and not isinstance(self.kind, EventKind):
            object.__setattr__(self, "kind", EventKind.parse(self.kind))
        if self.removed and self.deleted:
            raise DataError(f"event {self.event_id!r}: contradictory removal flags")
        if self.label is not None and not isinstance(self.label, Sentiment):
            object.__setattr__(self, "label", Sentiment.parse(self.label))

    @property
    def is_mod_discourse(self) -> bool:
        return self.label is not None and self.label != Sentiment.EXCLUDE


EVENT_FIELDS = ("event_id", "community", "author", "created_utc", "kind",
                "author_is_mod", "removed", "deleted", "label")


def event_to_record(event: DiscourseEvent) -> dict:
    """Canonical wire record, field order fixed for byte-stable round trips."""
    return {
        "event_id": event.event_id,
        "community": event.community,
        "author": event.author,
        "created_utc": event.created_utc,
        "kind": event.kind.value,
        "author_is_mod": event.author_is_mod,
        "removed": event.removed,
        "deleted": event.deleted,
        "label": event.label.value if event.label is not None else None,
    }


def event_from_record(record: Mapping) -> DiscourseEvent:
    missing = [f for f in EVENT_FIELDS[:-1] if f not in record]
    if missing:
        raise DataError(f"missing required field {missing[0]!r}")
    created = record["created_utc"]
    if isinstance(created, bool) or not isinstance(created, int):
        raise DataError(f"event {record['event_id']!r}: malformed timestamp "
                        f"(created_utc={created!r})")
    return DiscourseEvent(
        event_id=str(record["event_id"]),
        community=str(record["community"]),
        author=str(record["author"]),
        created_utc=created,
        kind=EventKind.parse(record["kind"]),
        author_is_mod=bool(record["author_is_mod"]),
        removed=bool(record["removed"]),
        deleted=bool(record["deleted"]),
        label=None if record.get("label") is None else Sentiment.parse(record["label"]),
    )


@dataclass(frozen=True)
class RosterEntry:
    username: str
    appointed_utc: int
    rank: int


@dataclass(frozen=True)
class ModSnapshot:
    """A captured moderator roster, ordered by seniority.

    Ranks are unique and contiguous from 0 and every appointment timestamp
    precedes (or equals) the capture instant.
    """

    community: str
    captured_utc: int
    roster: tuple

    def __post_init__(self):
        if not self.community:
            raise DataError("snapshot with empty community")
        if self.captured_utc <= 0:
            raise DataError(f"snapshot {self.community!r}: malformed captured_utc")
        entries = tuple(e if isinstance(e, RosterEntry) else RosterEntry(*e)
                        for e in self.roster)
        object.__setattr__(self, "roster", entries)
        ranks = [e.rank for e in entries]
        if ranks != list(range(len(entries))):
            raise DataError(f"snapshot {self.community!r}@{self.captured_utc}: "
                            "roster ranks not contiguous from 0")
        seen = set()
        for e in entries:
            if e.username in seen:
                raise DataError(f"snapshot {self.community!r}@{self.captured_utc}: "
                                f"duplicate moderator {e.username!r}")
            seen.add(e.username)
            if e.appointed_utc > self.captured_utc:
                raise DataError(f"snapshot {self.community!r}@{self.captured_utc}: "
                                f"{e.username!r} appointed after capture")

    @property
    def usernames(self) -> tuple:
        return tuple(e.username for e in self.roster)


def snapshot_to_record(snap: ModSnapshot) -> dict:
    return {
        "community": snap.community,
        "captured_utc": snap.captured_utc,
        "roster": [{"username": e.username, "appointed_utc": e.appointed_utc,
                    "rank": e.rank} for e in snap.roster],
    }


def snapshot_from_record(record: Mapping) -> ModSnapshot:
    for f in ("community", "captured_utc", "roster"):
        if f not in record:
            raise DataError(f"missing required field {f!r}")
    roster = tuple(
        RosterEntry(str(e["username"]), int(e["appointed_utc"]), int(e["rank"]))
        for e in record["roster"]
    )
    return ModSnapshot(str(record["community"]), int(record["captured_utc"]), roster)


@dataclass(frozen=True)
class ModTenure:
    """One stint of a user moderating a community.

    ``start_utc`` is exact (appointment timestamp from the roster page).
    An absent ``end_utc`` means the tenure is open. When closed, the true end
    lies in ``(end_lower_utc, end_utc]``: the last capture where the moderator
    was still present and the first capture where they were gone.
    """

    username: str
    community: str
    start_utc: int
    end_utc: Optional[int] = None
    end_lower_utc: Optional[int] = None

    def __post_init__(self):
        if not self.username or not self.community:
            raise DataError("tenure with empty username or community")
        if self.start_utc <= 0:
            raise DataError(f"tenure {self.username!r}: malformed start_utc")
        if self.end_utc is not None and self.end_utc <= self.start_utc:
            raise DataError(f"tenure {self.username!r}: end_utc not after start_utc")
        if (self.end_lower_utc is not None and self.end_utc is not None
                and self.end_lower_utc > self.end_utc):
            raise DataError(f"tenure {self.username!r}: end_lower_utc after end_utc")

    def covers(self, t: int) -> bool:
        """Closed-open containment: start <= t < end (open end covers all)."""
        return self.start_utc <= t and (self.end_utc is None or t < self.end_utc)


@dataclass(frozen=True)
class CovariateRow:
    """One unit's covariates as an ordered name -> value mapping."""

    unit_id: str
    values: Mapping[str, float]

    def __post_init__(self):
        for name, v in self.values.items():
            if not math.isfinite(v):
                raise DataError(f"unit {self.unit_id!r}: non-finite covariate {name!r}")


class CovariateTable:
    """A rectangular table of per-unit numeric covariates.

    Column order is fixed and identical for every row; values are finite
    float64. Units are identified by an opaque string id.
    """

    def __init__(self, columns: Sequence[str], unit_ids: Sequence[str],
                 data: np.ndarray):
        columns = tuple(columns)
        unit_ids = tuple(str(u) for u in unit_ids)
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape != (len(unit_ids), len(columns)):
            raise DataError("covariate data shape does not match ids/columns")
        if len(set(columns)) != len(columns):
            raise DataError("duplicate covariate column name")
        seen = set()
        for u in unit_ids:
            if u in seen:
                raise DataError(f"duplicate unit id {u!r}")
            seen.add(u)
        if data.size and not np.all(np.isfinite(data)):
            bad = np.argwhere(~np.isfinite(data))[0]
            raise DataError(f"non-finite covariate {columns[bad[1]]!r} "
                            f"for unit {unit_ids[bad[0]]!r}")
        self.columns = columns
        self.unit_ids = unit_ids
        self.data = data
        self._index = {u: i for i, u in enumerate(unit_ids)}

    @classmethod
    def from_rows(cls, rows: Iterable[CovariateRow]) -> "CovariateTable":
        rows = list(rows)
        if not rows:
            return cls((), (), np.empty((0, 0)))
        columns = tuple(rows[0].values.keys())
        for r in rows[1:]:
            if tuple(r.values.keys()) != columns:
                raise DataError(f"unit {r.unit_id!r}: covariate ordering differs "
                                "from the first row")
        data = np.array([[float(r.values[c]) for c in columns] for r in rows])
        return cls(columns, [r.unit_id for r in rows], data)

    def __len__(self) -> int:
        return len(self.unit_ids)

    def rows(self) -> list:
        return [CovariateRow(u, dict(zip(self.columns, self.data[i])))
                for i, u in enumerate(self.unit_ids)]

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataError(f"covariate {name!r} missing from table")
        return self.data[:, self.columns.index(name)].copy()

    def matrix(self, names: Optional[Sequence[str]] = None) -> np.ndarray:
        if names is None:
            return self.data.copy()
        idx = []
        for n in names:
            if n not in self.columns:
                raise DataError(f"covariate {n!r} missing from table")
            idx.append(self.columns.index(n))
        return self.data[:, idx].copy()

    def select(self, names: Sequence[str]) -> "CovariateTable":
        return CovariateTable(tuple(names), self.unit_ids, self.matrix(names))

    def subset(self, unit_ids: Sequence[str]) -> "CovariateTable":
        idx = []
        for u in unit_ids:
            if u not in self._index:
                raise DataError(f"unknown unit id {u!r}")
            idx.append(self._index[u])
        return CovariateTable(self.columns, unit_ids, self.data[idx])

    def merge(self, other: "CovariateTable") -> "CovariateTable":
        """Inner join on unit id; column sets must be disjoint."""
        clash = set(self.columns) & set(other.columns)
        if clash:
            raise DataError(f"covariate column collision on merge: {sorted(clash)}")
        shared = [u for u in self.unit_ids if u in other._index]
        left = self.subset(shared)
        right = other.subset(shared)
        return CovariateTable(self.columns + other.columns, shared,
                              np.hstack([left.data, right.data]))


@dataclass(frozen=True)
class TreatmentAssignment:
    """A unit's continuous treatment value, its bin, and a one-vs-rest flag."""

    unit_id: str
    treatment_value: float
    bin_index: int
    z: int = 1

    def __post_init__(self):
        if self.bin_index < 0:
            raise DataError(f"unit {self.unit_id!r}: negative bin index")
        if self.z not in (0, 1):
            raise DataError(f"unit {self.unit_id!r}: z must be 0 or 1")


@dataclass
class ValidationReport:
    """Outcome of validating a stream of event records."""

    n_ok: int = 0
    n_rejected: int = 0
    per_community: dict = field(default_factory=dict)
    label_histogram: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    @property
    def first_error(self) -> Optional[str]:
        return self.errors[0] if self.errors else None


def validate_events(records: Iterable) -> ValidationReport:
    """Validate events or raw event records.

    Accepts constructed :class:`DiscourseEvent` objects or wire-format
    mappings. Returns per-community counts, a label histogram (with an
    ``unlabeled`` bucket), and one error string per rejected record.
    """
    per_community: Counter = Counter()
    histogram: Counter = Counter()
    report = ValidationReport()
    for i, rec in enumerate(records):
        try:
            event = rec if isinstance(rec, DiscourseEvent) else event_from_record(rec)
        except DataError as exc:
            report.n_rejected += 1
            report.errors.append(f"record {i}: {exc}")
            continue
        report.n_ok += 1
        per_community[event.community] += 1
        histogram[event.label.value if event.label is not None else "unlabeled"] += 1
    report.per_community = dict(per_community)
    report.label_histogram = dict(histogram)
    return report
