"""Transaction-log ingestion.

Turns a delimiter-separated visit log (one row per visit) into the binary
indicator dataset used by the learners: one row per subject, one column
per main item, 1 if the subject visited that item at least once.
"""
from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

import numpy as np

STATUS_LEVELS = (0, 1, 2)  # new, renewal, old
STATUS_NAME = "S"

DEFAULT_SCHEMA = {
    "subject_id": "subject_id",
    "item_code": "item_code",
    "date": "date",
    "status": "status",
}


class IngestError(ValueError):
    """Raised for malformed or inconsistent transaction data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TransactionRecord:
    subject_id: str
    item_code: str
    timestamp: dt.date
    status: int


@dataclass(frozen=True)
class TransactionLog:
    records: tuple[TransactionRecord, ...]
    item_universe: frozenset[str]

    @classmethod
    def from_records(cls, records: Iterable[TransactionRecord]) -> "TransactionLog":
        records = tuple(records)
        status: dict[str, int] = {}
        for k, rec in enumerate(records):
            if rec.status not in STATUS_LEVELS:
                raise IngestError(f"unknown status value {rec.status!r}", k + 1)
            prev = status.setdefault(rec.subject_id, rec.status)
            if prev != rec.status:
                raise IngestError(
                    f"subject {rec.subject_id!r} has inconsistent status values "
                    f"{prev} and {rec.status}", k + 1)
        return cls(records, frozenset(r.item_code for r in records))

    def subjects(self) -> list[str]:
        """Distinct subject ids in order of first appearance."""
        return list(dict.fromkeys(r.subject_id for r in self.records))

    def subject_status(self) -> dict[str, int]:
        return {r.subject_id: r.status for r in self.records}

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class VisitCountTable:
    """Number of distinct subjects who visited each item."""

    counts: Mapping[str, int]

    def total(self, items: Iterable[str] | None = None) -> int:
        if items is None:
            return sum(self.counts.values())
        return sum(self.counts[i] for i in items)


@dataclass(frozen=True, eq=False)
class IndicatorDataset:
    """N x n binary item indicators, optionally with the 3-level status column.

    Variables are addressed by integer index: ``0..n-1`` are the items in
    ``variable_names`` order and ``n`` is the status variable when present.
    """

    variable_names: tuple[str, ...]
    rows: np.ndarray
    status_column: np.ndarray | None = None
    subject_ids: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int8)
        if rows.ndim != 2 or rows.shape[1] != len(self.variable_names):
            raise ValueError("rows must be an N x n matrix matching variable_names")
        if rows.size and not np.isin(rows, (0, 1)).all():
            raise ValueError("indicator cells must be 0 or 1")
        object.__setattr__(self, "rows", rows)
        if self.status_column is not None:
            s = np.asarray(self.status_column, dtype=np.int8)
            if s.shape != (rows.shape[0],):
                raise ValueError("status column length must equal N")
            if s.size and not np.isin(s, STATUS_LEVELS).all():
                raise ValueError("status values must be in {0, 1, 2}")
            object.__setattr__(self, "status_column", s)

    @property
    def N(self) -> int:
        return self.rows.shape[0]

    @property
    def has_status(self) -> bool:
        return self.status_column is not None

    @property
    def names(self) -> tuple[str, ...]:
        """All variable names, status last when present."""
        if self.has_status:
            return self.variable_names + (STATUS_NAME,)
        return self.variable_names

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def column(self, k: int) -> np.ndarray:
        n = len(self.variable_names)
        if 0 <= k < n:
            return self.rows[:, k]
        if k == n and self.has_status:
            return self.status_column
        raise IndexError(f"variable index {k} out of range")

    def cardinality(self, k: int) -> int:
        self.column(k)
        return 3 if k == len(self.variable_names) else 2

    def matrix(self) -> np.ndarray:
        """Data matrix with the status column appended when present."""
        if self.has_status:
            return np.column_stack([self.rows, self.status_column])
        return self.rows

    def cardinalities(self) -> tuple[int, ...]:
        return tuple(self.cardinality(k) for k in range(self.n_vars))


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip()[:10])


def parse_transactions(stream: TextIO, schema: Mapping[str, str] | None = None,
                       delimiter: str = ",", year: int | None = None) -> TransactionLog:
    """Read a visit log with a header row.

    ``schema`` maps the logical columns (subject_id, item_code, date, status)
    to header names. Dates are ISO ``YYYY-MM-DD``; when ``year`` is given
    every date must fall inside it. Errors carry the 1-based file line.
    """
    schema = {**DEFAULT_SCHEMA, **(schema or {})}
    reader = csv.reader(stream, delimiter=delimiter)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise IngestError("missing header", 1) from None
    try:
        cols = {key: header.index(name) for key, name in schema.items()}
    except ValueError as exc:
        raise IngestError(f"header lacks a required column ({exc})", 1) from None

    records = []
    width = max(cols.values()) + 1
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < width:
            raise IngestError(f"expected at least {width} fields, got {len(row)}", line)
        subject = row[cols["subject_id"]].strip()
        item = row[cols["item_code"]].strip()
        if not subject or not item:
            raise IngestError("empty subject_id or item_code", line)
        try:
            date = _parse_date(row[cols["date"]])
        except ValueError:
            raise IngestError(f"unparseable date {row[cols['date']]!r}", line) from None
        if year is not None and date.year != year:
            raise IngestError(f"date {date} outside analysis year {year}", line)
        raw_status = row[cols["status"]].strip()
        try:
            status = int(raw_status)
        except ValueError:
            raise IngestError(f"unknown status value {raw_status!r}", line) from None
        if status not in STATUS_LEVELS:
            raise IngestError(f"unknown status value {raw_status!r}", line)
        records.append((line, TransactionRecord(subject, item, date, status)))

    seen: dict[str, int] = {}
    for line, rec in records:
        prev = seen.setdefault(rec.subject_id, rec.status)
        if prev != rec.status:
            raise IngestError(
                f"subject {rec.subject_id!r} has inconsistent status values "
                f"{prev} and {rec.status}", line)
    recs = tuple(r for _, r in records)
    return TransactionLog(recs, frozenset(r.item_code for r in recs))


def write_transactions(log: TransactionLog, stream: TextIO, delimiter: str = ",") -> None:
    """Write a log in the same schema ``parse_transactions`` reads."""
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["subject_id", "item_code", "date", "status"])
    for r in log.records:
        writer.writerow([r.subject_id, r.item_code, r.timestamp.isoformat(), r.status])


def deduplicate(log: TransactionLog) -> dict[str, dict[str, dt.date]]:
    """Collapse repeat visits: subject -> {item: earliest visit date}."""
    out: dict[str, dict[str, dt.date]] = {}
    for r in log.records:
        visits = out.setdefault(r.subject_id, {})
        first = visits.get(r.item_code)
        if first is None or r.timestamp < first:
            visits[r.item_code] = r.timestamp
    return out


def visit_counts(log: TransactionLog) -> VisitCountTable:
    counts = {item: 0 for item in sorted(log.item_universe)}
    for visits in deduplicate(log).values():
        for item in visits:
            counts[item] += 1
    return VisitCountTable(counts)


def nearest_rank(values: Iterable[float], percentile: float) -> float:
    """Nearest-rank percentile: the ceil(p*k)-th smallest value (at least the 1st)."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("empty value list")
    # round() absorbs float noise such as 0.7 * 10 = 7.000000000000001
    rank = max(1, math.ceil(round(percentile * len(ordered), 9)))
    return ordered[rank - 1]


def select_main_items(counts: VisitCountTable, percentile: float = 0.85) -> set[str]:
    """Items visited strictly more often than the nearest-rank percentile."""
    if not counts.counts:
        raise ValueError("empty count table")
    if not 0.0 <= percentile <= 1.0:
        raise ValueError("percentile must lie in [0, 1]")
    cut = nearest_rank(counts.counts.values(), percentile)
    return {item for item, c in counts.counts.items() if c > cut}


def build_indicator_dataset(log: TransactionLog, items: Iterable[str],
                            include_status: bool = False) -> IndicatorDataset:
    """One row per distinct subject, one column per item (sorted by code).

    Subjects who visited none of ``items`` keep an all-zero row.
    """
    items = sorted(set(items))
    if not items:
        raise ValueError("empty item set")
    unknown = set(items) - log.item_universe
    if unknown:
        raise ValueError(f"items not in the log: {sorted(unknown)}")
    subjects = log.subjects()
    row_of = {s: k for k, s in enumerate(subjects)}
    col_of = {it: k for k, it in enumerate(items)}
    rows = np.zeros((len(subjects), len(items)), dtype=np.int8)
    for r in log.records:
        c = col_of.get(r.item_code)
        if c is not None:
            rows[row_of[r.subject_id], c] = 1
    status = None
    if include_status:
        by_subject = log.subject_status()
        status = np.array([by_subject[s] for s in subjects], dtype=np.int8)
    return IndicatorDataset(tuple(items), rows, status, tuple(subjects))
