"""Load patent, inventor-link, and citation files and resolve the analysis cohort.

Input files are delimited text (tab or comma) with a header row. A schema
descriptor maps the canonical field names onto whatever the file's columns
are called, so USPTO bulk extracts and the disambiguated-inventor dataset
can be consumed without reshaping.

Dates must be ISO-8601 (YYYY-MM-DD). Sentinel or unparsable dates reject the
row loudly rather than silently skewing downstream lag statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Optional

from .errors import ConfigError, DuplicateId, MalformedRow

PATENT_FIELDS = ("patent_id", "grant_date", "application_date", "main_class", "assignee_id")
LINK_FIELDS = ("patent_id", "inventor_id")
CITATION_FIELDS = ("citing_id", "cited_id")


@dataclass(frozen=True)
class PatentRecord:
    patent_id: str
    grant_date: date
    application_date: date
    main_class: str
    assignee_id: Optional[str] = None

    def grant_year(self) -> int:
        return self.grant_date.year


@dataclass(frozen=True)
class InventorLink:
    patent_id: str
    inventor_id: str


@dataclass(frozen=True)
class CitationRecord:
    citing_id: str
    cited_id: str


@dataclass
class Schema:
    """Maps canonical field names to column names of a delimited file.

    ``columns`` entries default to the canonical names themselves, so a file
    whose header already uses them needs no mapping. ``assignee_id`` may be
    mapped to ``None`` when the file carries no assignee column.
    """

    delimiter: str = "\t"
    columns: dict = field(default_factory=dict)

    def column_for(self, fieldname: str):
        return self.columns.get(fieldname, fieldname)

    @classmethod
    def from_dict(cls, d: dict) -> "Schema":
        return cls(delimiter=d.get("delimiter", "\t"), columns=dict(d.get("columns", {})))


def _parse_date(text: str, line_no: int, what: str) -> date:
    try:
        return date.fromisoformat(text.strip())
    except (ValueError, AttributeError):
        raise MalformedRow(line_no, f"unparsable {what} {text!r}") from None


def _open_reader(path, schema: Schema, required: Iterable[str]):
    handle = open(path, newline="", encoding="utf-8")
    reader = csv.DictReader(handle, delimiter=schema.delimiter)
    header = reader.fieldnames or []
    missing = [f for f in required if schema.column_for(f) not in header]
    if missing:
        handle.close()
        cols = ", ".join(schema.column_for(f) for f in missing)
        raise ConfigError(f"{path}: header lacks required column(s): {cols}")
    return handle, reader


def load_patents(path, schema: Schema | None = None) -> dict[str, PatentRecord]:
    """Parse a patent file into a dict keyed by patent_id.

    Raises MalformedRow for missing fields, bad dates, or an application
    date after the grant date, and DuplicateId for a repeated patent_id.
    """
    schema = schema or Schema()
    required = ("patent_id", "grant_date", "application_date", "main_class")
    handle, reader = _open_reader(path, schema, required)
    patents: dict[str, PatentRecord] = {}
    try:
        for line_no, row in enumerate(reader, start=2):
            pid = (row.get(schema.column_for("patent_id")) or "").strip()
            if not pid:
                raise MalformedRow(line_no, "empty patent_id")
            if pid in patents:
                raise DuplicateId(f"patent_id {pid!r} repeated at line {line_no}")
            granted = _parse_date(row.get(schema.column_for("grant_date")) or "", line_no, "grant_date")
            applied = _parse_date(
                row.get(schema.column_for("application_date")) or "", line_no, "application_date"
            )
            if applied > granted:
                raise MalformedRow(line_no, f"application_date {applied} after grant_date {granted}")
            klass = (row.get(schema.column_for("main_class")) or "").strip()
            if not klass:
                raise MalformedRow(line_no, "empty main_class")
            assignee_col = schema.column_for("assignee_id")
            assignee = None
            if assignee_col is not None:
                raw = (row.get(assignee_col) or "").strip()
                assignee = raw or None
            patents[pid] = PatentRecord(pid, granted, applied, klass, assignee)
    finally:
        handle.close()
    return patents


def load_inventor_links(path, schema: Schema | None = None) -> set[InventorLink]:
    """Parse (patent_id, inventor_id) pairs; exact duplicate pairs collapse."""
    schema = schema or Schema()
    handle, reader = _open_reader(path, schema, LINK_FIELDS)
    links: set[InventorLink] = set()
    try:
        for line_no, row in enumerate(reader, start=2):
            pid = (row.get(schema.column_for("patent_id")) or "").strip()
            inv = (row.get(schema.column_for("inventor_id")) or "").strip()
            if not pid or not inv:
                raise MalformedRow(line_no, "empty patent_id or inventor_id")
            links.add(InventorLink(pid, inv))
    finally:
        handle.close()
    return links


def load_citations(path, schema: Schema | None = None) -> set[CitationRecord]:
    """Parse directed (citing_id, cited_id) pairs; self-citations of a patent
    to itself are malformed, exact duplicate pairs collapse."""
    schema = schema or Schema()
    handle, reader = _open_reader(path, schema, CITATION_FIELDS)
    citations: set[CitationRecord] = set()
    try:
        for line_no, row in enumerate(reader, start=2):
            citing = (row.get(schema.column_for("citing_id")) or "").strip()
            cited = (row.get(schema.column_for("cited_id")) or "").strip()
            if not citing or not cited:
                raise MalformedRow(line_no, "empty citing_id or cited_id")
            if citing == cited:
                raise MalformedRow(line_no, f"patent {citing!r} cites itself")
            citations.add(CitationRecord(citing, cited))
    finally:
        handle.close()
    return citations


def write_patents(path, patents: Iterable[PatentRecord], schema: Schema | None = None) -> None:
    """Write patents back to the delimited format (round-trips with load_patents)."""
    schema = schema or Schema()
    cols = [schema.column_for(f) for f in PATENT_FIELDS]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter=schema.delimiter, lineterminator="\n")
        writer.writerow(cols)
        for p in sorted(patents, key=lambda p: p.patent_id):
            writer.writerow(
                [p.patent_id, p.grant_date.isoformat(), p.application_date.isoformat(),
                 p.main_class, p.assignee_id or ""]
            )


def write_inventor_links(path, links: Iterable[InventorLink], schema: Schema | None = None) -> None:
    schema = schema or Schema()
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter=schema.delimiter, lineterminator="\n")
        writer.writerow([schema.column_for(f) for f in LINK_FIELDS])
        for link in sorted(links, key=lambda l: (l.patent_id, l.inventor_id)):
            writer.writerow([link.patent_id, link.inventor_id])


def write_citations(path, citations: Iterable[CitationRecord], schema: Schema | None = None) -> None:
    schema = schema or Schema()
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter=schema.delimiter, lineterminator="\n")
        writer.writerow([schema.column_for(f) for f in CITATION_FIELDS])
        for c in sorted(citations, key=lambda c: (c.citing_id, c.cited_id)):
            writer.writerow([c.citing_id, c.cited_id])


def filter_cohort(
    patents: dict[str, PatentRecord] | Iterable[PatentRecord],
    classes: set[str],
    grant_years: tuple[int, int],
) -> dict[str, PatentRecord]:
    """Keep exactly the patents whose main class and grant year match.

    ``grant_years`` is an inclusive (first, last) range. Idempotent; an
    empty result is permitted.
    """
    if isinstance(patents, dict):
        patents = patents.values()
    lo, hi = grant_years
    return {
        p.patent_id: p
        for p in patents
        if p.main_class in classes and lo <= p.grant_year() <= hi
    }


@dataclass(frozen=True)
class CitationEvent:
    citing_id: str
    cited_id: str
    citation_date: date


def resolve_citation_events(
    citations: Iterable[CitationRecord],
    all_patents: dict[str, PatentRecord],
) -> tuple[set[CitationEvent], int]:
    """Date each citation by the citing patent's application date.

    Citations whose citing patent cannot be resolved are dropped; the
    drop count is returned alongside the event set so that
    ``len(events) + dropped == len(citations)``.
    """
    events: set[CitationEvent] = set()
    dropped = 0
    for c in citations:
        citing = all_patents.get(c.citing_id)
        if citing is None:
            dropped += 1
            continue
        events.add(CitationEvent(c.citing_id, c.cited_id, citing.application_date))
    return events, dropped


def write_citation_events(path, events: Iterable[CitationEvent]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(["citing_id", "cited_id", "citation_date"])
        for e in sorted(events, key=lambda e: (e.citing_id, e.cited_id)):
            writer.writerow([e.citing_id, e.cited_id, e.citation_date.isoformat()])


def load_citation_events(path) -> set[CitationEvent]:
    schema = Schema()
    handle, reader = _open_reader(path, schema, ("citing_id", "cited_id", "citation_date"))
    events: set[CitationEvent] = set()
    try:
        for line_no, row in enumerate(reader, start=2):
            events.add(
                CitationEvent(
                    row["citing_id"].strip(),
                    row["cited_id"].strip(),
                    _parse_date(row["citation_date"], line_no, "citation_date"),
                )
            )
    finally:
        handle.close()
    return events


def inventors_by_patent(links: Iterable[InventorLink]) -> dict[str, frozenset]:
    """Group inventor ids by patent id."""
    out: dict[str, set] = {}
    for link in links:
        out.setdefault(link.patent_id, set()).add(link.inventor_id)
    return {pid: frozenset(invs) for pid, invs in out.items()}
