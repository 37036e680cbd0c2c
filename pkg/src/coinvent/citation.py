"""First-citation tracking and classification against a community structure.

For every cohort patent associated with the co-inventor LCC, the earliest
citation within a 10-year window from a patent with at least one LCC
inventor is kept and typed: Self when the citing and cited patents share an
inventor, InCommunity when (non-self) citing and cited inventors share a
detected community, OutOfCommunity otherwise. Lags run from the cited
patent's grant date to the citing patent's application date, so negative
lags occur.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .community import Partition
from .errors import UnpartitionedNode
from .ingest import CitationEvent, PatentRecord

DAYS_PER_MONTH = 30.4375  # 365.25 / 12


class Category(str, Enum):
    SELF = "self"
    IN_COMMUNITY = "in_community"
    OUT_OF_COMMUNITY = "out_of_community"


@dataclass
class FirstCitation:
    cited_patent: str
    citing_patent: str
    lag_months: float
    category: Category | None = None


def compute_lag(cited: PatentRecord, citing: PatentRecord) -> float:
    """Signed lag in months from cited grant to citing application."""
    days = (citing.application_date - cited.grant_date).days
    return days / DAYS_PER_MONTH


def first_citations(
    lcc_patents: Mapping[str, PatentRecord],
    events: Iterable[CitationEvent],
    inventors_of: Mapping[str, frozenset],
    lcc_inventors: set,
    window_months: float = 120.0,
    tie_rule: str = "category",
) -> list[FirstCitation]:
    """Earliest qualifying citation per cited patent, uncategorized.

    A citation qualifies when the citing patent lists at least one LCC
    inventor and the lag does not exceed the window (events are already
    dated by the citing application date, so the lag comes straight from
    the event). Ties on the citation date resolve per ``tie_rule``:
    "category" prefers a self-citation (the only category decidable without
    a partition), then the lowest citing patent key; "citing_id" uses the
    lowest key alone.
    """
    if tie_rule not in ("category", "citing_id"):
        raise ValueError(f"unknown tie_rule {tie_rule!r}")
    best: dict[str, tuple] = {}
    for event in events:
        cited = lcc_patents.get(event.cited_id)
        if cited is None:
            continue
        citing_inventors = inventors_of.get(event.citing_id, frozenset())
        if not (citing_inventors & lcc_inventors):
            continue
        lag = (event.citation_date - cited.grant_date).days / DAYS_PER_MONTH
        if lag > window_months:
            continue
        if tie_rule == "category":
            is_self = bool(citing_inventors & inventors_of.get(event.cited_id, frozenset()))
            rank = (event.citation_date, 0 if is_self else 1, event.citing_id)
        else:
            rank = (event.citation_date, 0, event.citing_id)
        incumbent = best.get(event.cited_id)
        if incumbent is None or rank < incumbent[0]:
            best[event.cited_id] = (rank, FirstCitation(event.cited_id, event.citing_id, lag))
    return [fc for _, fc in sorted(best.values(), key=lambda item: item[1].cited_patent)]


def classify(
    fc: FirstCitation,
    inventors_of: Mapping[str, frozenset],
    partition: Partition,
    lcc_inventors: set | None = None,
) -> Category:
    """Type one first citation against a community partition.

    Self comparison uses the full inventor lists; the community comparison
    is restricted to inventors that carry a partition assignment (i.e. LCC
    members). Raises UnpartitionedNode when an LCC inventor is missing from
    the partition.
    """
    cited_inv = inventors_of.get(fc.cited_patent, frozenset())
    citing_inv = inventors_of.get(fc.citing_patent, frozenset())
    if cited_inv & citing_inv:
        return Category.SELF
    assignment = partition.assignment()
    # every partition node is in `assignment`, so the unpartitioned check
    # only bites when an explicit LCC membership set is supplied
    required = lcc_inventors if lcc_inventors is not None else frozenset()

    def communities(inventors):
        comms = set()
        for inv in inventors:
            if inv in assignment:
                comms.add(assignment[inv])
            elif inv in required:
                raise UnpartitionedNode(f"inventor {inv!r} lacks an assignment")
        return comms

    if communities(cited_inv) & communities(citing_inv):
        return Category.IN_COMMUNITY
    return Category.OUT_OF_COMMUNITY


def classify_all(
    fcs: Iterable[FirstCitation],
    inventors_of: Mapping[str, frozenset],
    partition: Partition,
    lcc_inventors: set | None = None,
) -> list[FirstCitation]:
    """Classify every first citation in place (returns the same objects)."""
    out = []
    for fc in fcs:
        fc.category = classify(fc, inventors_of, partition, lcc_inventors)
        out.append(fc)
    return out


@dataclass
class CohortCitationSummary:
    """Counts backing the cohort summary table."""

    lcc_associated_patents: int
    first_cited_within_window: int
    first_cited_by_lcc_inventors: int
    self_count: int
    in_community_count: int
    out_of_community_count: int

    def as_dict(self) -> dict:
        return {
            "lcc_associated_patents": self.lcc_associated_patents,
            "first_cited_within_window": self.first_cited_within_window,
            "first_cited_by_lcc_inventors": self.first_cited_by_lcc_inventors,
            "first_citation_self": self.self_count,
            "first_citation_in_community": self.in_community_count,
            "first_citation_out_of_community": self.out_of_community_count,
        }


def summarize(
    classified: Iterable[FirstCitation],
    lcc_associated_patents: int = 0,
    first_cited_within_window: int = 0,
) -> CohortCitationSummary:
    """Tally categories; the two cohort-level counts come from the caller
    (they require the unrestricted citation events, not just the
    LCC-citer-restricted first citations)."""
    counts = {Category.SELF: 0, Category.IN_COMMUNITY: 0, Category.OUT_OF_COMMUNITY: 0}
    total = 0
    for fc in classified:
        if fc.category is None:
            raise ValueError(f"first citation of {fc.cited_patent!r} is unclassified")
        counts[fc.category] += 1
        total += 1
    return CohortCitationSummary(
        lcc_associated_patents=lcc_associated_patents,
        first_cited_within_window=first_cited_within_window,
        first_cited_by_lcc_inventors=total,
        self_count=counts[Category.SELF],
        in_community_count=counts[Category.IN_COMMUNITY],
        out_of_community_count=counts[Category.OUT_OF_COMMUNITY],
    )


def count_first_cited_within_window(
    cited_patents: Mapping[str, PatentRecord],
    events: Iterable[CitationEvent],
    window_months: float = 120.0,
) -> int:
    """Patents from ``cited_patents`` with at least one citation (any
    citer) inside the lag window."""
    hit = set()
    for event in events:
        cited = cited_patents.get(event.cited_id)
        if cited is None or event.cited_id in hit:
            continue
        if (event.citation_date - cited.grant_date).days / DAYS_PER_MONTH <= window_months:
            hit.add(event.cited_id)
    return len(hit)


def write_first_citations(path, fcs: Iterable[FirstCitation]) -> None:
    """CSV rows ``cited_id,citing_id,lag_months,category``."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["cited_id", "citing_id", "lag_months", "category"])
        for fc in sorted(fcs, key=lambda f: f.cited_patent):
            writer.writerow(
                [fc.cited_patent, fc.citing_patent, repr(fc.lag_months),
                 fc.category.value if fc.category else ""]
            )


def load_first_citations(path) -> list[FirstCitation]:
    out = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            category = Category(row["category"]) if row["category"] else None
            out.append(
                FirstCitation(row["cited_id"], row["citing_id"], float(row["lag_months"]), category)
            )
    return out
