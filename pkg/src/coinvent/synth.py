"""Synthetic patent cohorts with planted communities and a lag advantage.

Inventors are split into planted communities. Each patent is homed in a
community and draws its team from there without replacement, each slot
escaping to a uniformly random outside inventor with a small probability
derived from the configured within/between edge probabilities; the
per-community patent counts are calibrated so the projected co-inventor
graph realizes the configured within-community density. Every cohort
patent then receives one citing patent whose team sits inside (or outside)
the cited patent's home community, with the citation lag drawn from a
shifted log-normal and reduced by the configured advantage for
in-community citers.

Output uses exactly the delimited formats the ingest module consumes, so a
generated directory can drive the full pipeline end to end.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .citation import DAYS_PER_MONTH
from .errors import InfeasibleConfig
from .ingest import (
    CitationRecord,
    InventorLink,
    PatentRecord,
    write_citations,
    write_inventor_links,
    write_patents,
)


@dataclass
class SynthConfig:
    community_sizes: list = field(default_factory=lambda: [50, 50, 50, 50])
    within_p: float = 0.3
    between_p: float = 0.01
    patents_per_inventor: float | None = None
    team_size_min: int = 2
    team_size_max: int = 4
    citer_team_min: int = 1
    citer_team_max: int = 3
    lag_shift: float = -6.0
    lag_mu: float = 3.2188758248682006  # ln 25
    lag_sigma: float = 0.55
    advantage_months: float = 0.0
    in_citation_fraction: float = 0.5
    start_year: int = 1995
    n_years: int = 5
    cohort_class: str = "257"
    citer_class: str = "999"
    seed: int = 0

    def validate(self) -> None:
        if not self.community_sizes or any(s <= 0 for s in self.community_sizes):
            raise InfeasibleConfig("community sizes must be positive")
        if not (0.0 < self.within_p <= 1.0) or not (0.0 <= self.between_p <= 1.0):
            raise InfeasibleConfig("edge probabilities must lie in (0,1] / [0,1]")
        if self.advantage_months < 0:
            raise InfeasibleConfig("advantage must be nonnegative")
        if self.team_size_min < 1 or self.team_size_max < self.team_size_min:
            raise InfeasibleConfig("bad team size range")
        if self.citer_team_min < 1 or self.citer_team_max < self.citer_team_min:
            raise InfeasibleConfig("bad citer team size range")
        if self.team_size_max > min(self.community_sizes):
            raise InfeasibleConfig(
                f"team size {self.team_size_max} exceeds smallest community "
                f"({min(self.community_sizes)})"
            )
        if not (0.0 <= self.in_citation_fraction <= 1.0):
            raise InfeasibleConfig("in_citation_fraction must lie in [0,1]")
        if self.patents_per_inventor is not None and self.patents_per_inventor <= 0:
            raise InfeasibleConfig("patents_per_inventor must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise InfeasibleConfig(f"unknown synth config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class SynthData:
    patents: dict
    links: set
    citations: set
    planted: dict  # inventor -> community index
    config: SynthConfig


def _escape_probability(cfg: SynthConfig, home_size: int, n_total: int) -> float:
    """Per-slot probability of drawing a team member from outside home.

    Chosen so the expected fraction of cross-community co-invention edges
    matches the planted-partition ratio implied by within_p / between_p
    (a cross slot makes roughly two cross edges per within edge pair).
    """
    outside = n_total - home_size
    if outside == 0:
        return 0.0
    w = cfg.within_p * max(home_size - 1, 1)
    b = cfg.between_p * outside
    return b / (w + b) / 2.0


def _patents_per_community(cfg: SynthConfig, sizes, n_total) -> list[int]:
    """Patent counts per home community.

    Without an explicit patents_per_inventor, the count is calibrated so the
    projected within-community pair density matches within_p: a patent with
    k home members realizes C(k,2) pair draws, and repeated draws of the
    same pair collide, so the draw budget follows the occupancy formula
    d = ln(1 - p) / ln(1 - 1/C(s,2)).
    """
    mean_team = (cfg.team_size_min + cfg.team_size_max) / 2.0
    if cfg.patents_per_inventor is not None:
        total = max(int(round(n_total * cfg.patents_per_inventor / mean_team)), 1)
        return [max(int(round(total * s / n_total)), 1) for s in sizes]
    team_range = range(cfg.team_size_min, cfg.team_size_max + 1)
    counts = []
    for s in sizes:
        pairs = s * (s - 1) // 2
        if pairs == 0:
            counts.append(1)
            continue
        eps = _escape_probability(cfg, s, n_total)
        mean_home_pairs = sum(
            t * (t - 1) / 2.0 * (1.0 - eps) ** 2 for t in team_range
        ) / len(team_range)
        p = min(cfg.within_p, 0.99)
        draws = math.log(1.0 - p) / math.log(1.0 - 1.0 / pairs)
        counts.append(max(int(round(draws / mean_home_pairs)), 1))
    return counts


def generate(cfg: SynthConfig) -> SynthData:
    """Build a synthetic cohort; deterministic given cfg.seed."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    sizes = list(cfg.community_sizes)
    n_comms = len(sizes)
    inventors: list[str] = []
    planted: dict[str, int] = {}
    pools: list[list[str]] = []
    for c, size in enumerate(sizes):
        pool = [f"I{c:03d}_{k:04d}" for k in range(size)]
        pools.append(pool)
        inventors.extend(pool)
        for inv in pool:
            planted[inv] = c
    n_total = len(inventors)
    others = [
        [inv for c2, pool in enumerate(pools) if c2 != c for inv in pool]
        for c in range(n_comms)
    ]

    per_community = _patents_per_community(cfg, sizes, n_total)
    homes = [c for c, count in enumerate(per_community) for _ in range(count)]
    month_span = cfg.n_years * 12

    patents: dict[str, PatentRecord] = {}
    links: set[InventorLink] = set()
    home_of: dict[str, int] = {}

    for k, home in enumerate(homes):
        pid = f"P{k:06d}"
        team_size = int(rng.integers(cfg.team_size_min, cfg.team_size_max + 1))
        eps = _escape_probability(cfg, sizes[home], n_total)
        n_out = int(rng.binomial(team_size, eps)) if eps > 0 else 0
        n_out = min(n_out, team_size - 1, len(others[home]))
        team = list(rng.choice(pools[home], size=team_size - n_out, replace=False))
        if n_out:
            team += list(rng.choice(others[home], size=n_out, replace=False))
        grant_month = int(rng.integers(month_span))
        granted = date(cfg.start_year + grant_month // 12, grant_month % 12 + 1, 1)
        applied = granted - timedelta(days=int(rng.integers(365, 365 * 3)))
        patents[pid] = PatentRecord(pid, granted, applied, cfg.cohort_class, None)
        home_of[pid] = home
        for inv in team:
            links.add(InventorLink(pid, inv))

    citations: set[CitationRecord] = set()
    team_of = {}
    for link in links:
        team_of.setdefault(link.patent_id, set()).add(link.inventor_id)

    for k, pid in enumerate(sorted(patents)):
        cited = patents[pid]
        home = home_of[pid]
        in_arm = bool(rng.random() < cfg.in_citation_fraction) if n_comms > 1 else True
        lag = cfg.lag_shift + float(rng.lognormal(cfg.lag_mu, cfg.lag_sigma))
        if in_arm:
            lag -= cfg.advantage_months
        if in_arm:
            pool = [inv for inv in pools[home] if inv not in team_of[pid]]
        else:
            target = int(rng.choice([c for c in range(n_comms) if c != home]))
            pool = [inv for inv in pools[target] if inv not in team_of[pid]]
        if not pool:
            continue  # cited team swallowed the whole community; skip
        citer_size = min(
            int(rng.integers(cfg.citer_team_min, cfg.citer_team_max + 1)), len(pool)
        )
        citer_team = list(rng.choice(pool, size=citer_size, replace=False))
        applied = cited.grant_date + timedelta(days=int(round(lag * DAYS_PER_MONTH)))
        granted = applied + timedelta(days=730)
        citer_id = f"C{k:06d}"
        patents[citer_id] = PatentRecord(citer_id, granted, applied, cfg.citer_class, None)
        for inv in citer_team:
            links.add(InventorLink(citer_id, inv))
        citations.add(CitationRecord(citer_id, pid))

    return SynthData(patents, links, citations, planted, cfg)


def write_synth(data: SynthData, out_dir) -> dict:
    """Write the generated cohort in ingest formats plus a truth sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_patents(out / "patents.tsv", data.patents.values())
    write_inventor_links(out / "inventor_links.tsv", data.links)
    write_citations(out / "citations.tsv", data.citations)
    with open(out / "planted_partition.tsv", "w", encoding="utf-8") as handle:
        for inv in sorted(data.planted):
            handle.write(f"{inv}\t{data.planted[inv]}\n")
    manifest = {
        "config": asdict(data.config),
        "n_patents": len(data.patents),
        "n_links": len(data.links),
        "n_citations": len(data.citations),
        "n_inventors": len(data.planted),
    }
    with open(out / "synth_manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return manifest
