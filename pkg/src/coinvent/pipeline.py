"""Batch pipeline: stage functions over file intermediates, plus the full run.

Each stage consumes and produces only declared files inside the output
directory, so any stage can be re-run from cached intermediates. All
randomness flows from seeds named in the config; identical configs produce
byte-identical JSON/CSV outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import citation as cit
from . import community as comm
from . import graph as g
from . import ingest as ing
from . import stats as st
from .errors import CoinventError, ConfigError

VALID_DETECTORS = ("greedy", "louvain", "infomap", "walktrap", "labelprop")
REQUIRED_SEEDS = ("detect", "control", "subsample")


@dataclass
class PipelineConfig:
    patents: dict
    inventor_links: dict
    citations: dict
    cohort_classes: list
    cohort_years: list
    detectors: list
    seeds: dict
    out_dir: str
    window_months: float = 120.0
    bin_width: float = 2.0
    subsample_k: int = 300
    subsample_reps: int = 500
    subsample_alpha: float = 0.05
    tie_rule: str = "category"
    walktrap_steps: int = 4
    self_ari_runs: int = 10
    assignee_shares: bool = True
    figures: bool = True

    def __post_init__(self):
        for det in self.detectors:
            if det not in VALID_DETECTORS:
                raise ConfigError(
                    f"unknown detector {det!r}; valid: {', '.join(VALID_DETECTORS)}"
                )
        missing = [s for s in REQUIRED_SEEDS if s not in self.seeds]
        if missing:
            raise ConfigError(
                f"seeds must be stated explicitly in the config; missing: {missing}"
            )
        if len(self.cohort_years) != 2 or self.cohort_years[0] > self.cohort_years[1]:
            raise ConfigError("cohort_years must be an inclusive [first, last] pair")
        if self.tie_rule not in ("category", "citing_id"):
            raise ConfigError(f"unknown tie_rule {self.tie_rule!r}")
        for spec_name in ("patents", "inventor_links", "citations"):
            spec = getattr(self, spec_name)
            if "path" not in spec:
                raise ConfigError(f"input {spec_name!r} lacks a 'path'")

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
        if overrides:
            raw.update(overrides)
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"patents", "inventor_links", "citations", "cohort_classes",
                   "cohort_years", "detectors", "seeds", "out_dir"} - set(raw)
        if missing:
            raise ConfigError(f"config lacks required keys: {sorted(missing)}")
        return cls(**raw)

    def out(self) -> Path:
        path = Path(self.out_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def input_schema(self, name: str) -> tuple[str, ing.Schema]:
        spec = getattr(self, name)
        return spec["path"], ing.Schema.from_dict(spec)

    def as_dict(self) -> dict:
        return {
            f: getattr(self, f)
            for f in self.__dataclass_fields__
        }


class StageFailure(CoinventError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _read_json(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


# --------------------------------------------------------------------------
# stages
# --------------------------------------------------------------------------

def stage_ingest(cfg: PipelineConfig) -> dict:
    out = cfg.out()
    patents_path, patents_schema = cfg.input_schema("patents")
    citations_path, citations_schema = cfg.input_schema("citations")
    patents = ing.load_patents(patents_path, patents_schema)
    cohort = ing.filter_cohort(
        patents, set(cfg.cohort_classes), (cfg.cohort_years[0], cfg.cohort_years[1])
    )
    citations = ing.load_citations(citations_path, citations_schema)
    events, dropped = ing.resolve_citation_events(citations, patents)
    ing.write_patents(out / "cohort_patents.tsv", cohort.values())
    ing.write_citation_events(out / "citation_events.tsv", events)
    summary = {
        "patents_loaded": len(patents),
        "cohort_patents": len(cohort),
        "citations_loaded": len(citations),
        "citation_events": len(events),
        "citations_dropped_unresolvable": dropped,
    }
    _write_json(out / "ingest_summary.json", summary)
    return summary


def _inventor_assignee_map(cohort, links) -> dict:
    """Most frequent assignee across an inventor's cohort patents (ties to
    the lexicographically smallest assignee id)."""
    tallies: dict[str, dict[str, int]] = {}
    for link in links:
        patent = cohort.get(link.patent_id)
        if patent is None or patent.assignee_id is None:
            continue
        tally = tallies.setdefault(link.inventor_id, {})
        tally[patent.assignee_id] = tally.get(patent.assignee_id, 0) + 1
    return {
        inv: min((a for a, c in tally.items() if c == max(tally.values())))
        for inv, tally in tallies.items()
    }


def stage_project(cfg: PipelineConfig) -> dict:
    out = cfg.out()
    links_path, links_schema = cfg.input_schema("inventor_links")
    cohort = ing.load_patents(out / "cohort_patents.tsv")
    links = ing.load_inventor_links(links_path, links_schema)
    bipartite = g.build_bipartite(cohort, links)
    full = g.project(bipartite)
    labeling = g.connected_components(full)
    lcc = g.largest_connected_component(full)
    g.write_edge_list(out / "graph_full_edges.tsv", full)
    g.write_edge_list(out / "lcc_edges.tsv", lcc)
    g.write_graphml(out / "lcc.graphml", lcc)
    summary = {
        "inventors": bipartite.inventor_count(),
        "links_excluded_non_cohort": bipartite.excluded_links,
        "graph_edges": full.num_edges(),
        "components": labeling.num_components(),
        "lcc_nodes": lcc.num_nodes(),
        "lcc_share": lcc.num_nodes() / full.num_nodes() if full.num_nodes() else 0.0,
    }
    if cfg.assignee_shares:
        attr = _inventor_assignee_map(cohort, links)
        shares = g.composition_by_attribute(lcc.nodes, attr)
        top = sorted(shares.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
        summary["lcc_assignee_shares_top10"] = {k: v for k, v in top}
    _write_json(out / "graph_summary.json", summary)
    return summary


def detect_one(cfg: PipelineConfig, graph, algorithm: str):
    params = {}
    if algorithm == "walktrap":
        params["steps"] = cfg.walktrap_steps
    return comm.detect(graph, algorithm, seed=cfg.seeds["detect"], **params)


def stage_detect(cfg: PipelineConfig, algorithm: str | None = None) -> dict:
    out = cfg.out()
    graph = g.load_edge_list(out / "lcc_edges.tsv")
    algos = [algorithm] if algorithm else list(cfg.detectors)
    summary = {}
    for algo in algos:
        part = detect_one(cfg, graph, algo)
        part.meta["modularity"] = comm.modularity(graph, part)
        part.meta["map_equation"] = comm.map_equation(graph, part)
        comm.write_partition(out / f"partition_{algo}.tsv", part)
        summary[algo] = {
            "num_communities": part.num_communities,
            "largest_community": part.largest_size(),
            "modularity": part.meta["modularity"],
            "map_equation": part.meta["map_equation"],
        }
    return summary


def _classification_inputs(cfg: PipelineConfig):
    out = cfg.out()
    cohort = ing.load_patents(out / "cohort_patents.tsv")
    events = ing.load_citation_events(out / "citation_events.tsv")
    links_path, links_schema = cfg.input_schema("inventor_links")
    links = ing.load_inventor_links(links_path, links_schema)
    inventors_of = ing.inventors_by_patent(links)
    return cohort, events, inventors_of


def stage_classify(cfg: PipelineConfig, algorithm: str) -> dict:
    out = cfg.out()
    cohort, events, inventors_of = _classification_inputs(cfg)
    partition = comm.load_partition(out / f"partition_{algorithm}.tsv")
    lcc_inventors = set(partition.nodes)
    lcc_patents = {
        pid: p
        for pid, p in cohort.items()
        if inventors_of.get(pid, frozenset()) & lcc_inventors
    }
    fcs = cit.first_citations(
        lcc_patents, events, inventors_of, lcc_inventors,
        window_months=cfg.window_months, tie_rule=cfg.tie_rule,
    )
    cit.classify_all(fcs, inventors_of, partition, lcc_inventors)
    cit.write_first_citations(out / f"first_citations_{algorithm}.csv", fcs)
    summary = cit.summarize(
        fcs,
        lcc_associated_patents=len(lcc_patents),
        first_cited_within_window=cit.count_first_cited_within_window(
            lcc_patents, events, cfg.window_months
        ),
    ).as_dict()
    summary["cohort_patents"] = len(cohort)
    summary["cohort_first_cited_within_window"] = cit.count_first_cited_within_window(
        cohort, events, cfg.window_months
    )
    _write_json(out / f"citation_summary_{algorithm}.json", summary)
    return summary


def _lags_by_category(fcs) -> dict:
    lags = {c.value: [] for c in cit.Category}
    for fc in fcs:
        lags[fc.category.value].append(fc.lag_months)
    return lags


def _fit_or_marker(hist, **kwargs) -> dict:
    try:
        return st.fit_lognormal(hist, **kwargs).as_dict()
    except CoinventError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def _welch_or_marker(fn, *args, **kwargs) -> dict:
    try:
        return fn(*args, **kwargs).as_dict()
    except CoinventError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def stage_stats(cfg: PipelineConfig, algorithm: str) -> dict:
    out = cfg.out()
    fcs = cit.load_first_citations(out / f"first_citations_{algorithm}.csv")
    lags = _lags_by_category(fcs)
    report: dict = {"algorithm": algorithm, "counts": {k: len(v) for k, v in lags.items()}}
    for category, values in lags.items():
        if not values:
            report[category] = {"error": "EmptySample: no citations in category"}
            continue
        hist = st.histogram(values, cfg.bin_width)
        st.write_histogram_csv(out / f"hist_{algorithm}_{category}.csv", hist)
        block = {
            "raw": st.raw_summary(values, cfg.bin_width).as_dict(),
            "fit": _fit_or_marker(hist),
        }
        if category == cit.Category.SELF.value:
            block["fit_excluding_zero_bin"] = _fit_or_marker(hist, exclude_zero_bin=True)
            try:
                interp = st.adjust_zero_peak(hist, "interpolate")
                removed = st.adjust_zero_peak(hist, "remove")
                block["fit_zero_interpolated"] = _fit_or_marker(interp)
                block["fit_zero_removed"] = _fit_or_marker(removed)
            except CoinventError as exc:
                block["zero_peak_adjustment"] = {"error": f"{type(exc).__name__}: {exc}"}
        report[category] = block
    in_lags = lags[cit.Category.IN_COMMUNITY.value]
    out_lags = lags[cit.Category.OUT_OF_COMMUNITY.value]
    if in_lags and out_lags:
        report["welch"] = {
            "full": _welch_or_marker(st.welch_t, out_lags, in_lags),
            "log_shifted": _welch_or_marker(st.log_shift_welch, out_lags, in_lags),
        }
        try:
            report["welch"]["subsampled"] = st.subsample_welch(
                out_lags, in_lags,
                k=cfg.subsample_k, reps=cfg.subsample_reps,
                alpha=cfg.subsample_alpha, seed=cfg.seeds["subsample"],
            ).as_dict()
        except CoinventError as exc:
            report["welch"]["subsampled"] = {"error": f"{type(exc).__name__}: {exc}"}
    _write_json(out / f"stats_{algorithm}.json", report)
    return report


def stage_control(cfg: PipelineConfig, algorithm: str) -> dict:
    """Randomized-structure control: same community sizes, shuffled members."""
    out = cfg.out()
    cohort, events, inventors_of = _classification_inputs(cfg)
    partition = comm.load_partition(out / f"partition_{algorithm}.tsv")
    randomized = comm.randomize_within_structure(partition, cfg.seeds["control"])
    comm.write_partition(out / f"partition_{algorithm}_randomized.tsv", randomized)
    lcc_inventors = set(partition.nodes)
    lcc_patents = {
        pid: p
        for pid, p in cohort.items()
        if inventors_of.get(pid, frozenset()) & lcc_inventors
    }
    fcs = cit.first_citations(
        lcc_patents, events, inventors_of, lcc_inventors,
        window_months=cfg.window_months, tie_rule=cfg.tie_rule,
    )
    cit.classify_all(fcs, inventors_of, randomized, lcc_inventors)
    lags = _lags_by_category(fcs)
    in_lags = lags[cit.Category.IN_COMMUNITY.value]
    out_lags = lags[cit.Category.OUT_OF_COMMUNITY.value]
    report = {
        "algorithm": algorithm,
        "seed": cfg.seeds["control"],
        "ari_vs_original": comm.adjusted_rand_index(partition, randomized),
        "counts": {k: len(v) for k, v in lags.items()},
    }
    if in_lags:
        report["in_community"] = st.raw_summary(in_lags, cfg.bin_width).as_dict()
    if out_lags:
        report["out_of_community"] = st.raw_summary(out_lags, cfg.bin_width).as_dict()
    if len(in_lags) >= 2 and len(out_lags) >= 2:
        report["welch_full"] = _welch_or_marker(st.welch_t, out_lags, in_lags)
    _write_json(out / f"control_{algorithm}.json", report)
    return report


def stage_report(cfg: PipelineConfig) -> dict:
    out = cfg.out()
    report: dict = {"config": cfg.as_dict()}
    report["ingest"] = _read_json(out / "ingest_summary.json")
    report["graph"] = _read_json(out / "graph_summary.json")

    partitions = {}
    community_table: dict = {}
    for algo in cfg.detectors:
        part = comm.load_partition(out / f"partition_{algo}.tsv")
        partitions[algo] = part
        sizes = comm.size_distribution(part, bin_width=5)
        community_table[algo] = {
            "num_communities": part.num_communities,
            "largest_community": part.largest_size(),
            "modularity": part.meta.get("modularity"),
            "map_equation": part.meta.get("map_equation"),
            "size_histogram_width5": sizes.counts,
        }
        summary_path = out / f"citation_summary_{algo}.json"
        if summary_path.exists():
            community_table[algo]["in_community_first_citations"] = _read_json(summary_path)[
                "first_citation_in_community"
            ]
    ari = comm.pairwise_ari_matrix(partitions)
    if cfg.self_ari_runs >= 2:
        graph = g.load_edge_list(out / "lcc_edges.tsv")
        for algo in cfg.detectors:
            params = {"steps": cfg.walktrap_steps} if algo == "walktrap" else {}
            ari[algo][algo] = comm.multirun_self_similarity(
                graph, comm.DETECTORS[algo], runs=cfg.self_ari_runs,
                seed=cfg.seeds["detect"], **params,
            )
    report["community_comparison"] = community_table
    report["ari_matrix"] = ari

    lag_stats = {}
    controls = {}
    for algo in cfg.detectors:
        stats_path = out / f"stats_{algo}.json"
        if stats_path.exists():
            lag_stats[algo] = _read_json(stats_path)
        control_path = out / f"control_{algo}.json"
        if control_path.exists():
            controls[algo] = _read_json(control_path)
    report["lag_statistics"] = lag_stats
    report["controls"] = controls

    citation_summaries = {
        algo: _read_json(out / f"citation_summary_{algo}.json")
        for algo in cfg.detectors
        if (out / f"citation_summary_{algo}.json").exists()
    }
    report["citation_summaries"] = citation_summaries

    _write_json(out / "report.json", report)
    _write_json(out / "manifest.json", {"config": cfg.as_dict(), "seeds": cfg.seeds})

    if cfg.figures:
        from . import report as rep

        rep.render_figures(cfg, out)
    return report


STAGES = ("ingest", "project", "detect", "classify", "stats", "control", "report")


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute every stage in order; partial outputs survive a failure.

    A failing stage writes a FAILED_<stage>.json marker into the output
    directory and the error is re-raised with stage attribution.
    """
    results: dict = {}

    def run(stage, fn, *args):
        try:
            results[stage] = fn(*args)
        except Exception as exc:
            _write_json(cfg.out() / f"FAILED_{stage}.json",
                        {"stage": stage, "error": f"{type(exc).__name__}: {exc}"})
            raise StageFailure(stage, exc) from exc

    run("ingest", stage_ingest, cfg)
    run("project", stage_project, cfg)
    run("detect", stage_detect, cfg)
    for algo in cfg.detectors:
        run(f"classify:{algo}", stage_classify, cfg, algo)
        run(f"stats:{algo}", stage_stats, cfg, algo)
        run(f"control:{algo}", stage_control, cfg, algo)
    run("report", stage_report, cfg)
    return results


def run_control(cfg: PipelineConfig, algorithm: str) -> dict:
    """Spec-level control entry point (see stage_control)."""
    return stage_control(cfg, algorithm)
