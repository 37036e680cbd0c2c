"""Co-inventor network construction and patent first-citation lag analysis.

Builds the weighted co-inventor graph for a patent cohort by bipartite
projection, detects communities on its largest connected component with
five algorithms, classifies each patent's first citation as self /
in-community / out-of-community, and quantifies the in-community lag
advantage with log-normal fits, Welch tests, subsampling, and a
randomized-structure control.
"""

from .citation import (
    Category,
    CohortCitationSummary,
    FirstCitation,
    classify,
    classify_all,
    compute_lag,
    first_citations,
    summarize,
)
from .community import (
    DETECTORS,
    Partition,
    adjusted_rand_index,
    detect,
    detect_greedy,
    detect_infomap,
    detect_label_propagation,
    detect_louvain,
    detect_random_walks,
    map_equation,
    modularity,
    randomize_within_structure,
    size_distribution,
)
from .graph import (
    BipartiteNetwork,
    ComponentLabeling,
    WeightedGraph,
    build_bipartite,
    composition_by_attribute,
    connected_components,
    induced_subgraph,
    largest_connected_component,
    project,
)
from .ingest import (
    CitationRecord,
    InventorLink,
    PatentRecord,
    Schema,
    filter_cohort,
    load_citations,
    load_inventor_links,
    load_patents,
    resolve_citation_events,
)
from .pipeline import PipelineConfig, run_control, run_pipeline
from .stats import (
    LagHistogram,
    LogNormalFit,
    SummaryStats,
    WelchResult,
    adjust_zero_peak,
    fit_lognormal,
    histogram,
    log_shift_welch,
    raw_summary,
    subsample_welch,
    welch_t,
)
from .synth import SynthConfig, generate

__version__ = "0.1.0"
