"""Command-line entry points for the analysis pipeline.

Stages run separately over file intermediates so the expensive detection
step can be cached while downstream statistics are iterated on:

    coinvent synth    --synth-config synth.json --out-dir data/
    coinvent ingest   --config pipeline.json
    coinvent project  --config pipeline.json
    coinvent detect   --config pipeline.json [--algorithm louvain]
    coinvent classify --config pipeline.json [--algorithm louvain]
    coinvent stats    --config pipeline.json [--algorithm louvain]
    coinvent control  --config pipeline.json [--algorithm louvain]
    coinvent report   --config pipeline.json

Every scalar config value can be overridden by a flag of the same name
(e.g. --window-months, --bin-width, --tie-rule, --out-dir). Exit code is 0
on success; failures print a stage-tagged diagnostic and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import pipeline as pipe
from . import synth as syn
from .errors import CoinventError

_OVERRIDE_FLAGS = {
    "out_dir": str,
    "window_months": float,
    "bin_width": float,
    "subsample_k": int,
    "subsample_reps": int,
    "subsample_alpha": float,
    "tie_rule": str,
    "walktrap_steps": int,
    "self_ari_runs": int,
}


def _add_common(parser: argparse.ArgumentParser, with_algorithm: bool = False):
    parser.add_argument("--config", required=True, help="pipeline config (JSON)")
    for name, typ in _OVERRIDE_FLAGS.items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=typ, default=None)
    parser.add_argument(
        "--detectors", default=None,
        help="comma-separated detector list overriding the config",
    )
    parser.add_argument(
        "--seed-detect", type=int, default=None,
        help="override seeds.detect from the config",
    )
    parser.add_argument("--seed-control", type=int, default=None)
    parser.add_argument("--seed-subsample", type=int, default=None)
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering in the report stage")
    if with_algorithm:
        parser.add_argument(
            "--algorithm", default=None,
            help="run only this detector (default: all configured)",
        )


def _load_config(args) -> pipe.PipelineConfig:
    overrides: dict = {}
    for name in _OVERRIDE_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.detectors is not None:
        overrides["detectors"] = [d.strip() for d in args.detectors.split(",") if d.strip()]
    if args.no_figures:
        overrides["figures"] = False
    cfg = pipe.PipelineConfig.from_file(args.config, overrides)
    for key in ("detect", "control", "subsample"):
        override = getattr(args, f"seed_{key}", None)
        if override is not None:
            cfg.seeds[key] = override
    return cfg


def _algorithms(cfg: pipe.PipelineConfig, args) -> list:
    if getattr(args, "algorithm", None):
        if args.algorithm not in pipe.VALID_DETECTORS:
            raise pipe.ConfigError(f"unknown detector {args.algorithm!r}")
        return [args.algorithm]
    return list(cfg.detectors)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="coinvent",
        description="co-inventor network and first-citation lag analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth_p = sub.add_parser("synth", help="generate a synthetic cohort")
    synth_p.add_argument("--synth-config", required=True, help="synth config (JSON)")
    synth_p.add_argument("--out-dir", required=True, help="directory for generated files")
    synth_p.add_argument("--seed", type=int, default=None, help="override config seed")

    for name, help_text, with_algo in (
        ("ingest", "load inputs, filter the cohort, date citation events", False),
        ("project", "build and project the co-inventor network, extract the LCC", False),
        ("detect", "run community detection on the LCC", True),
        ("classify", "type first citations against a partition", True),
        ("stats", "histograms, fits, and Welch tests per category", True),
        ("control", "randomized-community control experiment", True),
        ("report", "aggregate a report bundle and render figures", False),
    ):
        stage_p = sub.add_parser(name, help=help_text)
        _add_common(stage_p, with_algorithm=with_algo)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except CoinventError as exc:
        print(f"coinvent {args.command}: error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "synth":
        with open(args.synth_config, encoding="utf-8") as handle:
            raw = json.load(handle)
        if args.seed is not None:
            raw["seed"] = args.seed
        cfg = syn.SynthConfig.from_dict(raw)
        manifest = syn.write_synth(syn.generate(cfg), args.out_dir)
        print(json.dumps(manifest, indent=2, sort_keys=True))
        return 0

    cfg = _load_config(args)
    if args.command == "ingest":
        result = pipe.stage_ingest(cfg)
    elif args.command == "project":
        result = pipe.stage_project(cfg)
    elif args.command == "detect":
        result = {}
        for a in _algorithms(cfg, args):
            result.update(pipe.stage_detect(cfg, a))
    elif args.command == "classify":
        result = {a: pipe.stage_classify(cfg, a) for a in _algorithms(cfg, args)}
    elif args.command == "stats":
        result = {a: pipe.stage_stats(cfg, a) for a in _algorithms(cfg, args)}
    elif args.command == "control":
        result = {a: pipe.stage_control(cfg, a) for a in _algorithms(cfg, args)}
    elif args.command == "report":
        result = pipe.stage_report(cfg)
        result = {"written": str(cfg.out() / "report.json")}
    else:  # pragma: no cover - argparse enforces the choices
        raise AssertionError(args.command)
    print(json.dumps(result, indent=2, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
