"""Command-line entry points: match, eval, and sweep.

Option values resolve in precedence order: command-line flag, then
KGMATCH_-prefixed environment variable, then config file, then default.
Usage problems exit 2, runtime failures exit 1.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import sys
from pathlib import Path

from .alignment import read_alignment
from .config import ConfigError, load_config
from .embeddings import DimensionMismatch, FormatError
from .evaluation import evaluate_alignment, load_query_pairs, write_report
from .kg import load_graph
from .pipeline import MatchRunConfig, run_pair
from .rdf_parse import ParseError
from .similarity import SETTINGS, SimilaritySetting
from .sparql import QuerySyntaxError, UnsupportedFeature

logger = logging.getLogger(__name__)

# Anything a bad input file can raise; maps to exit code 1, not a traceback.
RUNTIME_ERRORS = (
    OSError,
    ValueError,
    KeyError,
    ParseError,
    QuerySyntaxError,
    UnsupportedFeature,
    FormatError,
    DimensionMismatch,
)

ENV_PREFIX = "KGMATCH_"

DEFAULTS = {
    "setting": "baseline",
    "ignore_case": False,
    "threshold": 0.5,
    "ie": False,
    "link_threshold": 0.8,
    "max_path_len": 3,
    "jobs": 1,
}


def _resolve(args: argparse.Namespace, key: str, config: dict):
    """Flag > environment > config file > built-in default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    env = os.environ.get(ENV_PREFIX + key.upper())
    if env is not None:
        default = DEFAULTS.get(key)
        if isinstance(default, bool):
            return env.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int) and not isinstance(default, bool):
            return int(env)
        if isinstance(default, float):
            return float(env)
        return env
    if key in config:
        return config[key]
    return DEFAULTS.get(key)


def _load_config_arg(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    try:
        return load_config(args.config)
    except FileNotFoundError:
        parser.error(f"config file not found: {args.config}")
    except ConfigError as exc:
        parser.error(f"config file {args.config}: {exc}")


def _build_match_config(
    args: argparse.Namespace, parser: argparse.ArgumentParser
) -> MatchRunConfig:
    config = _load_config_arg(args, parser)
    values = {
        key: _resolve(args, key, config)
        for key in (
            "source",
            "target",
            "queries",
            "out",
            "embeddings",
            "setting",
            "ignore_case",
            "threshold",
            "ie",
            "link_threshold",
            "max_path_len",
            "min_score",
            "model_tag",
        )
    }
    for key in ("source", "target", "queries", "out"):
        if values[key] is None:
            parser.error(f"--{key.replace('_', '-')} is required")
    if values["setting"] not in SETTINGS:
        parser.error(f"--setting must be one of {', '.join(SETTINGS)}")
    if values["setting"] != "baseline" and values["embeddings"] is None:
        parser.error(f"--embeddings is required for setting {values['setting']!r}")
    try:
        setting = SimilaritySetting(
            values["setting"], bool(values["ignore_case"]), float(values["threshold"])
        )
        return MatchRunConfig(
            source=values["source"],
            target=values["target"],
            queries=values["queries"],
            output_dir=values["out"],
            setting=setting,
            embeddings=values["embeddings"],
            ie_enabled=bool(values["ie"]),
            link_threshold=float(values["link_threshold"]),
            max_path_length=int(values["max_path_len"]),
            min_score=values["min_score"],
            formats=("json", "edoal") if getattr(args, "edoal", False) else ("json",),
            model_tag=values["model_tag"] or "",
        )
    except ValueError as exc:
        parser.error(str(exc))


def cmd_match(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = _build_match_config(args, parser)
    try:
        alignment, manifest = run_pair(cfg)
    except RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest_path = Path(cfg.output_dir) / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(
        f"{len(alignment.correspondences)} correspondences -> "
        + ", ".join(manifest["alignment_files"])
    )
    return 0


def cmd_eval(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        alignment = read_alignment(args.alignment)
        gs = load_graph([args.source])
        gt = load_graph([args.target])
        pairs = load_query_pairs(args.queries)
        report = evaluate_alignment(alignment, pairs, gs, gt)
    except RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    json_path, table_path = write_report(report, args.out)
    print(table_path.read_text(encoding="utf-8"), end="")
    print(f"report -> {json_path}")
    return 0


def _parse_grid(text: str, parser: argparse.ArgumentParser, flag: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        parser.error(f"{flag} expects comma-separated numbers")
    if not values:
        parser.error(f"{flag} must not be empty")
    if not all(0.0 <= v <= 1.0 for v in values):
        parser.error(f"{flag} values must lie in [0, 1]")
    return values


def _sweep_cell(cell_args: dict) -> dict:
    """Run one (setting, threshold, link-threshold) cell; safe to run in a pool."""
    cfg = MatchRunConfig(**cell_args["match"])
    alignment, manifest = run_pair(cfg)
    manifest_path = Path(cfg.output_dir) / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    gs = load_graph([cfg.source])
    gt = load_graph([cfg.target])
    pairs = load_query_pairs(cfg.queries)
    report = evaluate_alignment(alignment, pairs, gs, gt)
    write_report(report, cfg.output_dir)
    return {
        "setting": cfg.setting.kind,
        "ignore_case": cfg.setting.ignore_case,
        "threshold": cfg.setting.threshold,
        "link_threshold": cfg.link_threshold if cfg.ie_enabled else None,
        "alignment": manifest["alignment_files"][0],
        "correspondences": len(alignment.correspondences),
        "coverage": report.coverage,
        "precision": report.precision,
    }


def cmd_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _load_config_arg(args, parser)
    sweep_section = config.get("sweep", {}) if isinstance(config.get("sweep"), dict) else {}

    if args.thresholds is not None:
        thresholds = _parse_grid(args.thresholds, parser, "--thresholds")
    else:
        thresholds = [float(x) for x in sweep_section.get("thresholds", [])]
        if not thresholds:
            parser.error("--thresholds is required (or a [sweep] thresholds entry)")
    if args.settings is not None:
        settings = [s.strip() for s in args.settings.split(",") if s.strip()]
    else:
        settings = list(sweep_section.get("settings", []))
        if not settings:
            parser.error("--settings is required (or a [sweep] settings entry)")
    for s in settings:
        if s not in SETTINGS:
            parser.error(f"unknown setting {s!r} in sweep grid")
    ie = bool(_resolve(args, "ie", config))
    if args.link_thresholds is not None:
        link_thresholds = _parse_grid(args.link_thresholds, parser, "--link-thresholds")
    else:
        link_thresholds = [float(x) for x in sweep_section.get("link_thresholds", [])]
        if ie and not link_thresholds:
            parser.error("--link-thresholds is required when --ie is set")
    if not ie:
        link_thresholds = [float(_resolve(args, "link_threshold", config))]

    base = {
        key: _resolve(args, key, config)
        for key in ("source", "target", "queries", "out", "embeddings", "ignore_case",
                    "max_path_len", "min_score", "model_tag")
    }
    for key in ("source", "target", "queries", "out"):
        if base[key] is None:
            parser.error(f"--{key.replace('_', '-')} is required")
    if any(s != "baseline" for s in settings) and base["embeddings"] is None:
        parser.error("--embeddings is required for embedding settings in the grid")

    cells = []
    for setting in settings:
        for threshold in thresholds:
            for link_threshold in link_thresholds:
                name = f"{setting}-t{threshold:g}"
                if ie:
                    name += f"-lt{link_threshold:g}"
                cells.append(
                    {
                        "match": {
                            "source": base["source"],
                            "target": base["target"],
                            "queries": base["queries"],
                            "output_dir": str(Path(base["out"]) / name),
                            "setting": SimilaritySetting(
                                setting, bool(base["ignore_case"]), threshold
                            ),
                            "embeddings": None if setting == "baseline" else base["embeddings"],
                            "ie_enabled": ie,
                            "link_threshold": link_threshold,
                            "max_path_length": int(base["max_path_len"]),
                            "min_score": base["min_score"],
                            "model_tag": base["model_tag"] or "",
                        }
                    }
                )

    jobs = int(_resolve(args, "jobs", config))
    try:
        if jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_sweep_cell, cells))
        else:
            results = [_sweep_cell(cell) for cell in cells]
    except RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    best_per_threshold = {}
    for threshold in thresholds:
        rows = [r for r in results if r["threshold"] == threshold]
        best = max(rows, key=lambda r: r["coverage"]["query_fmeasure"])
        best_per_threshold[f"{threshold:g}"] = {
            "setting": best["setting"],
            "link_threshold": best["link_threshold"],
            "query_fmeasure": best["coverage"]["query_fmeasure"],
        }
    average_best = sum(
        v["query_fmeasure"] for v in best_per_threshold.values()
    ) / len(best_per_threshold)
    summary = {
        "cells": results,
        "best_per_threshold": best_per_threshold,
        "average_best_query_fmeasure": average_best,
    }
    out_dir = Path(base["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    width = 12
    lines = ["setting".ljust(width) + "thr".rjust(6) + "lthr".rjust(6)
             + "f-m.".rjust(8) + "corr".rjust(6)]
    for r in results:
        lines.append(
            r["setting"].ljust(width)
            + f"{r['threshold']:6g}"
            + (f"{r['link_threshold']:6g}" if r["link_threshold"] is not None else "     -")
            + f"{r['coverage']['query_fmeasure']:8.4f}"
            + f"{r['correspondences']:6d}"
        )
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"summary -> {summary_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgmatch",
        description="Query-driven complex matching between knowledge graphs.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress details")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="TOML-style config file; flags override it")
        p.add_argument("--source", help="source ontology (.ttl or .nt)")
        p.add_argument("--target", help="target ontology (.ttl or .nt)")
        p.add_argument("--queries", help="directory of competency-question .rq files")
        p.add_argument("--embeddings", help="label-embedding cache file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--ignore-case", action="store_const", const=True, default=None,
                       dest="ignore_case", help="case-insensitive label comparison")
        p.add_argument("--ie", action="store_const", const=True, default=None,
                       help="enable embedding-based instance linking")
        p.add_argument("--link-threshold", type=float, dest="link_threshold",
                       help="minimum cosine for an embedding link (default 0.8)")
        p.add_argument("--max-path-len", type=int, dest="max_path_len",
                       help="path length bound for binary queries (default 3)")
        p.add_argument("--min-score", type=float, dest="min_score",
                       help="confidence floor for correspondences (default: threshold)")
        p.add_argument("--model-tag", dest="model_tag",
                       help="embedding model name recorded in provenance")

    p_match = sub.add_parser("match", help="generate an alignment for one ontology pair")
    add_common(p_match)
    p_match.add_argument("--setting", choices=SETTINGS, help="similarity setting")
    p_match.add_argument("--threshold", type=float, help="similarity threshold (default 0.5)")
    p_match.add_argument("--edoal", action="store_true", help="also write EDOAL XML")
    p_match.set_defaults(func=cmd_match)

    p_eval = sub.add_parser("eval", help="evaluate an alignment against reference query pairs")
    p_eval.add_argument("--alignment", required=True, help="alignment JSON file")
    p_eval.add_argument("--source", required=True)
    p_eval.add_argument("--target", required=True)
    p_eval.add_argument("--queries", required=True,
                        help="directory of *.source.rq / *.target.rq pairs")
    p_eval.add_argument("--out", required=True, help="report output directory")
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="run match+eval over a parameter grid")
    add_common(p_sweep)
    p_sweep.add_argument("--thresholds", help="comma-separated similarity thresholds")
    p_sweep.add_argument("--link-thresholds", dest="link_thresholds",
                         help="comma-separated link thresholds (with --ie)")
    p_sweep.add_argument("--settings", help="comma-separated similarity settings")
    p_sweep.add_argument("--jobs", type=int, help="parallel sweep cells (default 1)")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
