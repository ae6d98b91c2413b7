"""Command-line entry point.

Subcommands, each independently runnable so partial pipelines are
scriptable:

* ``synth``        - generate a synthetic corpus with ground-truth manifest
* ``ingest-check`` - parse and cross-validate a bundle
* ``compute``      - group-by metric aggregation
* ``stats``        - population selection, per-factor ANOVA and joint OLS
* ``report``       - full pipeline and report tables

Exit codes: 0 success, 2 parse failure, 3 validation failure, 4 population
below the configured minimum (metric tables are still produced; the stats
table is replaced by a warning).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import align, metrics, namex, report, stats, synthgen
from .config import ALL_TABLES, RunConfig, build_config, parse_config_file
from .errors import DanglingReference, EngineError, ParseError
from .ingest import read_bundle, validate_bundle

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_SMALL_POPULATION = 4


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--inputs", type=Path, help="bundle directory with canonical file names")
    for name in ("programs", "reports", "breaks", "segments", "utterances", "faces", "names"):
        parser.add_argument(f"--{name}", type=Path, help=f"path to the {name} file")
    parser.add_argument("--stoplist", type=Path, help="optional stop-list, one name per line")
    parser.add_argument("--config", type=Path, help="key = value config file")


def _add_threshold_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--timezone", help="corpus timezone (default Europe/Paris)")
    parser.add_argument("--peak-tv", dest="peak_tv", help="TV peak window, e.g. 18-23")
    parser.add_argument("--peak-radio", dest="peak_radio", help="radio peak window, e.g. 6-9")
    parser.add_argument("--conflict-cutoff", dest="conflict_cutoff",
                        help="conflict cutoff timestamp (local when no offset)")
    parser.add_argument("--vad-min", dest="vad_min", type=float)
    parser.add_argument("--gender-low", dest="gender_low", type=float)
    parser.add_argument("--gender-high", dest="gender_high", type=float)
    parser.add_argument("--face-min-height", dest="face_min_height", type=float)
    parser.add_argument("--face-female-threshold", dest="face_female_threshold", type=float)
    parser.add_argument("--ad-mode", dest="ad_mode",
                        choices=["exclude_breaks", "only_breaks", "raw"])
    parser.add_argument("--min-population", dest="min_population", type=int)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = None
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_values = parse_config_file(fh)
    cli_values = {}
    for key in ("inputs", "programs", "reports", "breaks", "segments", "utterances",
                "faces", "names", "stoplist", "timezone", "conflict_cutoff",
                "vad_min", "gender_low", "gender_high", "face_min_height",
                "face_female_threshold", "ad_mode", "min_population",
                "output_format", "out_dir"):
        if hasattr(args, key):
            cli_values[key] = getattr(args, key)
    for key in ("peak_tv", "peak_radio"):
        raw = getattr(args, key, None)
        if raw is not None:
            start, end = str(raw).split("-")
            cli_values[key] = (int(start), int(end))
    if getattr(args, "group_by", None):
        cli_values["group_by"] = tuple(args.group_by.split(","))
    if getattr(args, "tables", None):
        cli_values["tables"] = tuple(args.tables.split(","))
    return build_config(file_values, cli_values)


def _load(cfg: RunConfig):
    bundle = read_bundle(cfg.bundle_paths())
    validation = validate_bundle(bundle)
    stoplist = frozenset()
    if cfg.stoplist is not None:
        with open(cfg.stoplist, encoding="utf-8") as fh:
            stoplist = namex.load_stoplist(fh)
    name_stats = namex.build_name_stats(bundle.utterances, bundle.lexicon, stoplist)
    return bundle, validation, name_stats


def _population(bundle, name_stats, cfg: RunConfig):
    return align.select_stats_population(
        bundle, name_stats, vad_min=cfg.vad_min, gender_low=cfg.gender_low,
        gender_high=cfg.gender_high, tz=cfg.tz, peak_windows=cfg.peak_windows,
        conflict_cutoff=cfg.cutoff)


def cmd_synth(args: argparse.Namespace) -> int:
    spec = synthgen.SynthSpec()
    if args.spec is not None:
        with open(args.spec, encoding="utf-8") as fh:
            spec = synthgen.spec_from_json(json.load(fh))
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.programs_per_cell is not None:
        overrides["programs_per_cell"] = args.programs_per_cell
    if overrides:
        from dataclasses import replace
        spec = replace(spec, **overrides)
    bundle, manifest = synthgen.generate(spec, args.out)
    print(f"generated {len(bundle.programs)} programs in {args.out} "
          f"(seed {spec.seed}); manifest: {Path(args.out) / 'manifest.json'}")
    return EXIT_OK


def cmd_ingest_check(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    try:
        bundle, validation, _ = _load(cfg)
    except ParseError as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FileNotFoundError, ValueError) as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DanglingReference as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    for key, value in validation.counts.items():
        print(f"{key}: {value}")
    for warning in validation.warnings:
        print(f"warning: {warning}")
    print(f"ok ({len(validation.warnings)} warnings)")
    return EXIT_OK


def _group_table(results, dims) -> report.Table:
    columns = (*dims, "wpr", "wsr", "wqr", "wfr",
               "wpr_weight", "wsr_weight", "wqr_weight", "wfr_weight")
    rows = []
    for result in results:
        cells = [getattr(result.key, dim) or "" for dim in dims]
        for kind in (metrics.MetricKind.WPR, metrics.MetricKind.WSR,
                     metrics.MetricKind.WQR, metrics.MetricKind.WFR):
            value = result.metric(kind)
            cells.append(report.DASH if value is None or not value.defined
                         else f"{value.female_pct:.6f}")
        for kind in (metrics.MetricKind.WPR, metrics.MetricKind.WSR,
                     metrics.MetricKind.WQR, metrics.MetricKind.WFR):
            value = result.metric(kind)
            cells.append("0" if value is None else f"{value.weight:g}")
        rows.append(tuple(cells))
    return report.Table("groups", "Metric aggregation by " + ", ".join(dims),
                        columns, tuple(rows))


def cmd_compute(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    try:
        bundle, _, name_stats = _load(cfg)
    except ParseError as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FileNotFoundError, ValueError) as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DanglingReference as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    results = metrics.aggregate(
        bundle, cfg.group_by, mode=cfg.break_mode, name_stats=name_stats,
        tz=cfg.tz, peak_windows=cfg.peak_windows, conflict_cutoff=cfg.cutoff,
        min_height=cfg.face_min_height, female_threshold=cfg.face_female_threshold,
        weighting=args.weighting)
    table = _group_table(results, cfg.group_by)
    print(report.render(table, cfg.output_format), end="")
    return EXIT_OK


def _stats_table(effect_rep: stats.EffectReport) -> report.Table:
    rows = []
    for effect in effect_rep.effects:
        a = effect.anova
        rows.append((a.factor, str(a.df_effect), str(a.df_residual),
                     f"{a.ss_effect:.6g}", f"{a.ss_residual:.6g}",
                     f"{a.f_stat:.4g}", f"{a.p_value:.4g}",
                     f"{a.eta_squared:.4f}",
                     "yes" if effect.significant else "no", effect.tier))
    return report.Table(
        "anova", "Per-factor one-way ANOVA on utterance female-name probability",
        ("factor", "df_effect", "df_residual", "ss_effect", "ss_residual",
         "F", "p", "eta2", "significant", "effect_tier"), tuple(rows))


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    try:
        bundle, _, name_stats = _load(cfg)
    except ParseError as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FileNotFoundError, ValueError) as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DanglingReference as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    population = _population(bundle, name_stats, cfg)
    if args.export_rows:
        with open(args.export_rows, "w", encoding="utf-8", newline="") as fh:
            stats.rows_to_csv(population, fh)
        print(f"exported {len(population)} rows to {args.export_rows}")
    if len(population) < cfg.min_population:
        print(f"warning: population has {len(population)} rows, below the "
              f"minimum {cfg.min_population}; statistics skipped", file=sys.stderr)
        return EXIT_SMALL_POPULATION
    factors = [f for f in stats.FACTOR_NAMES
               if len({row.level(f) for row in population}) >= 2]
    effect_rep = stats.effect_report(population, factors)
    print(report.render(_stats_table(effect_rep), cfg.output_format), end="")
    return EXIT_OK


def run_pipeline(cfg: RunConfig) -> int:
    """Full run: ingest, align, metrics, stats, rendered tables, and a run
    manifest recording config, input digests and row/weight counts."""
    try:
        bundle, validation, name_stats = _load(cfg)
    except ParseError as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FileNotFoundError, ValueError) as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DanglingReference as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    population = _population(bundle, name_stats, cfg)
    small_population = len(population) < cfg.min_population

    out_dir = cfg.out_dir
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    ext = report.EXTENSIONS[cfg.output_format]
    rendered: dict[str, str] = {}
    for template in cfg.tables:
        if template == "table6" and small_population:
            continue
        table = report.build_table(template, bundle, name_stats, cfg, population)
        rendered[template] = report.render(table, cfg.output_format)

    if small_population:
        warning = (f"population has {len(population)} rows, below the minimum "
                   f"{cfg.min_population}; statistics tables skipped")
        print(f"warning: {warning}", file=sys.stderr)
    else:
        factors = [f for f in stats.FACTOR_NAMES
                   if len({row.level(f) for row in population}) >= 2]
        effect_rep = stats.effect_report(population, factors)
        rendered["anova"] = report.render(_stats_table(effect_rep), cfg.output_format)

    for name, text in rendered.items():
        if out_dir is not None:
            (out_dir / f"report_{name}.{ext}").write_text(text, encoding="utf-8")
        print(text, end="")
        print()

    if out_dir is not None:
        paths = cfg.bundle_paths()
        manifest = {
            "config": {k: str(v) if isinstance(v, Path) else v
                       for k, v in asdict(cfg).items()},
            "inputs": {p.name: _sha256(p) for p in paths.all_files() if p.exists()},
            "counts": validation.counts,
            "warnings": validation.warnings,
            "population_rows": len(population),
            "tables": sorted(rendered),
        }
        with open(out_dir / "run_manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")

    return EXIT_SMALL_POPULATION if small_population else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    return run_pipeline(_config_from_args(args))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wre",
        description="Gender-representation estimators for broadcast corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic corpus")
    p_synth.add_argument("--out", type=Path, required=True)
    p_synth.add_argument("--spec", type=Path, help="SynthSpec as JSON")
    p_synth.add_argument("--seed", type=int)
    p_synth.add_argument("--programs-per-cell", dest="programs_per_cell", type=int)
    p_synth.set_defaults(func=cmd_synth)

    p_check = sub.add_parser("ingest-check", help="parse and validate a bundle")
    _add_input_flags(p_check)
    p_check.set_defaults(func=cmd_ingest_check)

    p_compute = sub.add_parser("compute", help="aggregate metrics by group")
    _add_input_flags(p_compute)
    _add_threshold_flags(p_compute)
    p_compute.add_argument("--group-by", dest="group_by",
                           help="comma-separated dimensions, e.g. medium,audience")
    p_compute.add_argument("--output-format", dest="output_format",
                           choices=["aligned", "delimited", "structured"])
    p_compute.add_argument("--weighting", choices=["weighted", "unweighted"],
                           default="weighted")
    p_compute.set_defaults(func=cmd_compute)

    p_stats = sub.add_parser("stats", help="population statistics")
    _add_input_flags(p_stats)
    _add_threshold_flags(p_stats)
    p_stats.add_argument("--export-rows", dest="export_rows", type=Path,
                         help="write the analysis rows as CSV")
    p_stats.add_argument("--output-format", dest="output_format",
                         choices=["aligned", "delimited", "structured"])
    p_stats.set_defaults(func=cmd_stats)

    p_report = sub.add_parser("report", help="full pipeline and report tables")
    _add_input_flags(p_report)
    _add_threshold_flags(p_report)
    p_report.add_argument("--tables", help=f"comma-separated subset of {','.join(ALL_TABLES)}")
    p_report.add_argument("--output-format", dest="output_format",
                          choices=["aligned", "delimited", "structured"])
    p_report.add_argument("--out-dir", dest="out_dir", type=Path,
                          help="directory for rendered tables and the run manifest")
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE if isinstance(exc, ParseError) else EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
