"""Command-line interface.

Subcommands mirror the pipeline stages plus the analysis utilities:

    ingest, parse, scrape, quality, enrich   one stage each
    run                                      full pipeline from a config JSON
    delta                                    incremental run against a previous output
    translate-extract, translate-insert      translation plumbing
    stats, sample, perplexity                analysis commands
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import analysis, pipeline
from .quality import QualityThresholds, default_thresholds, fit_thresholds
from .scrape import ScrapePolicy


def _stage_config(args, stages: tuple[str, ...]) -> pipeline.RunConfig:
    return pipeline.RunConfig(
        language=args.lang,
        out_dir=args.out,
        dump=getattr(args, "dump", None),
        stages=stages,
        lang_config=getattr(args, "lang_config", None),
        scrape_policy=json.loads(Path(args.policy).read_text()) if getattr(args, "policy", None) else {},
        quality_endpoint=getattr(args, "endpoint", None),
        thresholds_path=getattr(args, "thresholds", None),
        api_url=getattr(args, "api", None),
        enrich_rate=getattr(args, "rate", 1.0),
        workers=getattr(args, "workers", 4),
        chunk_size=getattr(args, "chunk_size", 1000),
    )


def _print_report(report: pipeline.RunReport) -> None:
    print(json.dumps(report.to_dict(), indent=2))


def cmd_ingest(args) -> int:
    report = pipeline.run_pipeline(_stage_config(args, ("ingest",)))
    _print_report(report)
    return 0


def cmd_parse(args) -> int:
    report = pipeline.run_pipeline(_stage_config(args, ("parse",)))
    _print_report(report)
    return 0


def cmd_scrape(args) -> int:
    if args.chunk:
        policy = (ScrapePolicy.from_dict(json.loads(Path(args.policy).read_text()))
                  if args.policy else ScrapePolicy())
        warnings = pipeline.scrape_chunk_file(Path(args.chunk), Path(args.chunk), policy)
        print(json.dumps({"chunk": args.chunk, "errors": warnings}))
        return 0
    report = pipeline.run_pipeline(_stage_config(args, ("scrape",)))
    _print_report(report)
    return 0


def cmd_quality(args) -> int:
    if args.fit:
        data = [json.loads(line) for line in Path(args.fit).read_text().splitlines() if line.strip()]
        thresholds = fit_thresholds([d["score"] for d in data], [d["label"] for d in data])
        out = Path(args.thresholds or "thresholds.json")
        thresholds.save(out)
        print(f"wrote {out}: cuts={list(thresholds.cuts)}")
        return 0
    report = pipeline.run_pipeline(_stage_config(args, ("quality",)))
    _print_report(report)
    return 0


def cmd_enrich(args) -> int:
    if args.chunk:
        stats = pipeline.enrich_chunk(args.chunk, args.api, rate_per_second=args.rate,
                                      language=args.lang)
        print(json.dumps(stats.__dict__))
        return 0
    report = pipeline.run_pipeline(_stage_config(args, ("enrich",)))
    _print_report(report)
    return 0


def cmd_run(args) -> int:
    config = pipeline.RunConfig.from_json(args.config)
    report = pipeline.run_pipeline(config)
    _print_report(report)
    return 0


def cmd_delta(args) -> int:
    config = pipeline.RunConfig.from_json(args.config)
    if args.prev:
        config.prev_dir = args.prev
    report, to_process, carried = pipeline.run_delta(config)
    print(json.dumps({"to_process": len(to_process), "carried_forward": len(carried),
                      "stages": report.to_dict()}, indent=2))
    return 0


def cmd_translate_extract(args) -> int:
    records = pipeline.extract_translatables(args.chunk)
    pipeline.write_translatables(records, args.out)
    print(f"extracted {len(records)} records to {args.out}")
    return 0


def cmd_translate_insert(args) -> int:
    records = pipeline.read_translatables(args.records)
    if args.translator:
        translate = pipeline.TRANSLATORS[args.translator]
        texts = translate([r.text for r in records], args.lang or "")
        for record, text in zip(records, texts):
            record.translated_text = text
    inserted = pipeline.insert_translations(args.chunk, records, out_path=args.out)
    print(f"inserted {inserted} translations into {args.out or args.chunk}")
    return 0


def cmd_stats(args) -> int:
    chunks = [Path(p) for pattern in args.chunks for p in sorted(Path().glob(pattern))] \
        if args.glob else [Path(p) for p in args.chunks]
    tables = analysis.stats_by_language(chunks)
    print(analysis.render_stats(tables))
    if args.csv:
        Path(args.csv).write_text(analysis.stats_csv(tables), encoding="utf-8")
        print(f"wrote {args.csv}", file=sys.stderr)
    return 0


def cmd_sample(args) -> int:
    texts = []
    with open(args.input, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                record = json.loads(line)
                texts.append(record["text"] if isinstance(record, dict) else str(record))
    candidates = analysis.make_candidates(texts, target_length=args.target)
    sampled = analysis.sample_passages(candidates, args.n, target_length=args.target,
                                       seed=args.seed)
    for text in sampled:
        print(json.dumps({"text": text}, ensure_ascii=False))
    return 0


def cmd_perplexity(args) -> int:
    passages = []
    with open(args.input, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                record = json.loads(line)
                passages.append(record["log_likelihoods"] if isinstance(record, dict) else record)
    value = analysis.geometric_mean_perplexity(passages)
    print(f"{value:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wikicite",
                                     description="MediaWiki dump to cited-corpus toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name, help_text, dump=False):
        p = sub.add_parser(name, help=help_text)
        if dump:
            p.add_argument("--dump", required=(name == "ingest"), help="dump XML path (.xml/.bz2/.gz)")
        p.add_argument("--lang", required=True, help="2-letter project code")
        p.add_argument("--out", required=True, help="corpus output directory")
        p.add_argument("--workers", type=int, default=4)
        p.add_argument("--chunk-size", dest="chunk_size", type=int, default=1000)
        p.add_argument("--lang-config", dest="lang_config", help="parser config JSON path")
        return p

    stage("ingest", "stream a dump into 1000-article chunk files", dump=True)
    stage("parse", "parse chunk wikicode into article elements")

    p = sub.add_parser("scrape", help="download and extract web citation sources")
    p.add_argument("--chunk", help="scrape one chunk file in place")
    p.add_argument("--policy", help="scrape policy JSON path")
    p.add_argument("--lang", help="2-letter project code")
    p.add_argument("--out", help="corpus output directory")
    p.add_argument("--workers", type=int, default=4)

    p = sub.add_parser("quality", help="score scraped source text quality")
    p.add_argument("--fit", help="fit thresholds from a JSONL of {score,label} rows")
    p.add_argument("--endpoint", help="quality model service URL (heuristic fallback if unset)")
    p.add_argument("--thresholds", help="thresholds JSON path")
    p.add_argument("--lang")
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=4)

    p = sub.add_parser("enrich", help="fetch cross-lingual links and creation dates")
    p.add_argument("--chunk", help="enrich one chunk file in place")
    p.add_argument("--api", required=True, help="Action API endpoint URL")
    p.add_argument("--rate", type=float, default=1.0, help="requests per second")
    p.add_argument("--lang")
    p.add_argument("--out")

    p = sub.add_parser("run", help="run configured stages end to end")
    p.add_argument("--config", required=True, help="run config JSON")

    p = sub.add_parser("delta", help="incremental run against a previous output")
    p.add_argument("--config", required=True, help="run config JSON (dump = new dump)")
    p.add_argument("--prev", help="previous run's output directory")

    p = sub.add_parser("translate-extract", help="extract sentences/headings to JSONL")
    p.add_argument("--chunk", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("translate-insert", help="insert translated records into a chunk")
    p.add_argument("--chunk", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--out", help="write to a new chunk instead of in place")
    p.add_argument("--translator", choices=sorted(pipeline.TRANSLATORS),
                   help="apply a test translator to records missing translated_text")
    p.add_argument("--lang", default="")

    p = sub.add_parser("stats", help="corpus statistics (text table + CSV)")
    p.add_argument("chunks", nargs="+", help="chunk files (or globs with --glob)")
    p.add_argument("--glob", action="store_true")
    p.add_argument("--csv", help="also write CSV here")

    p = sub.add_parser("sample", help="length-weighted passage sampling")
    p.add_argument("--input", required=True, help="JSONL with a text field per line")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--target", type=int, default=150, help="target passage length L")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("perplexity", help="geometric-mean perplexity of passages")
    p.add_argument("--input", required=True,
                   help="JSONL of token log-likelihood arrays (or {log_likelihoods: []})")

    return parser


_COMMANDS = {
    "ingest": cmd_ingest, "parse": cmd_parse, "scrape": cmd_scrape,
    "quality": cmd_quality, "enrich": cmd_enrich, "run": cmd_run, "delta": cmd_delta,
    "translate-extract": cmd_translate_extract, "translate-insert": cmd_translate_insert,
    "stats": cmd_stats, "sample": cmd_sample, "perplexity": cmd_perplexity,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
