"""Command-line entry point.

Subcommands cover the whole pipeline: clean -> prompt -> generate ->
validate/diversity -> split/train-nb/evaluate/run-config -> inject-noise/
sweep -> report. Every subcommand that writes outputs drops a manifest
(config snapshot, input hashes, seeds) next to them. Exit codes: 0 on
success, 1 on data errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .cleaning import CleaningConfig, clean, load_cleaning_config, load_tag_index
from .diversity import compute_diversity
from .errors import TweetLabError
from .experiments import (
    CONFIGURATIONS,
    ClassMetrics,
    evaluate,
    labeled_pairs,
    run_configuration,
    single_corpus_accuracy,
)
from .gateway import BACKENDS, DEFAULT_MODEL, GenerationConfig, generate_corpus
from .manifest import write_manifest
from .nbayes import NaiveBayesModel, train_nb
from .noise import (
    NOISE_KINDS,
    NoiseSpec,
    corrupt,
    load_pool,
    load_sweep,
    save_sweep,
    sweep,
)
from .prompts import build_bundle, build_system_prompt
from .records import (
    join_corpus,
    load_buildings,
    load_corpus,
    load_tweets,
    save_buildings,
    save_corpus,
)
from .reporting import (
    diversity_csv,
    fig_diversity,
    fig_metrics,
    fig_sweep,
    load_diversity_file,
    load_metrics_file,
    metrics_csv,
    render_diversity_table,
    render_metrics_table,
    render_sweep_table,
)
from .splits import SplitSpec, split_by_building
from .unigram import UnigramModel, train_unigram


def _parse_seeds(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _parse_rates(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip() != ""]


def _load_config_section(path, section: str) -> dict:
    if path is None:
        return {}
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    value = obj.get(section, {})
    return value if isinstance(value, dict) else {}


def _fallback(args, config: dict, key: str, default):
    """flag > config file > built-in default."""
    value = getattr(args, key)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _cmd_clean(args) -> int:
    cleaning_config = (
        load_cleaning_config(args.config) if args.config else CleaningConfig()
    )
    index = load_tag_index(args.tag_index) if args.tag_index else None
    buildings = load_buildings(args.infile)
    kept, report = clean(buildings, config=cleaning_config, multi_tag_index=index)
    save_buildings(kept, args.out)
    report.save(args.report)
    write_manifest(
        args.out,
        "clean",
        {"config": args.config, "tag_index": args.tag_index},
        [args.infile, args.config, args.tag_index],
    )
    print(f"kept {len(kept)} of {len(buildings)} buildings; "
          f"{len(report.entries)} rejected -> {args.report}")
    return 0


def _cmd_prompt(args) -> int:
    buildings = load_buildings(args.infile)
    system = build_system_prompt(args.system_template)
    with Path(args.out).open("w", encoding="utf-8", newline="\n") as f:
        for rec in buildings:
            bundle = build_bundle(rec, system=system)
            f.write(
                json.dumps(
                    {"building_id": bundle.building_id, "system": bundle.system, "user": bundle.user},
                    ensure_ascii=False,
                )
                + "\n"
            )
    write_manifest(
        args.out, "prompt", {"system_template": args.system_template},
        [args.infile, args.system_template],
    )
    print(f"wrote prompts for {len(buildings)} buildings -> {args.out}")
    return 0


def _cmd_generate(args) -> int:
    section = _load_config_section(args.config, "generate")
    cfg = GenerationConfig(
        backend=_fallback(args, section, "backend", "mock"),
        endpoint_url=_fallback(args, section, "endpoint_url", ""),
        model_name=_fallback(args, section, "model_name", DEFAULT_MODEL),
        temperature=float(_fallback(args, section, "temperature", 0.8)),
        max_tokens=int(_fallback(args, section, "max_tokens", 1024)),
        max_retries=int(_fallback(args, section, "max_retries", 3)),
        max_concurrency=int(_fallback(args, section, "max_concurrency", 4)),
        timeout=float(_fallback(args, section, "timeout", 60.0)),
        request_budget=_fallback(args, section, "request_budget", None),
        audit_dir=args.audit_dir,
    )
    seed = int(_fallback(args, section, "seed", 0))
    buildings = load_buildings(args.infile)
    import os

    api_key = os.environ.get("LLM_API_KEY")
    corpus, failures = generate_corpus(
        buildings, cfg, seed=seed, template_path=args.system_template, api_key=api_key
    )
    out_dir = Path(args.out)
    save_corpus(corpus, out_dir)
    if failures:
        with (out_dir / "failures.jsonl").open("w", encoding="utf-8", newline="\n") as f:
            for entry in failures:
                f.write(json.dumps(entry.to_json_dict(), ensure_ascii=False) + "\n")
    write_manifest(
        out_dir, "generate", {"generation": cfg.to_json_dict(), "seed": seed},
        [args.infile, args.config, args.system_template], seeds=[seed],
    )
    print(
        f"generated {len(corpus.tweets)} tweets for {len(corpus.buildings)} buildings"
        + (f" ({len(failures)} failures)" if failures else "")
        + f" -> {out_dir}"
    )
    return 0


def _cmd_validate(args) -> int:
    buildings = load_buildings(args.buildings)
    tweets = load_tweets(args.tweets)
    corpus = join_corpus(buildings, tweets)
    counts = corpus.tweets_by_building()
    print(
        f"OK: {len(corpus.buildings)} buildings, {len(corpus.tweets)} tweets, "
        f"max tweets/building = {max((len(v) for v in counts.values()), default=0)}"
    )
    return 0


def _cmd_diversity(args) -> int:
    tweets = load_tweets(args.tweets)
    texts = [t.text for t in tweets]
    if args.model:
        model = UnigramModel.load(args.model)
    elif args.heldout:
        heldout = load_tweets(args.heldout)
        model = train_unigram(t.text for t in heldout)
    else:
        raise TweetLabError("diversity needs --model or --heldout for perplexity scoring")
    if args.save_model:
        model.save(args.save_model)
    label = args.label or Path(args.tweets).parent.name or Path(args.tweets).stem
    report = compute_diversity(texts, model, dataset=label)
    report.save(args.out)
    write_manifest(
        args.out, "diversity", {"label": label, "model": args.model, "heldout": args.heldout},
        [args.tweets, args.model, args.heldout],
    )
    print(
        f"{label}: self-BLEU {report.self_bleu_percent:.2f}% | "
        f"log10 perplexity {report.log10_perplexity:.4f} ({report.corpus_size} tweets)"
    )
    return 0


def _cmd_split(args) -> int:
    corpus = load_corpus(args.corpus)
    spec = split_by_building(corpus, fraction=args.fraction, seed=args.seed)
    spec.save(args.out)
    write_manifest(
        args.out, "split", {"fraction": args.fraction, "seed": args.seed},
        [Path(args.corpus) / "buildings.jsonl", Path(args.corpus) / "tweets.jsonl"],
        seeds=[args.seed],
    )
    print(
        f"split {len(spec.train_building_ids)} train / {len(spec.test_building_ids)} "
        f"test buildings -> {args.out}"
    )
    return 0


def _cmd_train_nb(args) -> int:
    corpus = load_corpus(args.corpus)
    spec = SplitSpec.load(args.split)
    ids = spec.train_building_ids if args.side == "train" else spec.test_building_ids
    model = train_nb(labeled_pairs(corpus, ids), alpha=args.alpha)
    model.save(args.out)
    write_manifest(
        args.out, "train-nb", {"side": args.side, "alpha": args.alpha},
        [Path(args.corpus) / "buildings.jsonl", Path(args.corpus) / "tweets.jsonl", args.split],
    )
    print(f"trained NB on {args.side} side ({len(ids)} buildings) -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    corpus = load_corpus(args.corpus)
    spec = SplitSpec.load(args.split)
    ids = spec.test_building_ids if args.side == "test" else spec.train_building_ids
    model = NaiveBayesModel.load(args.model)
    run = evaluate(model, labeled_pairs(corpus, ids), seed=spec.seed)
    metrics = ClassMetrics(
        configuration=args.configuration,
        model=args.model_name,
        per_run=[run],
        train_fraction=spec.train_fraction,
    )
    metrics.save(args.out)
    write_manifest(
        args.out, "evaluate", {"side": args.side, "configuration": args.configuration},
        [args.model, args.split, Path(args.corpus) / "tweets.jsonl"],
    )
    print(render_metrics_table([metrics]), end="")
    return 0


def _cmd_run_config(args) -> int:
    real = load_corpus(args.real) if args.real else None
    synthetic = load_corpus(args.synthetic) if args.synthetic else None
    seeds = _parse_seeds(args.seeds)
    metrics = run_configuration(
        args.mode, real, synthetic, seeds, fraction=args.fraction, alpha=args.alpha
    )
    metrics.save(args.out)
    inputs = []
    for d in (args.real, args.synthetic):
        if d:
            inputs += [Path(d) / "buildings.jsonl", Path(d) / "tweets.jsonl"]
    write_manifest(
        args.out, "run-config",
        {"mode": args.mode, "fraction": args.fraction, "alpha": args.alpha},
        inputs, seeds=seeds,
    )
    print(render_metrics_table([metrics]), end="")
    return 0


def _cmd_inject_noise(args) -> int:
    spec = NoiseSpec(kind=args.kind, rate=args.rate, seed=args.seed, pool_path=args.pool)
    corpus = load_corpus(args.infile)
    pool = load_pool(args.pool) if args.pool else None
    corrupted = corrupt(corpus, spec, pool=pool)
    save_corpus(corrupted, args.out)
    write_manifest(
        args.out, "inject-noise",
        {"kind": args.kind, "rate": args.rate, "pool": args.pool},
        [Path(args.infile) / "buildings.jsonl", Path(args.infile) / "tweets.jsonl", args.pool],
        seeds=[args.seed],
    )
    print(f"wrote {args.kind} corpus at rate {args.rate:g} -> {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    corpus = load_corpus(args.infile)
    pool = load_pool(args.pool) if args.pool else None
    seeds = _parse_seeds(args.seeds)
    rates = _parse_rates(args.rates)

    def eval_fn(corrupted, seed):
        return single_corpus_accuracy(corrupted, seed, fraction=args.fraction, alpha=args.alpha)

    rows = sweep(corpus, args.kind, rates, seeds, eval_fn, pool=pool)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_sweep(rows, csv_path=out_dir / "sweep.csv", json_path=out_dir / "sweep.json")
    write_manifest(
        out_dir, "sweep",
        {"kind": args.kind, "rates": rates, "fraction": args.fraction, "pool": args.pool},
        [Path(args.infile) / "buildings.jsonl", Path(args.infile) / "tweets.jsonl", args.pool],
        seeds=seeds,
    )
    print(render_sweep_table(rows), end="")
    return 0


def _cmd_report(args) -> int:
    diversity_files = args.diversity or []
    metrics_files = args.metrics or []
    sweep_files = args.sweep or []
    if not (diversity_files or metrics_files or sweep_files):
        raise TweetLabError("report needs at least one --diversity/--metrics/--sweep input")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    inputs = list(diversity_files) + list(metrics_files) + list(sweep_files)
    if diversity_files:
        reports = [load_diversity_file(p) for p in diversity_files]
        table = render_diversity_table(reports)
        (out_dir / "diversity_table.txt").write_text(table, encoding="utf-8")
        (out_dir / "diversity.csv").write_text(diversity_csv(reports), encoding="utf-8")
        if not args.no_figures:
            fig_diversity(reports, out_dir / "diversity.png")
        print(table)
    if metrics_files:
        metrics = [load_metrics_file(p) for p in metrics_files]
        table = render_metrics_table(metrics)
        (out_dir / "metrics_table.txt").write_text(table, encoding="utf-8")
        (out_dir / "metrics.csv").write_text(metrics_csv(metrics), encoding="utf-8")
        if not args.no_figures:
            fig_metrics(metrics, out_dir / "metrics.png")
        print(table)
    if sweep_files:
        rows = [row for p in sweep_files for row in load_sweep(p)]
        table = render_sweep_table(rows)
        (out_dir / "sweep_table.txt").write_text(table, encoding="utf-8")
        if not args.no_figures:
            fig_sweep(rows, out_dir / "sweep.png")
        print(table)
    write_manifest(out_dir, "report", {"figures": not args.no_figures}, inputs)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tweetlab",
        description="Synthetic tweet corpora for building-function classification: "
        "generate, measure, corrupt, classify.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("clean", help="apply the metadata preprocessing rules")
    p.add_argument("--in", dest="infile", required=True, help="buildings.jsonl to clean")
    p.add_argument("--out", required=True, help="cleaned buildings.jsonl")
    p.add_argument("--report", required=True, help="rejection report JSONL")
    p.add_argument("--config", help="JSON config with generic_tags / tag_label_map")
    p.add_argument("--tag-index", dest="tag_index", help="building_id -> tags JSONL side index")
    p.set_defaults(func=_cmd_clean)

    p = sub.add_parser("prompt", help="dump generation prompts for audit")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--system-template", dest="system_template")
    p.set_defaults(func=_cmd_prompt)

    p = sub.add_parser("generate", help="generate synthetic tweets per building")
    p.add_argument("--in", dest="infile", required=True, help="cleaned buildings.jsonl")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.add_argument("--backend", choices=BACKENDS)
    p.add_argument("--seed", type=int)
    p.add_argument("--endpoint", dest="endpoint_url")
    p.add_argument("--model", dest="model_name")
    p.add_argument("--temperature", type=float)
    p.add_argument("--max-tokens", dest="max_tokens", type=int)
    p.add_argument("--max-retries", dest="max_retries", type=int)
    p.add_argument("--concurrency", dest="max_concurrency", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--budget", dest="request_budget", type=int)
    p.add_argument("--audit-dir", dest="audit_dir")
    p.add_argument("--system-template", dest="system_template")
    p.add_argument("--config", help="JSON config file (generate section)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("validate", help="check corpus referential integrity")
    p.add_argument("--buildings", required=True)
    p.add_argument("--tweets", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("diversity", help="self-BLEU + unigram perplexity report")
    p.add_argument("--tweets", required=True, help="tweets.jsonl to score")
    p.add_argument("--model", help="trained unigram model (token<TAB>count)")
    p.add_argument("--heldout", help="held-out tweets.jsonl to train the model on")
    p.add_argument("--save-model", dest="save_model", help="persist the trained model")
    p.add_argument("--label", help="dataset label used in reports")
    p.add_argument("--out", required=True, help="diversity report JSON")
    p.set_defaults(func=_cmd_diversity)

    p = sub.add_parser("split", help="building-level stratified train/test split")
    p.add_argument("--corpus", required=True, help="corpus directory")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("train-nb", help="train the Naive Bayes classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--side", choices=("train", "test"), default="train")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_nb)

    p = sub.add_parser("evaluate", help="evaluate a trained NB model on a split side")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--side", choices=("train", "test"), default="test")
    p.add_argument("--configuration", default="custom")
    p.add_argument("--model-name", dest="model_name", default="nb")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("run-config", help="run a full multi-seed configuration")
    p.add_argument("--mode", choices=CONFIGURATIONS, required=True)
    p.add_argument("--real", help="real corpus directory")
    p.add_argument("--synthetic", help="synthetic corpus directory")
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run_config)

    p = sub.add_parser("inject-noise", help="corrupt a corpus with one noise kind")
    p.add_argument("--kind", choices=NOISE_KINDS, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pool", help="distractor pool (plain text, one tweet per line)")
    p.add_argument("--in", dest="infile", required=True, help="input corpus directory")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.set_defaults(func=_cmd_inject_noise)

    p = sub.add_parser("sweep", help="noise rate sweep with NB accuracy per cell")
    p.add_argument("--kind", choices=NOISE_KINDS, required=True)
    p.add_argument("--rates", required=True, help="comma-separated rates in [0,1]")
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--pool")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="render tables, CSVs, and figures from metric files")
    p.add_argument("--diversity", nargs="*", help="diversity report JSONs")
    p.add_argument("--metrics", nargs="*", help="classifier metrics JSONs")
    p.add_argument("--sweep", nargs="*", help="sweep JSONs")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--no-figures", dest="no_figures", action="store_true")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TweetLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
