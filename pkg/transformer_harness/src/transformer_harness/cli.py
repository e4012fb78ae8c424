"""Command-line interface: finetune and evaluate.

Both commands take a corpus directory and a split file produced by the
tweetlab CLI and refuse to run when the split leaks buildings across
sides (or when training tweets touch test-side buildings).
"""

from __future__ import annotations

import argparse
import random
import sys

from .data import (
    SplitLeakageError,
    check_split_fidelity,
    labeled_texts,
    load_corpus_dir,
    load_split,
)
from .evaluate import evaluate_checkpoint, save_metrics
from .train import DEFAULT_MODEL, FinetuneConfig, finetune


def _train_val_rows(tweets, labels, split, val_fraction: float, seed: int):
    """Carve a building-level validation slice out of the train side."""
    train_ids = sorted(split["train_ids"])
    rng = random.Random(seed)
    rng.shuffle(train_ids)
    n_val = int(len(train_ids) * val_fraction)
    val_ids = set(train_ids[:n_val])
    fit_ids = set(train_ids[n_val:])
    return (
        labeled_texts(tweets, labels, fit_ids),
        labeled_texts(tweets, labels, val_ids),
    )


def _cmd_finetune(args) -> int:
    labels, tweets = load_corpus_dir(args.corpus)
    split = load_split(args.split)
    train_rows, val_rows = _train_val_rows(
        tweets, labels, split, args.val_fraction, args.seed
    )
    check_split_fidelity(train_rows + val_rows, split["test_ids"])
    cfg = FinetuneConfig(
        model_name=args.model,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        warmup_ratio=args.warmup_ratio,
        weight_decay=args.weight_decay,
        seed=args.seed,
        max_seq_len=args.max_seq_len,
        device=args.device,
    )
    out = finetune(train_rows, val_rows, cfg, args.out_dir)
    print(f"checkpoint saved to {out}")
    return 0


def _cmd_evaluate(args) -> int:
    labels, tweets = load_corpus_dir(args.corpus)
    split = load_split(args.split)
    test_rows = labeled_texts(tweets, labels, split["test_ids"])
    obj = evaluate_checkpoint(
        args.checkpoint,
        test_rows,
        configuration=args.configuration,
        model_label=args.model_label,
        seed=split["seed"],
        train_fraction=split["train_fraction"],
        max_seq_len=args.max_seq_len,
        device=args.device,
    )
    save_metrics(obj, args.out)
    acc = obj["aggregate"]["accuracy"]["mean"]
    print(f"{args.configuration}/{args.model_label}: accuracy {acc:.4f} -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transformer-harness",
        description="Fine-tune and evaluate a transformer classifier on "
        "tweetlab corpora and splits.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("finetune", help="fine-tune a sequence classifier")
    p.add_argument("--corpus", required=True, help="corpus directory (buildings + tweets jsonl)")
    p.add_argument("--split", required=True, help="split JSON from the tweetlab split command")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--model", default=DEFAULT_MODEL)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=5e-6)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=16)
    p.add_argument("--warmup-ratio", dest="warmup_ratio", type=float, default=0.01)
    p.add_argument("--weight-decay", dest="weight_decay", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-seq-len", dest="max_seq_len", type=int, default=128)
    p.add_argument("--val-fraction", dest="val_fraction", type=float, default=0.1)
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=_cmd_finetune)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on the test side")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True, help="metrics JSON path")
    p.add_argument("--configuration", default="custom")
    p.add_argument("--model-label", dest="model_label", default="mbert")
    p.add_argument("--max-seq-len", dest="max_seq_len", type=int, default=128)
    p.add_argument("--device", default="cpu")
    p.set_defaults(func=_cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SplitLeakageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
