"""Checkpoint evaluation producing classmetrics-v1 JSON, the same schema
the tweetlab report command consumes."""

from __future__ import annotations

import json
from pathlib import Path

from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .data import LABELS
from .train import predict

METRICS_SCHEMA = "classmetrics-v1"


def confusion_metrics(golds, predictions) -> dict:
    if not golds:
        raise ValueError("empty test set")
    tp = {label: 0 for label in LABELS}
    fp = {label: 0 for label in LABELS}
    fn = {label: 0 for label in LABELS}
    support = {label: 0 for label in LABELS}
    correct = 0
    for gold, pred in zip(golds, predictions):
        support[gold] += 1
        if gold == pred:
            correct += 1
            tp[gold] += 1
        else:
            fp[pred] += 1
            fn[gold] += 1
    per_class = {}
    for label in LABELS:
        p = tp[label] / (tp[label] + fp[label]) if tp[label] + fp[label] else 0.0
        r = tp[label] / (tp[label] + fn[label]) if tp[label] + fn[label] else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        per_class[label] = {
            "precision": p, "recall": r, "f1": f1, "support": support[label],
        }
    return {"accuracy": correct / len(golds), "per_class": per_class}


def metrics_json(
    run: dict, configuration: str, model_label: str, seed: int, train_fraction=None
) -> dict:
    def stat(value):
        return {"mean": value, "std": 0.0}

    aggregate = {
        "accuracy": stat(run["accuracy"]),
        "per_class": {
            label: {
                "precision": stat(scores["precision"]),
                "recall": stat(scores["recall"]),
                "f1": stat(scores["f1"]),
                "support_mean": float(scores["support"]),
            }
            for label, scores in run["per_class"].items()
        },
    }
    return {
        "schema": METRICS_SCHEMA,
        "configuration": configuration,
        "model": model_label,
        "runs": 1,
        "seeds": [seed],
        "train_fraction": train_fraction,
        "classes": list(LABELS),
        "per_run": [{"seed": seed, "accuracy": run["accuracy"], "per_class": run["per_class"]}],
        "aggregate": aggregate,
    }


def evaluate_checkpoint(
    checkpoint_dir, test_rows, configuration: str, model_label: str,
    seed: int, train_fraction=None, max_seq_len: int = 128, device: str = "cpu",
) -> dict:
    checkpoint_dir = Path(checkpoint_dir)
    if not checkpoint_dir.exists():
        raise FileNotFoundError(f"checkpoint not found: {checkpoint_dir}")
    tokenizer = AutoTokenizer.from_pretrained(checkpoint_dir)
    model = AutoModelForSequenceClassification.from_pretrained(checkpoint_dir)
    model.to(device)
    predictions = predict(
        model, tokenizer, [t for t, _, _ in test_rows],
        max_seq_len=max_seq_len, device=device,
    )
    run = confusion_metrics([lab for _, lab, _ in test_rows], predictions)
    return metrics_json(run, configuration, model_label, seed, train_fraction)


def save_metrics(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
