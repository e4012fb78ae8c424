"""Readers for the corpus and split files produced by the tweetlab CLI.

Deliberately self-contained: the file formats, not the tweetlab Python
API, are the interface between the two packages.
"""

from __future__ import annotations

import json
from pathlib import Path

LABELS = ("commercial", "residential")
LABEL2ID = {label: i for i, label in enumerate(LABELS)}


class SplitLeakageError(RuntimeError):
    """The split file or the assembled training data leaks test buildings."""


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    with path.open("r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rows.append(json.loads(raw))
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {e.msg}") from e
    return rows


def load_corpus_dir(corpus_dir) -> tuple[dict, list[dict]]:
    """Returns (building_id -> label, tweet rows)."""
    corpus_dir = Path(corpus_dir)
    labels: dict[str, str] = {}
    for row in _read_jsonl(corpus_dir / "buildings.jsonl"):
        label = row["label"]
        if label not in LABELS:
            raise ValueError(f"unknown label {label!r} for building {row['building_id']!r}")
        labels[row["building_id"]] = label
    tweets = _read_jsonl(corpus_dir / "tweets.jsonl")
    dangling = sorted({t["building_id"] for t in tweets} - set(labels))
    if dangling:
        raise ValueError("tweets reference unknown buildings: " + ", ".join(dangling[:5]))
    return labels, tweets


def load_split(path) -> dict:
    path = Path(path)
    obj = json.loads(path.read_text(encoding="utf-8"))
    if obj.get("schema") != "split-v1":
        raise ValueError(f"{path}: not a split-v1 file")
    train = set(obj["train_building_ids"])
    test = set(obj["test_building_ids"])
    overlap = sorted(train & test)
    if overlap:
        raise SplitLeakageError(
            "split file leaks buildings across sides: " + ", ".join(overlap[:5])
        )
    return {
        "train_ids": train,
        "test_ids": test,
        "seed": obj.get("seed", 0),
        "train_fraction": obj.get("train_fraction"),
    }


def labeled_texts(tweets, labels, building_ids) -> list[tuple[str, str, str]]:
    """(text, label, building_id) triples for tweets of the given buildings."""
    ids = set(building_ids)
    return [
        (t["text"], labels[t["building_id"]], t["building_id"])
        for t in tweets
        if t["building_id"] in ids
    ]


def check_split_fidelity(train_rows, test_ids) -> None:
    """Abort if any training tweet belongs to a test-side building."""
    leaked = sorted({bid for _, _, bid in train_rows if bid in test_ids})
    if leaked:
        raise SplitLeakageError(
            "training tweets include test-side buildings: " + ", ".join(leaked[:5])
        )
