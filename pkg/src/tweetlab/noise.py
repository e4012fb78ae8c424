"""Controlled corruption of a clean corpus.

Two noise kinds: label flipping (building granularity, so a wrong label
corrupts the whole building exactly as a wrong upstream tag would) and
irrelevant-text injection (tweet texts replaced by distractors from a
pool, labels and cardinalities untouched, so accuracy deltas measure
feature noise alone). Both are seeded and rate = 0 is the identity.
"""

from __future__ import annotations

import json
import random
import statistics
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError
from .records import Corpus
from .util import round_half_up

NOISE_KINDS = ("label_flip", "irrelevant_injection")

_OPPOSITE = {"commercial": "residential", "residential": "commercial"}


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    rate: float
    seed: int
    pool_path: str | None = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"unknown noise kind {self.kind!r} (expected {NOISE_KINDS})")
        if not 0.0 <= self.rate <= 1.0:
            raise ConfigError(f"noise rate must be in [0, 1], got {self.rate}")
        if self.kind == "irrelevant_injection" and self.pool_path is None:
            raise ConfigError("irrelevant_injection requires a distractor pool")
        if self.kind == "label_flip" and self.pool_path is not None:
            raise ConfigError("label_flip takes no distractor pool")


def flip_labels(corpus: Corpus, rate: float, seed: int) -> Corpus:
    """Toggle the label of a seeded uniform sample of rate * N buildings
    (round half up). Everything else is unchanged."""
    ids = sorted(b.building_id for b in corpus.buildings)
    n_flip = round_half_up(rate * len(ids))
    flipped = set(random.Random(seed).sample(ids, n_flip))
    buildings = tuple(
        replace(b, label=_OPPOSITE[b.label]) if b.building_id in flipped else b
        for b in corpus.buildings
    )
    provenance = dict(corpus.provenance)
    provenance["noise"] = {"kind": "label_flip", "rate": rate, "seed": seed}
    return Corpus(buildings=buildings, tweets=corpus.tweets, provenance=provenance)


def load_pool(path) -> list[str]:
    """Distractor pool: plain text file, one tweet per line."""
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    return [ln for ln in lines if ln]


def inject_irrelevant(corpus: Corpus, rate: float, pool, seed: int) -> Corpus:
    """Replace the text of a seeded sample of rate * N tweets with pool
    texts, drawn without replacement while the pool lasts and with
    replacement afterwards. Ids, labels, and languages stay unchanged."""
    pool = list(pool)
    if not pool:
        raise ValueError("distractor pool is empty")
    rng = random.Random(seed)
    n_tweets = len(corpus.tweets)
    n_replace = round_half_up(rate * n_tweets)
    slots = sorted(rng.sample(range(n_tweets), n_replace))
    shuffled_pool = pool[:]
    rng.shuffle(shuffled_pool)
    tweets = list(corpus.tweets)
    for k, idx in enumerate(slots):
        if k < len(shuffled_pool):
            text = shuffled_pool[k]
        else:
            text = rng.choice(pool)
        tweets[idx] = replace(tweets[idx], text=text)
    provenance = dict(corpus.provenance)
    provenance["noise"] = {"kind": "irrelevant_injection", "rate": rate, "seed": seed}
    return Corpus(buildings=corpus.buildings, tweets=tuple(tweets), provenance=provenance)


def corrupt(corpus: Corpus, spec: NoiseSpec, pool=None) -> Corpus:
    if spec.kind == "label_flip":
        return flip_labels(corpus, spec.rate, spec.seed)
    if pool is None:
        pool = load_pool(spec.pool_path)
    return inject_irrelevant(corpus, spec.rate, pool, spec.seed)


@dataclass(frozen=True)
class SweepRow:
    kind: str
    rate: float
    mean_accuracy: float
    std: float
    seeds: tuple
    accuracies: tuple

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rate": self.rate,
            "mean_accuracy": self.mean_accuracy,
            "std": self.std,
            "seeds": list(self.seeds),
            "accuracies": list(self.accuracies),
        }


def sweep(corpus: Corpus, kind: str, rates, seeds, eval_fn, pool=None) -> list[SweepRow]:
    """For each (rate, seed): corrupt the corpus, evaluate it with eval_fn
    (corrupted corpus, seed -> accuracy), and aggregate per rate."""
    if kind not in NOISE_KINDS:
        raise ConfigError(f"unknown noise kind {kind!r} (expected {NOISE_KINDS})")
    if kind == "irrelevant_injection" and pool is None:
        raise ConfigError("irrelevant_injection sweep requires a distractor pool")
    seeds = list(seeds)
    rows = []
    for rate in rates:
        accuracies = []
        for seed in seeds:
            if kind == "label_flip":
                corrupted = flip_labels(corpus, rate, seed)
            else:
                corrupted = inject_irrelevant(corpus, rate, pool, seed)
            accuracies.append(eval_fn(corrupted, seed))
        rows.append(
            SweepRow(
                kind=kind,
                rate=rate,
                mean_accuracy=statistics.fmean(accuracies),
                std=statistics.stdev(accuracies) if len(accuracies) >= 2 else 0.0,
                seeds=tuple(seeds),
                accuracies=tuple(accuracies),
            )
        )
    return rows


def sweep_rows_to_csv(rows) -> str:
    """Delimited degradation table, one row per rate."""
    lines = ["kind,rate,mean_accuracy,std,seeds"]
    for row in rows:
        seeds = ";".join(str(s) for s in row.seeds)
        lines.append(f"{row.kind},{row.rate},{row.mean_accuracy},{row.std},{seeds}")
    return "\n".join(lines) + "\n"


def save_sweep(rows, csv_path=None, json_path=None) -> None:
    if csv_path is not None:
        Path(csv_path).write_text(sweep_rows_to_csv(rows), encoding="utf-8")
    if json_path is not None:
        payload = {"schema": "sweep-v1", "rows": [r.to_json_dict() for r in rows]}
        Path(json_path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_sweep(path) -> list[SweepRow]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    rows = []
    for r in obj["rows"]:
        rows.append(
            SweepRow(
                kind=r["kind"],
                rate=r["rate"],
                mean_accuracy=r["mean_accuracy"],
                std=r["std"],
                seeds=tuple(r["seeds"]),
                accuracies=tuple(r["accuracies"]),
            )
        )
    return rows
