"""Classifier experiments: per-class evaluation and the three standard
configurations (real_world, synthetic, cross_domain) with multi-seed
mean +/- sample-std reporting.

Per seed the building split is computed once and shared, so the
cross-domain run trains on the synthetic tweets of the train-side
buildings and tests on the real tweets of the test-side buildings, keeping
the building-level separation intact across domains.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path

from .errors import DataFormatError, IntegrityError
from .nbayes import NaiveBayesModel, predict_nb, train_nb
from .records import Corpus
from .splits import SplitSpec, split_by_building

METRICS_SCHEMA = "classmetrics-v1"
CONFIGURATIONS = ("real_world", "synthetic", "cross_domain")

METRICS_JSON_SCHEMA = {
    "type": "object",
    "required": ["schema", "configuration", "model", "runs", "seeds", "aggregate"],
    "properties": {
        "schema": {"const": METRICS_SCHEMA},
        "configuration": {"type": "string"},
        "model": {"type": "string"},
        "runs": {"type": "integer", "minimum": 1},
        "seeds": {"type": "array", "items": {"type": "integer"}},
        "train_fraction": {"type": "number"},
        "classes": {"type": "array", "items": {"type": "string"}},
        "per_run": {"type": "array"},
        "aggregate": {
            "type": "object",
            "required": ["accuracy", "per_class"],
            "properties": {
                "accuracy": {"$ref": "#/$defs/stat"},
                "per_class": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "required": ["precision", "recall", "f1"],
                        "properties": {
                            "precision": {"$ref": "#/$defs/stat"},
                            "recall": {"$ref": "#/$defs/stat"},
                            "f1": {"$ref": "#/$defs/stat"},
                            "support_mean": {"type": "number"},
                        },
                    },
                },
            },
        },
    },
    "$defs": {
        "stat": {
            "type": "object",
            "required": ["mean", "std"],
            "properties": {
                "mean": {"type": "number", "minimum": 0, "maximum": 1},
                "std": {"type": "number", "minimum": 0},
            },
        }
    },
}


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class RunMetrics:
    """Metrics of a single trained model on a single test set."""

    accuracy: float
    per_class: dict
    seed: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "accuracy": self.accuracy,
            "per_class": {
                label: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for label, s in sorted(self.per_class.items())
            },
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "RunMetrics":
        per_class = {
            label: ClassScores(
                precision=d["precision"],
                recall=d["recall"],
                f1=d["f1"],
                support=d["support"],
            )
            for label, d in obj["per_class"].items()
        }
        return cls(accuracy=obj["accuracy"], per_class=per_class, seed=obj.get("seed"))


def _mean_std(values) -> dict:
    values = list(values)
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) >= 2 else 0.0
    return {"mean": mean, "std": std}


@dataclass
class ClassMetrics:
    """Per-class precision/recall/F1 and accuracy aggregated over runs."""

    configuration: str
    model: str
    per_run: list
    train_fraction: float | None = None

    @property
    def runs(self) -> int:
        return len(self.per_run)

    @property
    def seeds(self) -> list:
        return [r.seed for r in self.per_run]

    @property
    def classes(self) -> list:
        return sorted(self.per_run[0].per_class)

    def aggregate(self) -> dict:
        agg: dict = {"accuracy": _mean_std(r.accuracy for r in self.per_run), "per_class": {}}
        for label in self.classes:
            scores = [r.per_class[label] for r in self.per_run]
            agg["per_class"][label] = {
                "precision": _mean_std(s.precision for s in scores),
                "recall": _mean_std(s.recall for s in scores),
                "f1": _mean_std(s.f1 for s in scores),
                "support_mean": statistics.fmean(s.support for s in scores),
            }
        return agg

    def to_json_dict(self) -> dict:
        return {
            "schema": METRICS_SCHEMA,
            "configuration": self.configuration,
            "model": self.model,
            "runs": self.runs,
            "seeds": self.seeds,
            "train_fraction": self.train_fraction,
            "classes": self.classes,
            "per_run": [r.to_json_dict() for r in self.per_run],
            "aggregate": self.aggregate(),
        }

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ClassMetrics":
        if obj.get("schema") != METRICS_SCHEMA:
            raise DataFormatError(f"not a {METRICS_SCHEMA} object")
        per_run = [RunMetrics.from_json_dict(r) for r in obj["per_run"]]
        return cls(
            configuration=obj["configuration"],
            model=obj["model"],
            per_run=per_run,
            train_fraction=obj.get("train_fraction"),
        )

    @classmethod
    def load(cls, path) -> "ClassMetrics":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def evaluate(model: NaiveBayesModel, labeled_test, seed: int | None = None) -> RunMetrics:
    """Score (text, label) pairs and derive per-class metrics from the
    confusion matrix. Precision/recall with an empty denominator are 0, and
    F1 is 0 when precision and recall both are."""
    labeled_test = list(labeled_test)
    if not labeled_test:
        raise ValueError("empty test set")
    labels = model.labels
    tp = {label: 0 for label in labels}
    fp = {label: 0 for label in labels}
    fn = {label: 0 for label in labels}
    support = {label: 0 for label in labels}
    correct = 0
    for text, gold in labeled_test:
        if gold not in support:
            raise ValueError(f"test label {gold!r} unknown to the model")
        predicted, _ = predict_nb(model, text)
        support[gold] += 1
        if predicted == gold:
            correct += 1
            tp[gold] += 1
        else:
            fp[predicted] += 1
            fn[gold] += 1
    per_class = {}
    for label in labels:
        p = tp[label] / (tp[label] + fp[label]) if tp[label] + fp[label] else 0.0
        r = tp[label] / (tp[label] + fn[label]) if tp[label] + fn[label] else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        per_class[label] = ClassScores(precision=p, recall=r, f1=f1, support=support[label])
    return RunMetrics(accuracy=correct / len(labeled_test), per_class=per_class, seed=seed)


def labeled_pairs(corpus: Corpus, building_ids) -> list:
    """(text, building label) pairs for the tweets of the given buildings."""
    ids = set(building_ids)
    return [
        (t.text, corpus.label_of(t.building_id))
        for t in corpus.tweets
        if t.building_id in ids
    ]


def check_mirrored_buildings(real: Corpus, synthetic: Corpus) -> None:
    """Both corpora must describe the same buildings with the same labels."""
    if real.building_ids != synthetic.building_ids:
        only_real = sorted(real.building_ids - synthetic.building_ids)[:5]
        only_synth = sorted(synthetic.building_ids - real.building_ids)[:5]
        raise IntegrityError(
            "corpora cover different building sets "
            f"(only in real: {only_real}, only in synthetic: {only_synth})"
        )
    mismatched = sorted(
        bid for bid in real.building_ids if real.label_of(bid) != synthetic.label_of(bid)
    )
    if mismatched:
        raise IntegrityError(
            "building labels differ between corpora: " + ", ".join(mismatched[:5])
        )


def run_configuration(
    configuration: str,
    real: Corpus | None,
    synthetic: Corpus | None,
    seeds,
    fraction: float = 0.8,
    alpha: float = 1.0,
    model_name: str = "nb",
) -> ClassMetrics:
    """Train and evaluate once per seed under one of the three standard
    configurations, resampling only the building split between seeds."""
    if configuration not in CONFIGURATIONS:
        raise ValueError(
            f"unknown configuration {configuration!r} (expected one of {CONFIGURATIONS})"
        )
    needs_real = configuration in ("real_world", "cross_domain")
    needs_synth = configuration in ("synthetic", "cross_domain")
    if needs_real and real is None:
        raise ValueError(f"configuration {configuration} requires a real corpus")
    if needs_synth and synthetic is None:
        raise ValueError(f"configuration {configuration} requires a synthetic corpus")
    if real is not None and synthetic is not None:
        check_mirrored_buildings(real, synthetic)

    train_corpus = synthetic if configuration in ("synthetic", "cross_domain") else real
    test_corpus = real if configuration in ("real_world", "cross_domain") else synthetic
    split_corpus = real if real is not None else synthetic

    per_run = []
    for seed in seeds:
        spec = split_by_building(split_corpus, fraction=fraction, seed=seed)
        model = train_nb(labeled_pairs(train_corpus, spec.train_building_ids), alpha=alpha)
        metrics = evaluate(model, labeled_pairs(test_corpus, spec.test_building_ids), seed=seed)
        per_run.append(metrics)
    return ClassMetrics(
        configuration=configuration,
        model=model_name,
        per_run=per_run,
        train_fraction=fraction,
    )


def single_corpus_accuracy(
    corpus: Corpus, seed: int, fraction: float = 0.8, alpha: float = 1.0
) -> float:
    """Split, train, and test within one corpus; the evaluation used by
    noise sweeps."""
    spec = split_by_building(corpus, fraction=fraction, seed=seed)
    model = train_nb(labeled_pairs(corpus, spec.train_building_ids), alpha=alpha)
    metrics = evaluate(model, labeled_pairs(corpus, spec.test_building_ids), seed=seed)
    return metrics.accuracy


def make_split_for_corpora(
    real: Corpus | None, synthetic: Corpus | None, fraction: float, seed: int
) -> SplitSpec:
    split_corpus = real if real is not None else synthetic
    if split_corpus is None:
        raise ValueError("need at least one corpus to split")
    if real is not None and synthetic is not None:
        check_mirrored_buildings(real, synthetic)
    return split_by_building(split_corpus, fraction=fraction, seed=seed)
