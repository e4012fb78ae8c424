"""Multinomial Naive Bayes over the shared tweet tokenizer.

Laplace-smoothed token likelihoods (raw counts, alpha = 1 by default) with
priors taken from class tweet counts. Prediction is the argmax of
log prior + sum of count * log likelihood; tokens outside the training
vocabulary are skipped, and exact ties resolve to the lexicographically
first label so results are reproducible.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import DataFormatError
from .records import LABELS
from .tokenizer import tokenize

MODEL_SCHEMA = "nbmodel-v1"


@dataclass(frozen=True)
class NaiveBayesModel:
    class_log_priors: dict
    token_log_likelihoods: dict  # label -> {token: log p(token|label)}
    vocabulary: frozenset
    alpha: float

    @property
    def labels(self) -> list[str]:
        return sorted(self.class_log_priors)

    def save(self, path) -> None:
        payload = {
            "schema": MODEL_SCHEMA,
            "alpha": self.alpha,
            "class_log_priors": self.class_log_priors,
            "token_log_likelihoods": self.token_log_likelihoods,
        }
        Path(path).write_text(
            json.dumps(payload, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "NaiveBayesModel":
        path = Path(path)
        obj = json.loads(path.read_text(encoding="utf-8"))
        if obj.get("schema") != MODEL_SCHEMA:
            raise DataFormatError(f"not a {MODEL_SCHEMA} file", path)
        likelihoods = obj["token_log_likelihoods"]
        vocab = frozenset().union(*(set(d) for d in likelihoods.values())) if likelihoods else frozenset()
        return cls(
            class_log_priors=obj["class_log_priors"],
            token_log_likelihoods=likelihoods,
            vocabulary=vocab,
            alpha=obj["alpha"],
        )


def train_nb(labeled_texts, alpha: float = 1.0, labels=LABELS) -> NaiveBayesModel:
    """Train from (text, label) pairs. Every expected label needs at least
    one example."""
    token_counts: dict[str, Counter] = {label: Counter() for label in labels}
    doc_counts: dict[str, int] = {label: 0 for label in labels}
    n_docs = 0
    for text, label in labeled_texts:
        if label not in token_counts:
            raise ValueError(f"unexpected label {label!r}")
        doc_counts[label] += 1
        n_docs += 1
        token_counts[label].update(tokenize(text))
    missing = sorted(label for label, n in doc_counts.items() if n == 0)
    if missing:
        raise ValueError("no training examples for class: " + ", ".join(missing))

    vocabulary = frozenset().union(*(set(c) for c in token_counts.values()))
    v = len(vocabulary)
    log_priors = {label: math.log(doc_counts[label] / n_docs) for label in labels}
    log_likelihoods: dict[str, dict] = {}
    for label in labels:
        total = sum(token_counts[label].values())
        denom = total + alpha * v
        log_likelihoods[label] = {
            token: math.log((token_counts[label].get(token, 0) + alpha) / denom)
            for token in vocabulary
        }
    return NaiveBayesModel(
        class_log_priors=dict(log_priors),
        token_log_likelihoods=log_likelihoods,
        vocabulary=vocabulary,
        alpha=alpha,
    )


def predict_nb(model: NaiveBayesModel, text: str) -> tuple[str, dict]:
    """Return (label, per-class log scores). Empty or fully-unknown text
    falls back to a prior-only decision."""
    counts = Counter(t for t in tokenize(text) if t in model.vocabulary)
    log_scores: dict[str, float] = {}
    for label in model.labels:
        likelihoods = model.token_log_likelihoods[label]
        score = model.class_log_priors[label]
        for token, cnt in counts.items():
            score += cnt * likelihoods[token]
        log_scores[label] = score
    best = None
    for label in model.labels:  # sorted, so ties keep the first label
        if best is None or log_scores[label] > log_scores[best]:
            best = label
    return best, log_scores
