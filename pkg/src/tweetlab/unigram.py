"""Add-one-smoothed unigram language model for log10 perplexity scoring.

The model is trained once on a held-out tweet corpus and reused to score
candidate corpora: similar perplexity between two corpora means similar
vocabulary usage. Probabilities reserve one extra smoothing slot for an
unknown-token class, so p(w) = (count(w) + 1) / (total + vocab + 1) and the
distribution over vocab + UNK sums to one.
"""

from __future__ import annotations

import math
from collections import Counter
from pathlib import Path

from .errors import DataFormatError
from .tokenizer import tokenize


class UnigramModel:
    def __init__(self, counts: dict):
        self.counts = dict(counts)
        self.total = sum(self.counts.values())
        self.vocab_size = len(self.counts)

    def probability(self, token: str) -> float:
        """Smoothed p(token); every unseen token shares the UNK slot."""
        return (self.counts.get(token, 0) + 1) / (self.total + self.vocab_size + 1)

    def save(self, path) -> None:
        """One ``token<TAB>count`` line per vocabulary entry, token-sorted."""
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            for token in sorted(self.counts):
                f.write(f"{token}\t{self.counts[token]}\n")

    @classmethod
    def load(cls, path) -> "UnigramModel":
        path = Path(path)
        counts: dict = {}
        with path.open("r", encoding="utf-8") as f:
            for line_no, raw in enumerate(f, start=1):
                raw = raw.rstrip("\n")
                if not raw:
                    continue
                parts = raw.split("\t")
                if len(parts) != 2:
                    raise DataFormatError("expected token<TAB>count", path, line_no)
                try:
                    counts[parts[0]] = int(parts[1])
                except ValueError as e:
                    raise DataFormatError(f"bad count {parts[1]!r}", path, line_no) from e
        return cls(counts)


def train_unigram(texts) -> UnigramModel:
    """Count tokens over a tokenized corpus."""
    counts: Counter = Counter()
    n_texts = 0
    for text in texts:
        n_texts += 1
        counts.update(tokenize(text))
    if n_texts == 0:
        raise ValueError("cannot train a unigram model on an empty corpus")
    return UnigramModel(counts)


def log10_perplexity(model: UnigramModel, texts) -> float:
    """Average negative base-10 log probability per token of ``texts``
    under ``model``. Lower means the vocabulary is better aligned with the
    model's training corpus."""
    total_log10 = 0.0
    n_tokens = 0
    for text in texts:
        for token in tokenize(text):
            total_log10 += math.log10(model.probability(token))
            n_tokens += 1
    if n_tokens == 0:
        raise ValueError("texts tokenize to zero tokens; nothing to score")
    return -total_log10 / n_tokens
