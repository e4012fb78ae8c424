"""Corpus-level diversity report: Self-BLEU plus unigram log10 perplexity."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .bleu import BLEU_SMOOTHING_ID, self_bleu
from .tokenizer import TOKENIZER_ID
from .unigram import UnigramModel, log10_perplexity

DIVERSITY_SCHEMA = "diversityreport-v1"


@dataclass(frozen=True)
class DiversityReport:
    dataset: str
    self_bleu_percent: float
    log10_perplexity: float
    corpus_size: int
    tokenizer_id: str

    def to_json_dict(self) -> dict:
        return {
            "schema": DIVERSITY_SCHEMA,
            "dataset": self.dataset,
            "self_bleu_percent": self.self_bleu_percent,
            "log10_perplexity": self.log10_perplexity,
            "corpus_size": self.corpus_size,
            "tokenizer_id": self.tokenizer_id,
        }

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def from_json_dict(cls, obj: dict) -> "DiversityReport":
        return cls(
            dataset=obj["dataset"],
            self_bleu_percent=obj["self_bleu_percent"],
            log10_perplexity=obj["log10_perplexity"],
            corpus_size=obj["corpus_size"],
            tokenizer_id=obj["tokenizer_id"],
        )


def compute_diversity(texts, model: UnigramModel, dataset: str = "corpus") -> DiversityReport:
    texts = list(texts)
    return DiversityReport(
        dataset=dataset,
        self_bleu_percent=self_bleu(texts),
        log10_perplexity=log10_perplexity(model, texts),
        corpus_size=len(texts),
        tokenizer_id=f"{TOKENIZER_ID}+{BLEU_SMOOTHING_ID}",
    )
