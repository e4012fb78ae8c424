"""Building-level train/test splitting.

Splitting happens at the building level so no building contributes tweets
to both sides (tweet-level splits would leak near-duplicate content across
the boundary). Splits are stratified by label and fully determined by
(building id set, fraction, seed), independent of input ordering.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import DataFormatError
from .records import Corpus
from .util import round_half_up

SPLIT_SCHEMA = "split-v1"


@dataclass(frozen=True)
class SplitSpec:
    train_building_ids: frozenset
    test_building_ids: frozenset
    seed: int
    train_fraction: float

    def save(self, path) -> None:
        payload = {
            "schema": SPLIT_SCHEMA,
            "seed": self.seed,
            "train_fraction": self.train_fraction,
            "train_building_ids": sorted(self.train_building_ids),
            "test_building_ids": sorted(self.test_building_ids),
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "SplitSpec":
        path = Path(path)
        obj = json.loads(path.read_text(encoding="utf-8"))
        if obj.get("schema") != SPLIT_SCHEMA:
            raise DataFormatError(f"not a {SPLIT_SCHEMA} file", path)
        return cls(
            train_building_ids=frozenset(obj["train_building_ids"]),
            test_building_ids=frozenset(obj["test_building_ids"]),
            seed=obj["seed"],
            train_fraction=obj["train_fraction"],
        )


def split_by_building(corpus: Corpus, fraction: float = 0.8, seed: int = 0) -> SplitSpec:
    """Shuffle buildings per label class with a seeded PRNG and cut each
    class at ``fraction``. All tweets of a building follow its side."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"train fraction must be in (0, 1), got {fraction}")
    by_label: dict[str, list[str]] = {}
    for b in corpus.buildings:
        by_label.setdefault(b.label, []).append(b.building_id)
    too_small = sorted(label for label, ids in by_label.items() if len(ids) < 2)
    if too_small:
        raise ValueError(
            "each class needs at least 2 buildings to split; too few: "
            + ", ".join(too_small)
        )
    rng = random.Random(seed)
    train: set[str] = set()
    test: set[str] = set()
    for label in sorted(by_label):
        ids = sorted(by_label[label])  # canonical order, input order must not matter
        rng.shuffle(ids)
        n_train = round_half_up(fraction * len(ids))
        train.update(ids[:n_train])
        test.update(ids[n_train:])
    return SplitSpec(
        train_building_ids=frozenset(train),
        test_building_ids=frozenset(test),
        seed=seed,
        train_fraction=fraction,
    )
