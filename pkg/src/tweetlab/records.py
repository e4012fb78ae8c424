"""Corpus data types and their line-delimited JSON on-disk format.

A corpus is a set of buildings joined with their tweets. Files are UTF-8
JSONL (one record per line, ``\\n`` endings): ``buildings.jsonl`` and
``tweets.jsonl``. Unknown extra fields on a record are preserved across a
load/save round trip but ignored by all logic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataFormatError, IntegrityError

LABELS = ("commercial", "residential")
SOURCES = ("real", "synthetic")
MAX_TWEETS_PER_BUILDING = 5

_BUILDING_FIELDS = ("building_id", "city", "tag", "name", "label", "tweet_languages")
_TWEET_FIELDS = ("building_id", "text", "language", "source")


@dataclass(frozen=True)
class BuildingRecord:
    """One building's metadata, including the per-building list of tweet
    languages that drives generation (order matters, one entry per tweet)."""

    building_id: str
    city: str
    tag: str
    name: str
    label: str
    tweet_languages: tuple[str, ...]
    extra: dict = field(default_factory=dict, compare=True)

    def to_json_dict(self) -> dict:
        d = {
            "building_id": self.building_id,
            "city": self.city,
            "tag": self.tag,
            "name": self.name,
            "label": self.label,
            "tweet_languages": list(self.tweet_languages),
        }
        for k in sorted(self.extra):
            d[k] = self.extra[k]
        return d


@dataclass(frozen=True)
class TweetRecord:
    building_id: str
    text: str
    language: str
    source: str
    extra: dict = field(default_factory=dict, compare=True)

    def to_json_dict(self) -> dict:
        d = {
            "building_id": self.building_id,
            "text": self.text,
            "language": self.language,
            "source": self.source,
        }
        for k in sorted(self.extra):
            d[k] = self.extra[k]
        return d


@dataclass(eq=False)
class Corpus:
    """Buildings joined with their tweets.

    Equality is order-insensitive on buildings, order-preserving on tweets,
    and ignores provenance (which records where the data came from, not what
    it is). Instances are treated as immutable after construction.
    """

    buildings: tuple[BuildingRecord, ...]
    tweets: tuple[TweetRecord, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.buildings = tuple(self.buildings)
        self.tweets = tuple(self.tweets)
        self._by_id = {b.building_id: b for b in self.buildings}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self._by_id == other._by_id and self.tweets == other.tweets

    def building(self, building_id: str) -> BuildingRecord:
        return self._by_id[building_id]

    @property
    def building_ids(self) -> set[str]:
        return set(self._by_id)

    def label_of(self, building_id: str) -> str:
        return self._by_id[building_id].label

    def tweets_by_building(self) -> dict[str, list[TweetRecord]]:
        groups: dict[str, list[TweetRecord]] = {b.building_id: [] for b in self.buildings}
        for t in self.tweets:
            groups[t.building_id].append(t)
        return groups


def _parse_line(raw: str, path, line_no: int) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"invalid JSON: {e.msg}", path, line_no) from e
    if not isinstance(obj, dict):
        raise DataFormatError("record is not a JSON object", path, line_no)
    return obj


def _building_from_dict(obj: dict, path=None, line_no: int | None = None) -> BuildingRecord:
    missing = [k for k in _BUILDING_FIELDS if k not in obj]
    if missing:
        raise DataFormatError(f"missing fields: {', '.join(missing)}", path, line_no)
    building_id = str(obj["building_id"])
    if not building_id.strip():
        raise DataFormatError("empty building_id", path, line_no)
    label = obj["label"]
    if label not in LABELS:
        raise DataFormatError(
            f"unknown label {label!r} (expected one of {', '.join(LABELS)})", path, line_no
        )
    langs = obj["tweet_languages"]
    if not isinstance(langs, list) or not all(isinstance(x, str) for x in langs):
        raise DataFormatError("tweet_languages must be a list of strings", path, line_no)
    extra = {k: v for k, v in obj.items() if k not in _BUILDING_FIELDS}
    return BuildingRecord(
        building_id=building_id,
        city=str(obj["city"]),
        tag=str(obj["tag"]),
        name=str(obj["name"]),
        label=label,
        tweet_languages=tuple(langs),
        extra=extra,
    )


def _tweet_from_dict(obj: dict, path=None, line_no: int | None = None) -> TweetRecord:
    missing = [k for k in _TWEET_FIELDS if k not in obj]
    if missing:
        raise DataFormatError(f"missing fields: {', '.join(missing)}", path, line_no)
    text = str(obj["text"])
    if not text.strip():
        raise DataFormatError("empty tweet text", path, line_no)
    source = obj["source"]
    if source not in SOURCES:
        raise DataFormatError(
            f"unknown source {source!r} (expected one of {', '.join(SOURCES)})", path, line_no
        )
    extra = {k: v for k, v in obj.items() if k not in _TWEET_FIELDS}
    return TweetRecord(
        building_id=str(obj["building_id"]),
        text=text,
        language=str(obj["language"]),
        source=source,
        extra=extra,
    )


def load_buildings(path) -> list[BuildingRecord]:
    """Load buildings from JSONL. Duplicate building_id is an error."""
    path = Path(path)
    records: list[BuildingRecord] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            rec = _building_from_dict(_parse_line(raw, path, line_no), path, line_no)
            if rec.building_id in seen:
                raise IntegrityError(
                    f"{path}:{line_no}: duplicate building_id {rec.building_id!r}"
                )
            seen.add(rec.building_id)
            records.append(rec)
    return records


def load_tweets(path) -> list[TweetRecord]:
    """Load tweets from JSONL, preserving file order."""
    path = Path(path)
    records: list[TweetRecord] = []
    with path.open("r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            records.append(_tweet_from_dict(_parse_line(raw, path, line_no), path, line_no))
    return records


def join_corpus(buildings, tweets, provenance: dict | None = None) -> Corpus:
    """Join buildings and tweets into a Corpus, verifying referential
    integrity. Tweets referencing unknown buildings are collected and
    reported together rather than failing on the first one."""
    buildings = tuple(buildings)
    tweets = tuple(tweets)
    ids: set[str] = set()
    for b in buildings:
        if b.building_id in ids:
            raise IntegrityError(f"duplicate building_id {b.building_id!r}")
        ids.add(b.building_id)
    dangling = sorted({t.building_id for t in tweets if t.building_id not in ids})
    if dangling:
        raise IntegrityError(
            "tweets reference unknown building ids: " + ", ".join(dangling)
        )
    counts: dict[str, int] = {}
    for t in tweets:
        counts[t.building_id] = counts.get(t.building_id, 0) + 1
    over = sorted(bid for bid, n in counts.items() if n > MAX_TWEETS_PER_BUILDING)
    if over:
        raise IntegrityError(
            f"buildings exceed {MAX_TWEETS_PER_BUILDING} tweets: " + ", ".join(over)
        )
    return Corpus(buildings=buildings, tweets=tweets, provenance=dict(provenance or {}))


def save_buildings(records, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec.to_json_dict(), ensure_ascii=False) + "\n")


def save_tweets(records, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec.to_json_dict(), ensure_ascii=False) + "\n")


def save_corpus(corpus: Corpus, out_dir) -> None:
    """Write ``buildings.jsonl`` and ``tweets.jsonl`` under out_dir so that
    ``load_corpus(out_dir) == corpus``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_buildings(corpus.buildings, out_dir / "buildings.jsonl")
    save_tweets(corpus.tweets, out_dir / "tweets.jsonl")


def load_corpus(
    in_dir, buildings_name: str = "buildings.jsonl", tweets_name: str = "tweets.jsonl"
) -> Corpus:
    in_dir = Path(in_dir)
    buildings = load_buildings(in_dir / buildings_name)
    tweets = load_tweets(in_dir / tweets_name)
    return join_corpus(buildings, tweets, provenance={"source": str(in_dir)})
