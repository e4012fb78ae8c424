"""Building-metadata preprocessing.

Five rules, applied in a fixed order with first-fail reporting:
malformed -> generic_tag -> multi_tag -> label_tag_conflict, plus the
language-list cap at five (a transformation, never a rejection).
Rejections are data, not errors: clean() returns the kept records and a
machine-readable report covering every rejected building.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError, DataFormatError
from .records import LABELS, MAX_TWEETS_PER_BUILDING, BuildingRecord

RULES = ("malformed", "generic_tag", "multi_tag", "label_tag_conflict")

# Tags that convey no functional information at all.
DEFAULT_GENERIC_TAGS = frozenset({"yes", "roof"})

# Expected label per lowercase tag. "conflict" marks tags that fit neither
# binary class, so any labeled building carrying them is rejected.
TAG_LABEL_VALUES = ("commercial", "residential", "neutral", "conflict")
DEFAULT_TAG_LABEL_MAP = {
    "retail": "commercial",
    "restaurant": "commercial",
    "shop": "commercial",
    "supermarket": "commercial",
    "apartment": "residential",
    "apartments": "residential",
    "dormitory": "residential",
    "house": "residential",
    "mosque": "conflict",
    "church": "conflict",
    "temple": "conflict",
}

_SPECIAL = re.compile(r"[_/]")
_WS = re.compile(r"\s+")


def sanitize_text(s: str) -> str:
    """Replace underscores and slashes with spaces, collapse whitespace runs,
    and trim. Idempotent."""
    return _WS.sub(" ", _SPECIAL.sub(" ", s)).strip()


@dataclass(frozen=True)
class TagLabelMap:
    """Total lookup from lowercase tag to its expected label; unmapped tags
    are neutral (no opinion, never a conflict)."""

    mapping: dict

    def expected(self, tag: str) -> str:
        return self.mapping.get(tag.lower(), "neutral")

    @classmethod
    def default(cls) -> "TagLabelMap":
        return cls(dict(DEFAULT_TAG_LABEL_MAP))


@dataclass(frozen=True)
class CleaningConfig:
    generic_tags: frozenset = DEFAULT_GENERIC_TAGS
    tag_label_map: TagLabelMap = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.tag_label_map is None:
            object.__setattr__(self, "tag_label_map", TagLabelMap.default())


def load_cleaning_config(path) -> CleaningConfig:
    """Read a JSON config with optional ``generic_tags`` (list) and
    ``tag_label_map`` (tag -> label) sections. Entries extend the embedded
    defaults; config entries win on key collision."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataFormatError(f"invalid JSON: {e.msg}", path) from e
    if not isinstance(obj, dict):
        raise DataFormatError("config must be a JSON object", path)
    generic = set(DEFAULT_GENERIC_TAGS)
    for tag in obj.get("generic_tags", []):
        generic.add(str(tag).lower())
    mapping = dict(DEFAULT_TAG_LABEL_MAP)
    for tag, value in obj.get("tag_label_map", {}).items():
        if value not in TAG_LABEL_VALUES:
            raise ConfigError(
                f"tag_label_map[{tag!r}]: unknown value {value!r} "
                f"(expected one of {', '.join(TAG_LABEL_VALUES)})"
            )
        mapping[str(tag).lower()] = value
    return CleaningConfig(generic_tags=frozenset(generic), tag_label_map=TagLabelMap(mapping))


def is_generic_tag(tag: str, generic_tags=DEFAULT_GENERIC_TAGS) -> bool:
    return tag.lower() in generic_tags


def check_label_consistency(record: BuildingRecord, tag_map: TagLabelMap) -> bool:
    """False iff the tag's expected label is non-neutral and differs from the
    record's label ("conflict" tags differ from every label)."""
    expected = tag_map.expected(record.tag)
    return expected == "neutral" or expected == record.label


def cap_languages(langs) -> tuple[str, ...]:
    """First five entries, order preserved. An empty list means there is
    nothing to generate for the building, which is an error."""
    langs = tuple(langs)
    if not langs:
        raise ValueError("tweet_languages is empty: no tweets to generate")
    return langs[:MAX_TWEETS_PER_BUILDING]


@dataclass(frozen=True)
class RejectionEntry:
    building_id: str
    rule: str
    detail: str

    def to_json_dict(self) -> dict:
        return {"building_id": self.building_id, "rule": self.rule, "detail": self.detail}


@dataclass
class RejectionReport:
    entries: list

    def save(self, path) -> None:
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            for e in self.entries:
                f.write(json.dumps(e.to_json_dict(), ensure_ascii=False) + "\n")


def _first_failing_rule(
    record: BuildingRecord, config: CleaningConfig, multi_tag_index
) -> RejectionEntry | None:
    if not record.tweet_languages:
        return RejectionEntry(record.building_id, "malformed", "empty tweet_languages")
    if not record.tag:
        return RejectionEntry(record.building_id, "malformed", "empty tag after sanitizing")
    if not record.name:
        return RejectionEntry(record.building_id, "malformed", "empty name after sanitizing")
    if is_generic_tag(record.tag, config.generic_tags):
        return RejectionEntry(
            record.building_id, "generic_tag", f"non-informative tag {record.tag!r}"
        )
    tags = multi_tag_index.get(record.building_id)
    if tags is not None and len(set(tags)) > 1:
        listed = ", ".join(sorted(set(tags)))
        return RejectionEntry(record.building_id, "multi_tag", f"multiple tags: {listed}")
    if not check_label_consistency(record, config.tag_label_map):
        expected = config.tag_label_map.expected(record.tag)
        return RejectionEntry(
            record.building_id,
            "label_tag_conflict",
            f"tag {record.tag!r} (expected {expected}) conflicts with label {record.label!r}",
        )
    return None


def clean(
    buildings,
    config: CleaningConfig | None = None,
    multi_tag_index: dict | None = None,
) -> tuple[list[BuildingRecord], RejectionReport]:
    """Apply the preprocessing rules to a loaded building collection.

    multi_tag_index maps building_id to the full set of tags seen for that
    building upstream; buildings absent from it are assumed single-tag.
    Returns (kept, report): kept records have sanitized name/tag and capped
    language lists, and kept + rejected partition the input.
    """
    config = config or CleaningConfig()
    multi_tag_index = multi_tag_index or {}
    kept: list[BuildingRecord] = []
    entries: list[RejectionEntry] = []
    for record in buildings:
        sanitized = replace(
            record, tag=sanitize_text(record.tag), name=sanitize_text(record.name)
        )
        rejection = _first_failing_rule(sanitized, config, multi_tag_index)
        if rejection is not None:
            entries.append(rejection)
            continue
        kept.append(replace(sanitized, tweet_languages=cap_languages(sanitized.tweet_languages)))
    return kept, RejectionReport(entries=entries)


def load_tag_index(path) -> dict:
    """Read a ``{"building_id": ..., "tags": [...]}`` JSONL side index used by
    the multi-tag rule."""
    path = Path(path)
    index: dict[str, set] = {}
    with path.open("r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"invalid JSON: {e.msg}", path, line_no) from e
            if "building_id" not in obj or "tags" not in obj:
                raise DataFormatError("expected building_id and tags fields", path, line_no)
            index[str(obj["building_id"])] = {str(t) for t in obj["tags"]}
    return index
