"""Tweet generation against a chat-completion endpoint or a local mock.

The wire format is the de-facto chat-completions shape: POST a JSON body
with ``model``, a two-element ``messages`` list (system then user),
``temperature`` and ``max_tokens``; the first choice's message content must
itself parse as a JSON array of strings, one tweet per requested language,
assigned positionally. Transport failures, unparseable generations, and
wrong-length arrays are retried with exponential backoff; a building whose
retries are exhausted becomes a failure entry, never a partial tweet set.

The mock backend produces template tweets embedding the building name and
tag, fully determined by (run seed, building id), which is enough for
end-to-end pipelines and classifier smoke experiments without a server.
"""

from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import BudgetExceededError, ConfigError, GenerationError
from .prompts import PromptBundle, build_bundle, build_system_prompt
from .records import BuildingRecord, Corpus, TweetRecord, join_corpus

BACKENDS = ("http", "mock")
DEFAULT_MODEL = "unsloth/Llama-3.3-70B-Instruct-bnb-4bit"
API_KEY_ENV = "LLM_API_KEY"


@dataclass(frozen=True)
class GenerationConfig:
    backend: str = "mock"
    endpoint_url: str = ""
    model_name: str = DEFAULT_MODEL
    temperature: float = 0.8
    max_tokens: int = 1024
    max_retries: int = 3
    max_concurrency: int = 4
    timeout: float = 60.0
    request_budget: int | None = None
    audit_dir: str | None = None

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r} (expected {BACKENDS})")
        if self.backend == "http" and not self.endpoint_url:
            raise ConfigError("http backend requires endpoint_url")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be positive")
        if not 0 <= self.max_retries <= 10:
            raise ConfigError("max_retries must be in [0, 10]")
        if self.max_concurrency < 1:
            raise ConfigError("max_concurrency must be >= 1")

    def to_json_dict(self) -> dict:
        return {
            "backend": self.backend,
            "endpoint_url": self.endpoint_url,
            "model_name": self.model_name,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "max_retries": self.max_retries,
            "max_concurrency": self.max_concurrency,
            "timeout": self.timeout,
            "request_budget": self.request_budget,
        }


@dataclass(frozen=True)
class GenerationResult:
    building_id: str
    tweets: tuple  # (text, language) pairs, language assigned positionally
    raw_response: str
    attempts: int


@dataclass(frozen=True)
class FailureEntry:
    building_id: str
    error: str
    attempts: int

    def to_json_dict(self) -> dict:
        return {"building_id": self.building_id, "error": self.error, "attempts": self.attempts}


class _Budget:
    """Thread-safe countdown of the total requests a run may issue."""

    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0
        self._lock = threading.Lock()

    def charge(self) -> None:
        if self.limit is None:
            return
        with self._lock:
            if self.used >= self.limit:
                raise BudgetExceededError(
                    f"request budget of {self.limit} exhausted"
                )
            self.used += 1


def _default_post(url: str, payload: dict, headers: dict, timeout: float):
    import requests

    resp = requests.post(url, json=payload, headers=headers, timeout=timeout)
    return resp.status_code, resp.text


def _extract_tweet_array(content: str, expected_len: int) -> list[str]:
    """Parse a model response into the required JSON array of strings."""
    text = content.strip()
    if text.startswith("```"):
        # tolerate fenced code blocks around the array
        lines = text.splitlines()
        if lines and lines[0].startswith("```"):
            lines = lines[1:]
        if lines and lines[-1].strip().startswith("```"):
            lines = lines[:-1]
        text = "\n".join(lines).strip()
    parsed = json.loads(text)
    if not isinstance(parsed, list) or not all(isinstance(x, str) for x in parsed):
        raise ValueError("response is not a JSON array of strings")
    if len(parsed) != expected_len:
        raise ValueError(f"expected {expected_len} tweets, got {len(parsed)}")
    return parsed


_MOCK_TEMPLATES = (
    "Spent the afternoon at {name}, easily my favorite {tag} in {city}. {hashtag}",
    "Quick stop at {name} today. For a {tag} in {city} it never disappoints.",
    "Honest review: {name} sets the bar for every {tag} around {city}.",
    "Can anyone beat {name}? Best {tag} experience I have had in {city}. {hashtag}",
    "Back at {name} again, something about this {tag} keeps pulling me in.",
    "If you need a {tag} in {city}, {name} is the answer. {hashtag}",
)


def _mock_tweets(record: BuildingRecord, run_seed: int) -> list[str]:
    rng = random.Random(f"{run_seed}:{record.building_id}")
    hashtag = "#" + "".join(ch for ch in record.name.lower() if ch.isalnum())
    texts = []
    for i, _lang in enumerate(record.tweet_languages):
        template = _MOCK_TEMPLATES[rng.randrange(len(_MOCK_TEMPLATES))]
        text = template.format(
            name=record.name, tag=record.tag.lower(), city=record.city, hashtag=hashtag
        )
        texts.append(f"{text} ({i + 1})" if i else text)
    return texts


def generate(
    bundle: PromptBundle,
    record: BuildingRecord,
    cfg: GenerationConfig,
    run_seed: int = 0,
    post_fn=None,
    sleeper=time.sleep,
    api_key: str | None = None,
    budget: _Budget | None = None,
) -> GenerationResult:
    """Generate the full tweet set for one building, or raise
    GenerationError after exhausting retries."""
    expected = len(record.tweet_languages)
    if cfg.backend == "mock":
        texts = _mock_tweets(record, run_seed)
        return GenerationResult(
            building_id=record.building_id,
            tweets=tuple(zip(texts, record.tweet_languages)),
            raw_response=json.dumps(texts, ensure_ascii=False),
            attempts=1,
        )

    post = post_fn or _default_post
    payload = {
        "model": cfg.model_name,
        "messages": [
            {"role": "system", "content": bundle.system},
            {"role": "user", "content": bundle.user},
        ],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    }
    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"

    last_error = "no attempt made"
    attempts = 0
    for attempt in range(cfg.max_retries + 1):
        if budget is not None:
            budget.charge()
        attempts = attempt + 1
        try:
            status, body = post(cfg.endpoint_url, payload, headers, cfg.timeout)
        except Exception as e:  # transport failure, retryable
            last_error = f"transport error: {e}"
        else:
            if status == 200:
                try:
                    content = json.loads(body)["choices"][0]["message"]["content"]
                    texts = _extract_tweet_array(content, expected)
                except (KeyError, IndexError, TypeError, ValueError) as e:
                    last_error = f"unusable response: {e}"
                else:
                    _audit(cfg, record.building_id, payload, body, attempts)
                    return GenerationResult(
                        building_id=record.building_id,
                        tweets=tuple(zip(texts, record.tweet_languages)),
                        raw_response=body,
                        attempts=attempts,
                    )
            elif status == 429 or status >= 500:
                last_error = f"HTTP {status}"
            else:
                # auth/endpoint misconfiguration: retrying cannot help
                raise ConfigError(f"endpoint rejected request with HTTP {status}: {body[:200]}")
        if attempt < cfg.max_retries:
            sleeper(0.5 * (2**attempt))
    raise GenerationError(record.building_id, last_error, attempts=attempts)


def _audit(cfg: GenerationConfig, building_id: str, payload: dict, body: str, attempts: int):
    if not cfg.audit_dir:
        return
    audit_dir = Path(cfg.audit_dir)
    audit_dir.mkdir(parents=True, exist_ok=True)
    transcript = {
        "building_id": building_id,
        "request": payload,  # auth header deliberately not recorded
        "response": body,
        "attempts": attempts,
    }
    (audit_dir / f"{building_id}.json").write_text(
        json.dumps(transcript, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def generate_corpus(
    buildings,
    cfg: GenerationConfig,
    seed: int = 0,
    system: str | None = None,
    template_path=None,
    post_fn=None,
    sleeper=time.sleep,
    api_key: str | None = None,
) -> tuple[Corpus, list[FailureEntry]]:
    """Generate synthetic tweets for every building.

    Returns the corpus of successfully generated buildings (input order,
    tweets in language-list order) plus a failure entry per building that
    could not be generated. Mock runs are fully determined by
    (buildings, seed).
    """
    buildings = list(buildings)
    if system is None:
        system = build_system_prompt(template_path)
    bundles = [build_bundle(rec, system=system) for rec in buildings]
    budget = _Budget(cfg.request_budget)

    def one(i: int):
        return generate(
            bundles[i],
            buildings[i],
            cfg,
            run_seed=seed,
            post_fn=post_fn,
            sleeper=sleeper,
            api_key=api_key,
            budget=budget,
        )

    outcomes: list = [None] * len(buildings)
    if cfg.backend == "http" and cfg.max_concurrency > 1 and len(buildings) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.max_concurrency) as pool:
            futures = [pool.submit(one, i) for i in range(len(buildings))]
            for i, fut in enumerate(futures):
                try:
                    outcomes[i] = fut.result()
                except GenerationError as e:
                    outcomes[i] = FailureEntry(e.building_id, str(e), e.attempts)
    else:
        for i in range(len(buildings)):
            try:
                outcomes[i] = one(i)
            except GenerationError as e:
                outcomes[i] = FailureEntry(e.building_id, str(e), e.attempts)

    kept_buildings = []
    tweets = []
    failures = []
    for record, outcome in zip(buildings, outcomes):
        if isinstance(outcome, FailureEntry):
            failures.append(outcome)
            continue
        kept_buildings.append(record)
        for text, language in outcome.tweets:
            tweets.append(
                TweetRecord(
                    building_id=record.building_id,
                    text=text,
                    language=language,
                    source="synthetic",
                )
            )
    corpus = join_corpus(
        kept_buildings,
        tweets,
        provenance={"generator": cfg.to_json_dict(), "seed": seed},
    )
    return corpus, failures
