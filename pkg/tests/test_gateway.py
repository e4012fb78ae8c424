import json

import pytest

from corpuslab import make_balanced_buildings, make_building
from tweetlab.errors import BudgetExceededError, ConfigError, GenerationError
from tweetlab.gateway import (
    FailureEntry,
    GenerationConfig,
    generate,
    generate_corpus,
)
from tweetlab.prompts import build_bundle
from tweetlab.records import save_corpus


def http_cfg(**kw):
    base = dict(backend="http", endpoint_url="http://llm.test/v1/chat/completions",
                max_retries=2, max_concurrency=1)
    base.update(kw)
    return GenerationConfig(**base)


def ok_body(texts):
    return json.dumps(
        {"choices": [{"message": {"content": json.dumps(texts, ensure_ascii=False)}}]}
    )


def test_config_validation():
    with pytest.raises(ConfigError):
        GenerationConfig(backend="grpc")
    with pytest.raises(ConfigError):
        GenerationConfig(backend="http")  # no endpoint
    with pytest.raises(ConfigError):
        GenerationConfig(max_retries=11)
    with pytest.raises(ConfigError):
        GenerationConfig(max_concurrency=0)
    with pytest.raises(ConfigError):
        GenerationConfig(temperature=-0.1)


def test_mock_two_english_tweets():
    rec = make_building(1, "commercial", n_langs=2)
    cfg = GenerationConfig(backend="mock")
    result = generate(build_bundle(rec), rec, cfg, run_seed=7)
    assert len(result.tweets) == 2
    assert [lang for _, lang in result.tweets] == ["English", "English"]
    assert result.attempts == 1
    again = generate(build_bundle(rec), rec, cfg, run_seed=7)
    assert again == result


def test_mock_embeds_name_and_tag():
    rec = make_building(2, "residential", n_langs=1)
    result = generate(build_bundle(rec), rec, GenerationConfig(backend="mock"), run_seed=0)
    text = result.tweets[0][0]
    assert rec.name in text
    assert rec.tag.lower() in text.lower()


def test_positional_language_assignment():
    from dataclasses import replace

    rec = replace(make_building(3, "commercial"), tweet_languages=("English", "German"))
    result = generate(build_bundle(rec), rec, GenerationConfig(backend="mock"), run_seed=1)
    assert [lang for _, lang in result.tweets] == ["English", "German"]


def test_mock_corpus_determinism_bytes(tmp_path):
    buildings = make_balanced_buildings(8, n_langs=3)
    cfg = GenerationConfig(backend="mock")
    for sub in ("a", "b"):
        corpus, failures = generate_corpus(buildings, cfg, seed=42)
        assert failures == []
        save_corpus(corpus, tmp_path / sub)
    for name in ("buildings.jsonl", "tweets.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_mock_corpus_differs_across_seeds():
    buildings = make_balanced_buildings(4, n_langs=2)
    cfg = GenerationConfig(backend="mock")
    c1, _ = generate_corpus(buildings, cfg, seed=1)
    c2, _ = generate_corpus(buildings, cfg, seed=2)
    assert [t.text for t in c1.tweets] != [t.text for t in c2.tweets]


def test_http_success_payload_shape():
    rec = make_building(1, "commercial", n_langs=2)
    seen = {}

    def post_fn(url, payload, headers, timeout):
        seen["url"] = url
        seen["payload"] = payload
        seen["headers"] = headers
        return 200, ok_body(["tweet one", "tweet two"])

    cfg = http_cfg()
    result = generate(build_bundle(rec), rec, cfg, post_fn=post_fn, api_key="sk-secret")
    assert seen["url"] == cfg.endpoint_url
    payload = seen["payload"]
    assert payload["model"] == cfg.model_name
    assert [m["role"] for m in payload["messages"]] == ["system", "user"]
    assert payload["temperature"] == cfg.temperature
    assert payload["max_tokens"] == cfg.max_tokens
    assert seen["headers"]["Authorization"] == "Bearer sk-secret"
    assert [t for t, _ in result.tweets] == ["tweet one", "tweet two"]
    assert result.attempts == 1


def test_http_wrong_length_retries_then_fails():
    rec = make_building(1, "commercial", n_langs=2)
    calls = []

    def post_fn(url, payload, headers, timeout):
        calls.append(1)
        return 200, ok_body(["only one tweet"])

    sleeps = []
    with pytest.raises(GenerationError, match="expected 2 tweets"):
        generate(build_bundle(rec), rec, http_cfg(), post_fn=post_fn, sleeper=sleeps.append)
    assert len(calls) == 3  # initial + 2 retries
    assert sleeps == [0.5, 1.0]  # exponential backoff


def test_http_parse_failure_retries_with_same_prompt():
    rec = make_building(1, "commercial", n_langs=1)
    payloads = []
    responses = iter(
        [
            json.dumps({"choices": [{"message": {"content": "not a json array"}}]}),
            ok_body(["recovered tweet"]),
        ]
    )

    def post_fn(url, payload, headers, timeout):
        payloads.append(json.dumps(payload, sort_keys=True))
        return 200, next(responses)

    result = generate(
        build_bundle(rec), rec, http_cfg(), post_fn=post_fn, sleeper=lambda s: None
    )
    assert [t for t, _ in result.tweets] == ["recovered tweet"]
    assert result.attempts == 2
    assert payloads[0] == payloads[1]


def test_http_transport_and_5xx_retry():
    rec = make_building(1, "commercial", n_langs=1)
    outcomes = iter([ConnectionError("boom"), (503, "busy"), (200, ok_body(["fine"]))])

    def post_fn(url, payload, headers, timeout):
        item = next(outcomes)
        if isinstance(item, Exception):
            raise item
        return item

    result = generate(build_bundle(rec), rec, http_cfg(), post_fn=post_fn, sleeper=lambda s: None)
    assert result.attempts == 3


def test_http_auth_failure_aborts_run():
    rec = make_building(1, "commercial", n_langs=1)

    def post_fn(url, payload, headers, timeout):
        return 401, "bad key"

    with pytest.raises(ConfigError, match="401"):
        generate(build_bundle(rec), rec, http_cfg(), post_fn=post_fn, sleeper=lambda s: None)


def test_http_fenced_content_is_tolerated():
    rec = make_building(1, "commercial", n_langs=1)
    content = "```json\n[\"fenced tweet\"]\n```"

    def post_fn(url, payload, headers, timeout):
        return 200, json.dumps({"choices": [{"message": {"content": content}}]})

    result = generate(build_bundle(rec), rec, http_cfg(), post_fn=post_fn)
    assert result.tweets[0][0] == "fenced tweet"


def test_budget_exceeded_aborts():
    buildings = make_balanced_buildings(4, n_langs=1)

    def post_fn(url, payload, headers, timeout):
        return 200, ok_body(["t"])

    cfg = http_cfg(request_budget=2, max_concurrency=1)
    with pytest.raises(BudgetExceededError):
        generate_corpus(buildings, cfg, post_fn=post_fn, sleeper=lambda s: None)


def test_no_partial_buildings_on_failure():
    buildings = make_balanced_buildings(3, n_langs=2)
    bad_id = buildings[1].building_id

    def post_fn(url, payload, headers, timeout):
        user = json.loads(payload["messages"][1]["content"])
        if user["Building_name"] == buildings[1].name:
            return 200, ok_body(["only one"])  # wrong length forever
        return 200, ok_body(["tweet a", "tweet b"])

    corpus, failures = generate_corpus(
        buildings, http_cfg(max_concurrency=1), post_fn=post_fn, sleeper=lambda s: None
    )
    assert [f.building_id for f in failures] == [bad_id]
    assert bad_id not in corpus.building_ids
    assert len(corpus.buildings) == 2
    assert len(corpus.tweets) == 4
    assert all(t.source == "synthetic" for t in corpus.tweets)


def test_concurrent_http_keeps_input_order():
    buildings = make_balanced_buildings(6, n_langs=1)

    def post_fn(url, payload, headers, timeout):
        user = json.loads(payload["messages"][1]["content"])
        return 200, ok_body([f"about {user['Building_name']}"])

    corpus, failures = generate_corpus(
        buildings, http_cfg(max_concurrency=4), post_fn=post_fn, sleeper=lambda s: None
    )
    assert failures == []
    assert [t.text for t in corpus.tweets] == [f"about {b.name}" for b in buildings]


def test_audit_transcripts_written(tmp_path):
    rec = make_building(1, "commercial", n_langs=1)

    def post_fn(url, payload, headers, timeout):
        return 200, ok_body(["audited tweet"])

    cfg = http_cfg(audit_dir=str(tmp_path / "audit"))
    generate(build_bundle(rec), rec, cfg, post_fn=post_fn, api_key="sk-secret")
    transcript = json.loads((tmp_path / "audit" / f"{rec.building_id}.json").read_text())
    assert transcript["building_id"] == rec.building_id
    assert "sk-secret" not in json.dumps(transcript)


def test_failure_entry_serialization():
    entry = FailureEntry(building_id="b1", error="HTTP 500", attempts=3)
    assert entry.to_json_dict() == {"building_id": "b1", "error": "HTTP 500", "attempts": 3}
