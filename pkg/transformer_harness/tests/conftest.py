import json
import os

import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

from mockdata import mock_rows, write_corpus, write_split


@pytest.fixture(scope="session")
def corpus_and_split(tmp_path_factory):
    base = tmp_path_factory.mktemp("mockdata")
    buildings, tweets = mock_rows(n_buildings=100, tweets_per=2)
    corpus_dir = base / "corpus"
    write_corpus(corpus_dir, buildings, tweets)
    test_ids = [b["building_id"] for i, b in enumerate(buildings) if i % 5 == 0]
    train_ids = [b["building_id"] for i, b in enumerate(buildings) if i % 5 != 0]
    split_path = base / "split.json"
    write_split(split_path, train_ids, test_ids)
    return corpus_dir, split_path


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory, corpus_and_split):
    """A miniature randomly initialized BERT checkpoint built locally, so
    tests never need the pretrained multilingual weights or the network."""
    import torch
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

    corpus_dir, _ = corpus_and_split
    words = set()
    for line in (corpus_dir / "tweets.jsonl").read_text(encoding="utf-8").splitlines():
        words.update(json.loads(line)["text"].lower().split())
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + sorted(words)

    model_dir = tmp_path_factory.mktemp("tinybert")
    (model_dir / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = BertTokenizer(str(model_dir / "vocab.txt"), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64,
        max_position_embeddings=64, num_labels=2,
    )
    torch.manual_seed(0)
    model = BertForSequenceClassification(config)
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return model_dir
