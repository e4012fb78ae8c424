"""Fine-tuning loop.

Default hyperparameters are the production recipe for the multilingual
cased BERT base model: 5 epochs of AdamW at 5e-6 with batch size 16,
warm-up ratio 0.01, and weight decay 0.01. Everything is overridable for
smoke runs on small stand-in models.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from transformers import (
    AutoModelForSequenceClassification,
    AutoTokenizer,
    get_linear_schedule_with_warmup,
)

from .data import LABEL2ID, LABELS

DEFAULT_MODEL = "bert-base-multilingual-cased"


@dataclass(frozen=True)
class FinetuneConfig:
    model_name: str = DEFAULT_MODEL
    epochs: int = 5
    learning_rate: float = 5e-6
    batch_size: int = 16
    warmup_ratio: float = 0.01
    weight_decay: float = 0.01
    seed: int = 0
    max_seq_len: int = 128
    device: str = "cpu"


def _encode(tokenizer, texts, max_seq_len):
    return tokenizer(
        list(texts),
        padding=True,
        truncation=True,
        max_length=max_seq_len,
        return_tensors="pt",
    )


def _batches(n, batch_size, generator):
    order = torch.randperm(n, generator=generator)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


@torch.no_grad()
def predict(model, tokenizer, texts, max_seq_len=128, batch_size=64, device="cpu"):
    model.eval()
    predictions = []
    for start in range(0, len(texts), batch_size):
        enc = _encode(tokenizer, texts[start : start + batch_size], max_seq_len)
        logits = model(
            input_ids=enc["input_ids"].to(device),
            attention_mask=enc["attention_mask"].to(device),
        ).logits
        predictions.extend(LABELS[i] for i in logits.argmax(dim=-1).tolist())
    return predictions


def finetune(train_rows, val_rows, cfg: FinetuneConfig, out_dir) -> Path:
    """Fine-tune on (text, label, building_id) rows and save a checkpoint
    plus a training log. Fully seeded: a rerun with the same inputs and
    config reproduces the logged losses."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    torch.manual_seed(cfg.seed)
    random.seed(cfg.seed)
    tokenizer = AutoTokenizer.from_pretrained(cfg.model_name)
    model = AutoModelForSequenceClassification.from_pretrained(
        cfg.model_name, num_labels=len(LABELS)
    )
    model.to(cfg.device)

    texts = [t for t, _, _ in train_rows]
    labels = torch.tensor([LABEL2ID[lab] for _, lab, _ in train_rows])
    missing = [lab for lab in LABELS if LABEL2ID[lab] not in set(labels.tolist())]
    if missing:
        raise ValueError("no training examples for class: " + ", ".join(missing))
    enc = _encode(tokenizer, texts, cfg.max_seq_len)

    steps_per_epoch = (len(texts) + cfg.batch_size - 1) // cfg.batch_size
    total_steps = steps_per_epoch * cfg.epochs
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
    )
    scheduler = get_linear_schedule_with_warmup(
        optimizer, int(cfg.warmup_ratio * total_steps), total_steps
    )

    generator = torch.Generator().manual_seed(cfg.seed)
    log: dict = {"config": asdict(cfg), "epochs": []}
    for epoch in range(cfg.epochs):
        model.train()
        losses = []
        for batch in _batches(len(texts), cfg.batch_size, generator):
            out = model(
                input_ids=enc["input_ids"][batch].to(cfg.device),
                attention_mask=enc["attention_mask"][batch].to(cfg.device),
                labels=labels[batch].to(cfg.device),
            )
            out.loss.backward()
            optimizer.step()
            scheduler.step()
            optimizer.zero_grad()
            losses.append(out.loss.item())
        entry = {"epoch": epoch + 1, "train_loss": sum(losses) / len(losses)}
        if val_rows:
            val_pred = predict(
                model, tokenizer, [t for t, _, _ in val_rows],
                max_seq_len=cfg.max_seq_len, device=cfg.device,
            )
            entry["val_accuracy"] = sum(
                p == lab for p, (_, lab, _) in zip(val_pred, val_rows)
            ) / len(val_rows)
        log["epochs"].append(entry)

    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    (out_dir / "training_log.json").write_text(
        json.dumps(log, indent=2) + "\n", encoding="utf-8"
    )
    (out_dir / "label_map.json").write_text(
        json.dumps({"labels": list(LABELS)}) + "\n", encoding="utf-8"
    )
    return out_dir
