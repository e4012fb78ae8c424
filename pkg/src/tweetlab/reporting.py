"""Rendering of metric files into aligned text tables, delimited CSVs, and
matplotlib figures.

The tables mirror the usual presentation: a diversity table (datasets by
Self-BLEU / log10 perplexity, both lower-is-better) and a classification
table (configurations by models with per-class precision/recall/F1 and
overall accuracy as mean +/- std). Figures are written as PNG files next
to the delimited output.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import jsonschema

from .diversity import DIVERSITY_SCHEMA, DiversityReport
from .errors import DataFormatError
from .experiments import METRICS_JSON_SCHEMA, ClassMetrics


def validate_metrics_dict(obj: dict, source="metrics") -> None:
    try:
        jsonschema.validate(obj, METRICS_JSON_SCHEMA)
    except jsonschema.ValidationError as e:
        raise DataFormatError(f"{source}: invalid metrics object: {e.message}")


def load_metrics_file(path) -> ClassMetrics:
    path = Path(path)
    obj = json.loads(path.read_text(encoding="utf-8"))
    validate_metrics_dict(obj, source=str(path))
    return ClassMetrics.from_json_dict(obj)


def load_diversity_file(path) -> DiversityReport:
    path = Path(path)
    obj = json.loads(path.read_text(encoding="utf-8"))
    if obj.get("schema") != DIVERSITY_SCHEMA:
        raise DataFormatError(f"not a {DIVERSITY_SCHEMA} file", path)
    return DiversityReport.from_json_dict(obj)


def _align(rows, sep="   ") -> str:
    """Left-align a list of string rows into fixed-width columns."""
    if not rows:
        return ""
    widths = [0] * max(len(r) for r in rows)
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [sep.join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def render_diversity_table(reports) -> str:
    rows = [["Dataset", "Self-BLEU (%) ↓", "Perplexity (log10) ↓", "Size"]]
    for rep in reports:
        rows.append(
            [
                rep.dataset,
                f"{rep.self_bleu_percent:.2f}",
                f"{rep.log10_perplexity:.2f}",
                str(rep.corpus_size),
            ]
        )
    return _align(rows)


def diversity_csv(reports) -> str:
    lines = ["dataset,self_bleu_percent,log10_perplexity,corpus_size,tokenizer_id"]
    for rep in reports:
        lines.append(
            f"{rep.dataset},{rep.self_bleu_percent},{rep.log10_perplexity},"
            f"{rep.corpus_size},{rep.tokenizer_id}"
        )
    return "\n".join(lines) + "\n"


def _pm(stat: dict) -> str:
    return f"{stat['mean']:.2f} ± {stat['std']:.2f}"


def render_metrics_table(metrics_list) -> str:
    classes: list = sorted({c for m in metrics_list for c in m.classes})
    header1 = ["Configuration", "Model"]
    header2 = ["", ""]
    for cls in classes:
        header1 += [cls.capitalize(), "", ""]
        header2 += ["Precision", "Recall", "F1"]
    header1.append("Overall Accuracy")
    header2.append("")
    rows = [header1, header2]
    for m in metrics_list:
        agg = m.aggregate()
        row = [m.configuration, m.model]
        for cls in classes:
            stats = agg["per_class"].get(cls)
            if stats is None:
                row += ["-", "-", "-"]
            else:
                row += [_pm(stats["precision"]), _pm(stats["recall"]), _pm(stats["f1"])]
        row.append(_pm(agg["accuracy"]))
        rows.append(row)
    return _align(rows)


def metrics_csv(metrics_list) -> str:
    lines = [
        "configuration,model,class,precision_mean,precision_std,recall_mean,recall_std,"
        "f1_mean,f1_std,accuracy_mean,accuracy_std,runs"
    ]
    for m in metrics_list:
        agg = m.aggregate()
        acc = agg["accuracy"]
        for cls in m.classes:
            s = agg["per_class"][cls]
            lines.append(
                f"{m.configuration},{m.model},{cls},"
                f"{s['precision']['mean']},{s['precision']['std']},"
                f"{s['recall']['mean']},{s['recall']['std']},"
                f"{s['f1']['mean']},{s['f1']['std']},"
                f"{acc['mean']},{acc['std']},{m.runs}"
            )
    return "\n".join(lines) + "\n"


def render_sweep_table(rows) -> str:
    table = [["Kind", "Rate", "Mean accuracy", "Std", "Seeds"]]
    for r in rows:
        table.append(
            [r.kind, f"{r.rate:g}", f"{r.mean_accuracy:.4f}", f"{r.std:.4f}", str(len(r.seeds))]
        )
    return _align(table)


def fig_diversity(reports, path) -> None:
    datasets = [r.dataset for r in reports]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    axes[0].bar(datasets, [r.self_bleu_percent for r in reports], color="#4878a8")
    axes[0].set_ylabel("Self-BLEU (%)")
    axes[0].set_title("Structural repetition (lower = more diverse)")
    axes[1].bar(datasets, [r.log10_perplexity for r in reports], color="#b8604d")
    axes[1].set_ylabel("Perplexity (log10)")
    axes[1].set_title("Vocabulary alignment")
    for ax in axes:
        ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_metrics(metrics_list, path) -> None:
    labels = [f"{m.configuration}\n{m.model}" for m in metrics_list]
    aggs = [m.aggregate()["accuracy"] for m in metrics_list]
    fig, ax = plt.subplots(figsize=(1.6 * max(4, len(labels)), 4))
    ax.bar(
        labels,
        [a["mean"] for a in aggs],
        yerr=[a["std"] for a in aggs],
        capsize=4,
        color="#5a8f5a",
    )
    ax.set_ylim(0, 1)
    ax.set_ylabel("Overall accuracy")
    ax.set_title("Classifier accuracy by configuration")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_sweep(rows, path) -> None:
    by_kind: dict = {}
    for r in rows:
        by_kind.setdefault(r.kind, []).append(r)
    fig, ax = plt.subplots(figsize=(6, 4))
    for kind, kind_rows in sorted(by_kind.items()):
        kind_rows = sorted(kind_rows, key=lambda r: r.rate)
        ax.errorbar(
            [r.rate for r in kind_rows],
            [r.mean_accuracy for r in kind_rows],
            yerr=[r.std for r in kind_rows],
            marker="o",
            capsize=3,
            label=kind,
        )
    ax.set_xlabel("Noise rate")
    ax.set_ylabel("Mean accuracy")
    ax.set_title("Accuracy degradation under injected noise")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
