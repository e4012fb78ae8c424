"""Sentence BLEU and corpus Self-BLEU (diversity, lower = more diverse).

sentence_bleu follows the classic recipe: modified n-gram precision with
counts clipped at the maximum count over all references, a brevity penalty
against the closest reference length, and a geometric mean over n-gram
orders 1..4. Two small conventions make short tweets score meaningfully:

* orders longer than the candidate are skipped, not zeroed;
* a zero precision is floored at EPSILON / denominator instead of
  collapsing the whole geometric mean to zero.

self_bleu scores every sentence against all the others. Doing that
literally is O(n^2) pairwise clipping; at tens of thousands of tweets that
is hours of Python. Because each clip only ever needs the *maximum* count
of an n-gram over the other sentences, we precompute, per n-gram, the two
largest per-sentence counts and which sentence holds the largest. The max
over "everyone but me" is then the top count (or the runner-up when I am
the top holder), which reproduces the full pairwise computation exactly in
O(total n-grams). Equivalence is pinned by brute-force oracle tests.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import Counter

from .tokenizer import tokenize

MAX_ORDER = 4
EPSILON = 0.1

# Identifier for the smoothing convention, recorded alongside the tokenizer
# version so scores from different runs are comparable.
BLEU_SMOOTHING_ID = f"eps{EPSILON}"


def ngram_counts(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _geometric_mean_score(precisions) -> float:
    return math.exp(math.fsum(math.log(p) for p in precisions) / len(precisions))


def _brevity_penalty(candidate_len: int, ref_len: int) -> float:
    return min(1.0, math.exp(1.0 - ref_len / candidate_len))


def _closest_ref_len(candidate_len: int, ref_lens) -> int:
    # Ties in distance go to the shorter reference.
    return min(ref_lens, key=lambda r: (abs(r - candidate_len), r))


def sentence_bleu(candidate, references, max_n: int = MAX_ORDER) -> float:
    """BLEU of one token sequence against a collection of token sequences.

    Returns a value in [0, 1]; an empty candidate scores 0 by convention.
    """
    candidate = list(candidate)
    references = [list(r) for r in references]
    if not references:
        raise ValueError("sentence_bleu requires at least one reference")
    c = len(candidate)
    if c == 0:
        return 0.0
    precisions = []
    for n in range(1, min(max_n, c) + 1):
        counts = ngram_counts(candidate, n)
        max_ref: dict = {}
        for ref in references:
            ref_counts = ngram_counts(ref, n)
            for gram in counts:
                hit = ref_counts.get(gram, 0)
                if hit > max_ref.get(gram, 0):
                    max_ref[gram] = hit
        numerator = sum(min(cnt, max_ref.get(gram, 0)) for gram, cnt in counts.items())
        denominator = c - n + 1
        precisions.append((numerator if numerator > 0 else EPSILON) / denominator)
    bp = _brevity_penalty(c, _closest_ref_len(c, [len(r) for r in references]))
    return bp * _geometric_mean_score(precisions)


class _MaxOverOthers:
    """Per-n-gram (top count, holder, runner-up) table for one order."""

    __slots__ = ("table",)

    def __init__(self, token_lists, n: int):
        table: dict = {}
        for sid, tokens in enumerate(token_lists):
            for gram, cnt in ngram_counts(tokens, n).items():
                entry = table.get(gram)
                if entry is None:
                    table[gram] = [cnt, sid, 0]
                elif cnt > entry[0]:
                    entry[2] = entry[0]
                    entry[0] = cnt
                    entry[1] = sid
                elif cnt > entry[2]:
                    entry[2] = cnt
        self.table = table

    def clip(self, sid: int, gram) -> int:
        entry = self.table.get(gram)
        if entry is None:
            return 0
        return entry[0] if entry[1] != sid else entry[2]


def _closest_other_len(lengths_sorted, own_len: int, own_count: int) -> int:
    """Reference length closest to own_len among the other sentences, given
    the sorted multiset of all sentence lengths."""
    if own_count > 1:
        return own_len  # another sentence shares our exact length
    i = bisect_left(lengths_sorted, own_len)  # position of our own instance
    below = lengths_sorted[i - 1] if i > 0 else None
    above = lengths_sorted[i + 1] if i + 1 < len(lengths_sorted) else None
    options = [x for x in (below, above) if x is not None]
    return min(options, key=lambda r: (abs(r - own_len), r))


def self_bleu(corpus_texts, max_n: int = MAX_ORDER) -> float:
    """Mean sentence BLEU of each text against all the others, as a
    percentage in [0, 100]. Requires at least two texts."""
    texts = list(corpus_texts)
    if len(texts) < 2:
        raise ValueError("self_bleu requires at least 2 texts")
    token_lists = [tokenize(t) for t in texts]
    lengths = [len(toks) for toks in token_lists]
    lengths_sorted = sorted(lengths)
    length_count = Counter(lengths)
    tables = {n: _MaxOverOthers(token_lists, n) for n in range(1, max_n + 1)}

    scores = []
    for sid, tokens in enumerate(token_lists):
        c = len(tokens)
        if c == 0:
            scores.append(0.0)
            continue
        precisions = []
        for n in range(1, min(max_n, c) + 1):
            table = tables[n]
            numerator = 0
            for gram, cnt in ngram_counts(tokens, n).items():
                clip = table.clip(sid, gram)
                numerator += cnt if cnt <= clip else clip
            denominator = c - n + 1
            precisions.append((numerator if numerator > 0 else EPSILON) / denominator)
        r = _closest_other_len(lengths_sorted, c, length_count[c])
        scores.append(_brevity_penalty(c, r) * _geometric_mean_score(precisions))
    return 100.0 * math.fsum(scores) / len(scores)
