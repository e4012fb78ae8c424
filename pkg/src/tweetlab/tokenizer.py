"""The one tokenizer shared by every text metric in the toolkit.

Self-BLEU, the unigram perplexity model, and the Naive Bayes classifier all
tokenize through here, so their scores are comparable. Rules: NFC-normalize,
lowercase, collapse URLs to a single ``<url>`` token, keep ``#``/``@``
fused with the following word (hashtags and mentions are single tokens),
split all other punctuation into separate tokens.
"""

from __future__ import annotations

import re
import unicodedata

# Version string recorded in reports; bump when tokenization rules change.
TOKENIZER_ID = "tweettok-v1"

_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_TOKEN = re.compile(r"<url>|[#@]\w+|\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    text = unicodedata.normalize("NFC", text).lower()
    text = _URL.sub(" <url> ", text)
    return _TOKEN.findall(text)
