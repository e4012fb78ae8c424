"""Transformer fine-tuning harness for building-function classification.

A thin consumer of tweetlab artifacts: it reads corpus directories
(buildings.jsonl + tweets.jsonl) and split JSON files, fine-tunes a
sequence classifier, and writes metrics JSON in the same schema the
tweetlab report command renders. Files are the only contract with the
primary toolkit.
"""

__version__ = "0.1.0"
