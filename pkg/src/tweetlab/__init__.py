"""Toolkit for building synthetic tweet corpora for building-function
classification and measuring how good (and how corruptible) they are.

The pipeline: clean building metadata, build generation prompts, call an
LLM endpoint (or a deterministic mock), then score the resulting corpus
with diversity metrics and a Naive Bayes correctness lab, optionally
injecting controlled label/feature noise.
"""

__version__ = "0.1.0"
