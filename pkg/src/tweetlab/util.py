"""Small shared helpers."""

from __future__ import annotations

import hashlib
import math
from pathlib import Path


def round_half_up(x: float) -> int:
    """Deterministic rounding (0.5 always goes up), unlike banker's round()."""
    return int(math.floor(x + 0.5))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
