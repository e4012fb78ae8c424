"""Run provenance: every CLI run drops one manifest next to its outputs so
the run can be replayed (same inputs + same config + same seeds = same
outputs on the deterministic paths)."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .util import sha256_file


def write_manifest(target, subcommand: str, config: dict, input_paths, seeds=None) -> Path:
    """Write the manifest next to ``target`` (inside it when it is a
    directory) and return the manifest path."""
    target = Path(target)
    if target.is_dir():
        path = target / "manifest.json"
    else:
        path = target.parent / (target.name + ".manifest.json")
    manifest = {
        "subcommand": subcommand,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "inputs": {
            str(p): sha256_file(p) for p in input_paths if p is not None and Path(p).is_file()
        },
        "seeds": list(seeds) if seeds is not None else [],
    }
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")
    return path
