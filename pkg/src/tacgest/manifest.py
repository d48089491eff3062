"""Run manifests: every command records its config, seeds, and artifact hashes."""

from __future__ import annotations

import hashlib
import json
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    """Short stable hash identifying a command invocation."""
    return hashlib.sha256(canonical_json(config).encode("ascii")).hexdigest()[:8]


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def run_directory(base, command: str, config: dict) -> Path:
    """Deterministic per-invocation directory: <base>/<command>-<hash8>."""
    path = Path(base) / f"{command}-{config_hash(config)}"
    path.mkdir(parents=True, exist_ok=True)
    return path


class RunManifest:
    """Collects one command's inputs, outputs, and timing, then writes JSON."""

    def __init__(self, command: str, config: dict, seeds: Optional[dict] = None):
        self.command = command
        self.config = dict(config)
        self.seeds = dict(seeds or {})
        self.inputs = {}
        self.outputs = {}
        self.results = {}
        self._start = time.perf_counter()
        self._started_at = datetime.now(timezone.utc).isoformat()

    def add_input(self, name: str, path) -> None:
        self.inputs[name] = {"path": str(path), "sha256": file_sha256(path)}

    def add_output(self, name: str, path) -> None:
        self.outputs[name] = {"path": str(path), "sha256": file_sha256(path)}

    def add_result(self, name: str, value) -> None:
        self.results[name] = value

    def write(self, path) -> dict:
        payload = {
            "command": self.command,
            "config": self.config,
            "config_hash": config_hash(self.config),
            "seeds": self.seeds,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "results": self.results,
            "started_at": self._started_at,
            "wall_clock_seconds": round(time.perf_counter() - self._start, 3),
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return payload
