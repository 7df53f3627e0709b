"""On-disk verdict cache: one write-once JSON file per (graph, k, mode, method, version)."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from . import __version__

__all__ = ["ResultCache", "cache_key"]


def cache_key(fingerprint: str, k: int, mode: str, method: str, version: str = __version__) -> dict:
    return {"fingerprint": fingerprint, "k": k, "mode": mode, "method": method, "version": version}


class ResultCache:
    """Directory of verdicts.  Writers publish through an atomic rename, so a
    reader sees either nothing or a complete file."""

    def __init__(self, root: str | Path, version: str = __version__):
        self.root = Path(root)
        self.version = version

    def _path(self, key: dict) -> Path:
        digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
        return self.root / digest[:2] / f"{digest}.json"

    def get(self, fingerprint: str, k: int, mode: str, method: str) -> dict | None:
        key = cache_key(fingerprint, k, mode, method, self.version)
        try:
            entry = json.loads(self._path(key).read_text())
        except (OSError, json.JSONDecodeError):
            return None
        # a digest collision or a hand-edited file must not produce a hit
        if entry.get("key") != key:
            return None
        return entry["value"]

    def put(self, fingerprint: str, k: int, mode: str, method: str, value: dict) -> None:
        key = cache_key(fingerprint, k, mode, method, self.version)
        path = self._path(key)
        if path.exists():
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump({"key": key, "value": value}, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
