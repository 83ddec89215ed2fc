"""Small on-disk cache for expensive per-``n`` data.

Entries are JSON documents carrying a format tag and a sha256 checksum of
the payload.  Writers take an advisory file lock so that concurrent
processes never observe a half-written entry.  Set ``M0N_CACHE_DIR`` to
relocate the cache, or to an empty string to disable it.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from filelock import FileLock

FORMAT_TAG = "m0n-cache/1"
ENV_VAR = "M0N_CACHE_DIR"


def cache_dir() -> Optional[Path]:
    value = os.environ.get(ENV_VAR)
    if value is None:
        value = str(Path.home() / ".cache" / "m0n")
    if not value:
        return None
    return Path(value)


def _digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def load(key: str):
    """Return the cached payload for ``key`` or None if absent or corrupt."""
    root = cache_dir()
    if root is None:
        return None
    path = root / f"{key}.json"
    if not path.exists():
        return None
    try:
        with FileLock(str(path) + ".lock"):
            doc = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if doc.get("format") != FORMAT_TAG or doc.get("sha256") != _digest(doc.get("payload")):
        return None
    return doc["payload"]


def store(key: str, payload) -> None:
    root = cache_dir()
    if root is None:
        return
    try:
        root.mkdir(parents=True, exist_ok=True)
        path = root / f"{key}.json"
        doc = {"format": FORMAT_TAG, "key": key, "sha256": _digest(payload), "payload": payload}
        with FileLock(str(path) + ".lock"):
            fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, sort_keys=True)
            os.replace(tmp, path)
    except OSError:
        # a read-only or missing cache only costs recomputation
        pass
