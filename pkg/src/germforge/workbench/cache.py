"""Content-addressed, append-only result cache.

Each record lives in its own JSON-lines file named after the input hash and
is written with an atomic rename. A record whose checksum does not match is
moved to ``quarantine/`` and treated as a miss.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

ENGINE_VERSION = "germforge-0.1.0"


def default_cache_dir() -> Path:
    env = os.environ.get("GERMFORGE_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "germforge"


def cache_key(op: str, text: str, ordering: str = "auto", seed: int | None = None,
              version: str = ENGINE_VERSION) -> str:
    payload = json.dumps([op, text, ordering, version, seed], separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def _checksum(data: dict) -> str:
    body = {k: v for k, v in data.items() if k != "checksum"}
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class ResultRecord:
    task_id: str
    input_hash: str
    operation: str
    parameters: dict = field(default_factory=dict)
    outcome: object = None
    wall_time: float = 0.0
    peak_memory_kb: int = 0
    engine_version: str = ENGINE_VERSION

    def to_json(self) -> str:
        data = asdict(self)
        data["checksum"] = _checksum(data)
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> ResultRecord:
        data = json.loads(line)
        if data.pop("checksum", None) != _checksum(data):
            raise ValueError("checksum mismatch")
        return cls(**data)


class ResultCache:
    def __init__(self, root: Path | str | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.results = self.root / "results"
        self.quarantine = self.root / "quarantine"

    def _path(self, key: str) -> Path:
        return self.results / f"{key}.jsonl"

    def lookup(self, key: str) -> ResultRecord | None:
        path = self._path(key)
        try:
            line = path.read_text().strip().splitlines()[0]
            rec = ResultRecord.from_json(line)
        except FileNotFoundError:
            return None
        except (ValueError, TypeError, IndexError, KeyError):
            self.quarantine.mkdir(parents=True, exist_ok=True)
            os.replace(path, self.quarantine / path.name)
            return None
        return rec if rec.input_hash == key else None

    def store(self, record: ResultRecord) -> Path:
        """Write a record once; an existing valid record is left untouched."""
        self.results.mkdir(parents=True, exist_ok=True)
        path = self._path(record.input_hash)
        if self.lookup(record.input_hash) is not None:
            return path
        fd, tmp = tempfile.mkstemp(dir=self.results, prefix=".tmp-", suffix=".jsonl")
        with os.fdopen(fd, "w") as fh:
            fh.write(record.to_json() + "\n")
        os.replace(tmp, path)
        return path
