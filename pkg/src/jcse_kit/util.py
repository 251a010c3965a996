"""Small shared helpers: seed derivation and JSON-lines IO."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import ParseError

MAX_SEED = 2**63


def derive_seed(*parts: Any) -> int:
    """Derive a child seed from a tuple of hashable parts.

    Stable across runs and platforms (unlike ``hash``), so fan-out seeds for
    per-sentence or per-batch randomness are reproducible everywhere.
    """
    payload = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big") % MAX_SEED


def dump_json(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False)


def read_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (1-based line number, parsed object) for each non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            if not isinstance(obj, dict):
                raise ParseError("record is not a JSON object", line=lineno)
            yield lineno, obj


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    """Write records as one JSON object per line. Returns the record count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dump_json(rec))
            fh.write("\n")
            count += 1
    return count
