"""The public channel stand-in: an append-only announcement log plus a
meta-address directory, file-backed (JSON lines) with an in-memory mode.

One process writes, many may read; appends go through a single handle and
are flushed per record, so readers always see a consistent prefix.  Log
entries are immutable once appended and indices are stable.  Files use
canonical JSON (sorted keys, compact separators) so byte comparison works.
"""

from __future__ import annotations

import json
import os
import re
from typing import IO

from .errors import DuplicateLabel, RangeOutOfBounds, SchemaViolation

META_FILENAME = "registry.meta.jsonl"
LOG_FILENAME = "registry.log.jsonl"

_ADDRESS_RE = re.compile(r"^0x[0-9a-f]{40}$")
_KNOWN_SCHEMES = {"dksap", "dksap-plain", "he-paillier", "fhe-bfv"}


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _validate_announcement(doc: dict) -> None:
    if not isinstance(doc, dict):
        raise SchemaViolation("announcement must be a JSON object")
    scheme = doc.get("scheme")
    if scheme not in _KNOWN_SCHEMES:
        raise SchemaViolation(f"unknown scheme {scheme!r}")
    if scheme == "dksap":
        ephemeral = doc.get("R_a")
        if not isinstance(ephemeral, str) or len(ephemeral) != 66:
            raise SchemaViolation("dksap announcement needs a 33-byte ephemeral point")
        if "sa" not in doc:
            raise SchemaViolation("dksap announcement needs a stealth address")
    else:
        if not isinstance(doc.get("c"), str) or not doc["c"]:
            raise SchemaViolation("homomorphic announcement needs a ciphertext")
        if doc.get("v") != 1:
            raise SchemaViolation("homomorphic announcement needs version 1")
    if "sa" in doc and not _ADDRESS_RE.fullmatch(doc["sa"]):
        raise SchemaViolation("stealth address must be 0x + 40 lowercase hex chars")


class Registry:
    """Append-only log + labelled meta directory.

    ``Registry()`` is purely in-memory; ``Registry.open(directory)`` persists
    to ``registry.meta.jsonl`` and ``registry.log.jsonl`` inside *directory*,
    reloading any existing contents first.
    """

    def __init__(self) -> None:
        self._meta: dict[str, dict] = {}
        self._log: list[dict] = []
        self._meta_handle: IO[str] | None = None
        self._log_handle: IO[str] | None = None

    @classmethod
    def open(cls, directory: str | os.PathLike) -> "Registry":
        reg = cls()
        os.makedirs(directory, exist_ok=True)
        meta_path = os.path.join(directory, META_FILENAME)
        log_path = os.path.join(directory, LOG_FILENAME)
        if os.path.exists(meta_path):
            for lineno, line in _numbered_lines(meta_path):
                entry = _parse_line(meta_path, lineno, line)
                label = entry.get("label")
                if not isinstance(label, str) or "bundle" not in entry:
                    raise SchemaViolation(f"{meta_path}:{lineno}: not a meta entry")
                reg._meta[label] = entry["bundle"]
        if os.path.exists(log_path):
            for lineno, line in _numbered_lines(log_path):
                doc = _parse_line(log_path, lineno, line)
                try:
                    _validate_announcement(doc)
                except SchemaViolation as exc:
                    raise SchemaViolation(f"{log_path}:{lineno}: {exc}") from None
                reg._log.append(doc)
        reg._meta_handle = open(meta_path, "a", encoding="utf-8")
        reg._log_handle = open(log_path, "a", encoding="utf-8")
        return reg

    def close(self) -> None:
        for handle in (self._meta_handle, self._log_handle):
            if handle is not None:
                handle.close()
        self._meta_handle = self._log_handle = None

    def __enter__(self) -> "Registry":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- meta directory ------------------------------------------------------

    def publish_meta(self, label: str, bundle_doc: dict) -> None:
        if label in self._meta:
            raise DuplicateLabel(f"label {label!r} is already published")
        self._meta[label] = bundle_doc
        if self._meta_handle is not None:
            self._meta_handle.write(canonical_json({"label": label, "bundle": bundle_doc}) + "\n")
            self._meta_handle.flush()

    def get_meta(self, label: str) -> dict:
        if label not in self._meta:
            raise KeyError(f"no bundle published under {label!r}")
        return self._meta[label]

    def labels(self) -> list[str]:
        return sorted(self._meta)

    # -- announcement log ----------------------------------------------------

    def append(self, doc: dict) -> int:
        _validate_announcement(doc)
        self._log.append(doc)
        index = len(self._log) - 1
        if self._log_handle is not None:
            self._log_handle.write(canonical_json(doc) + "\n")
            self._log_handle.flush()
        return index

    def read_range(self, start: int, stop: int) -> list[dict]:
        if not 0 <= start <= stop <= len(self._log):
            raise RangeOutOfBounds(
                f"[{start}, {stop}) is outside [0, {len(self._log)}]"
            )
        return list(self._log[start:stop])

    def read_all(self) -> list[dict]:
        return list(self._log)

    def __len__(self) -> int:
        return len(self._log)


def _numbered_lines(path: str):
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if line.strip():
                yield lineno, line


def _parse_line(path: str, lineno: int, line: str) -> dict:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}:{lineno}: corrupt JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}:{lineno}: expected a JSON object")
    return doc
