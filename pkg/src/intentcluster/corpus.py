"""Corpus ingestion, tokenization, and on-disk formats for documents and embeddings.

A corpus is a line-delimited JSON file: one object per line with fields
``id`` (string), ``text`` (string) and optional ``label`` (string).
Embedding matrices use a small binary format (see :func:`save_embeddings`).
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_TOKEN_RE = re.compile(r"[^\W_]+")  # maximal alphanumeric runs, unicode-aware

_EMB_MAGIC = b"EMB1"


class CorpusFormatError(ValueError):
    """Raised for malformed corpus lines or duplicate document ids."""


class EmbeddingFormatError(ValueError):
    """Raised for embedding files with a bad magic or truncated payload."""


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs of ``text``, in order. Punctuation is dropped.

    >>> tokenize("World Cup final!")
    ['world', 'cup', 'final']
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass
class Document:
    """One text unit. ``tokens`` is always ``tokenize(text)``, never stored stale."""

    id: str
    text: str
    tokens: list[str] = field(default_factory=list)
    label: str | None = None

    @classmethod
    def make(cls, id: str, text: str, label: str | None = None) -> "Document":
        return cls(id=id, text=text, tokens=tokenize(text), label=label)


def load_corpus(path: str | Path) -> list[Document]:
    """Read a line-delimited JSON corpus file.

    Raises :class:`CorpusFormatError` naming the offending line number for
    malformed records and naming the id for duplicates.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            docs.append(_parse_line(line, lineno, seen))
    return docs


def parse_corpus_text(data: str) -> list[Document]:
    """Parse corpus content already in memory (e.g. an HTTP upload body)."""
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        docs.append(_parse_line(line, lineno, seen))
    return docs


def _parse_line(line: str, lineno: int, seen: set[str]) -> Document:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(record, dict):
        raise CorpusFormatError(f"line {lineno}: expected a JSON object")
    for key in ("id", "text"):
        if key not in record:
            raise CorpusFormatError(f"line {lineno}: missing required field '{key}'")
        if not isinstance(record[key], str):
            raise CorpusFormatError(f"line {lineno}: field '{key}' must be a string")
    label = record.get("label")
    if label is not None and not isinstance(label, str):
        raise CorpusFormatError(f"line {lineno}: field 'label' must be a string")
    doc_id = record["id"]
    if doc_id in seen:
        raise CorpusFormatError(f"duplicate document id '{doc_id}' at line {lineno}")
    seen.add(doc_id)
    return Document.make(doc_id, record["text"], label)


def save_corpus(docs: list[Document], path: str | Path) -> None:
    """Write documents in order as line-delimited JSON (LF endings, UTF-8)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            record: dict = {"id": doc.id, "text": doc.text}
            if doc.label is not None:
                record["label"] = doc.label
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def save_embeddings(matrix: np.ndarray, path: str | Path) -> None:
    """Write an N x D float32 matrix: magic ``EMB1``, u32 N, u32 D, row-major floats.

    All integers and floats are little-endian. Round-trips bit-exactly.
    """
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {matrix.shape}")
    if m.size and not np.isfinite(m).all():
        raise ValueError("embedding matrix contains NaN or Inf")
    n, d = m.shape
    with open(path, "wb") as fh:
        fh.write(_EMB_MAGIC)
        fh.write(struct.pack("<II", n, d))
        fh.write(m.tobytes())


def load_embeddings(path: str | Path) -> np.ndarray:
    """Read a matrix written by :func:`save_embeddings`."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != _EMB_MAGIC:
        raise EmbeddingFormatError(f"{path}: not an embedding file (bad magic)")
    n, d = struct.unpack("<II", raw[4:12])
    expected = 12 + n * d * 4
    if len(raw) != expected:
        raise EmbeddingFormatError(
            f"{path}: truncated or oversized payload ({len(raw)} bytes, expected {expected})"
        )
    values = np.frombuffer(raw[12:], dtype="<f4").reshape(n, d)
    return values.copy()
