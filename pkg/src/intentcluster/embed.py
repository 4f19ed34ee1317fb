"""Document representations.

Two stages:

* :func:`base_embed` - a deterministic, training-free representation: every
  token hashes to a fixed pseudo-random sign vector and a document is the
  mean of its token vectors (mean pooling).
* :func:`train_adapter` - once the analyst has labeled a subset, a linear
  projection ``W`` is trained jointly with a softmax classifier head on the
  labeled rows; the head is discarded and ``W`` re-projects every document.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

_ADAPTER_MAGIC = b"ADP1"


@dataclass
class TrainConfig:
    """Hyperparameters for adapter training.

    ``labeled_fraction_threshold`` is the labeled share of the corpus at which
    adapter training is offered to the analyst (default 2.5%).
    """

    projection_dim: int | None = None  # None means square projection (D' = D)
    learning_rate: float = 0.5
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    labeled_fraction_threshold: float = 0.025

    def __post_init__(self) -> None:
        if self.projection_dim is not None and self.projection_dim < 1:
            raise ValueError("projection_dim must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not (0.0 < self.labeled_fraction_threshold <= 1.0):
            raise ValueError("labeled_fraction_threshold must be in (0, 1]")


@dataclass
class Adapter:
    """Learned D x D' projection. The classifier head used in training is discarded.

    ``loss_history[0]`` is the mean loss at initialization; entry ``e + 1`` is
    the mean loss over the labeled set after epoch ``e``.
    """

    W: np.ndarray
    trained_on: int
    loss_history: list[float] = field(default_factory=list)

    @property
    def in_dim(self) -> int:
        return self.W.shape[0]

    @property
    def out_dim(self) -> int:
        return self.W.shape[1]


def _token_vector(token: str, dim: int, key: bytes) -> np.ndarray:
    # Deterministic sign vector from hash bits: entries are +-1/sqrt(dim).
    n_bytes = (dim + 7) // 8
    blocks = []
    counter = 0
    while sum(len(b) for b in blocks) < n_bytes:
        h = hashlib.blake2b(
            token.encode("utf-8"),
            digest_size=64,
            key=key,
            salt=counter.to_bytes(8, "little"),
        )
        blocks.append(h.digest())
        counter += 1
    bits = np.unpackbits(np.frombuffer(b"".join(blocks), dtype=np.uint8))[:dim]
    scale = 1.0 / math.sqrt(dim)
    return np.where(bits == 1, np.float32(scale), np.float32(-scale))


def base_embed(docs, dim: int = 64, seed: int = 0) -> np.ndarray:
    """Mean-pooled hashed token features, one float32 row per document.

    Deterministic for a fixed seed; documents with no tokens map to the zero
    vector. Row order follows document order.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if not docs:
        raise ValueError("docs must be non-empty")
    key = int(seed).to_bytes(16, "little", signed=False)[:16]

    vocab: dict[str, int] = {}
    occ_tok: list[int] = []
    lengths = np.zeros(len(docs), dtype=np.int64)
    for i, doc in enumerate(docs):
        lengths[i] = len(doc.tokens)
        for tok in doc.tokens:
            idx = vocab.get(tok)
            if idx is None:
                idx = len(vocab)
                vocab[tok] = idx
            occ_tok.append(idx)

    out = np.zeros((len(docs), dim), dtype=np.float32)
    if not vocab:
        return out
    table = np.empty((len(vocab), dim), dtype=np.float32)
    for tok, idx in vocab.items():
        table[idx] = _token_vector(tok, dim, key)

    # Sum token vectors per document in one pass: occurrences are already in
    # document order, so reduceat over the per-document boundaries works.
    starts = np.zeros(len(docs), dtype=np.int64)
    np.cumsum(lengths[:-1], out=starts[1:])
    nonempty = lengths > 0
    vecs = table[np.asarray(occ_tok, dtype=np.int64)]
    sums = np.add.reduceat(vecs, starts[nonempty], axis=0)
    # reduceat emits one row per nonempty doc because empty starts are skipped
    out[nonempty] = sums / lengths[nonempty, None].astype(np.float32)
    return out


def adapter_loss_and_grads(
    X: np.ndarray,
    y: np.ndarray,
    W: np.ndarray,
    V: np.ndarray,
    b: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Mean cross-entropy of ``softmax((X @ W) @ V + b)`` and its gradients.

    Returns ``(loss, dW, dV, db)``. Used both by the training loop and by the
    finite-difference gradient checks.
    """
    n = X.shape[0]
    Z = X @ W
    logits = Z @ V + b
    logits = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(logits)
    probs = exp / exp.sum(axis=1, keepdims=True)
    loss = float(-np.log(probs[np.arange(n), y]).mean())

    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    dV = Z.T @ dlogits
    db = dlogits.sum(axis=0)
    dW = X.T @ (dlogits @ V.T)
    return loss, dW, dV, db


def _mean_loss(X: np.ndarray, y: np.ndarray, W: np.ndarray, V: np.ndarray, b: np.ndarray) -> float:
    n = X.shape[0]
    logits = (X @ W) @ V + b
    logits = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(logits)
    probs = exp / exp.sum(axis=1, keepdims=True)
    return float(-np.log(probs[np.arange(n), y]).mean())


def train_adapter(
    matrix: np.ndarray,
    labels: Mapping[int, str],
    cfg: TrainConfig | None = None,
) -> Adapter:
    """Train the projection on labeled rows by mini-batch gradient descent.

    ``labels`` maps row indices of ``matrix`` to class names. The classifier
    head (``V``, ``b``) is used only here and thrown away; only ``W`` is kept.
    Deterministic for a fixed config seed.
    """
    cfg = cfg or TrainConfig()
    n_rows, d = matrix.shape
    d_out = cfg.projection_dim if cfg.projection_dim is not None else d

    classes = sorted(set(labels.values()))
    if len(classes) < 2:
        raise ValueError("need >=2 labeled classes")
    for idx in labels:
        if not (0 <= idx < n_rows):
            raise ValueError(f"labeled id {idx} has no embedding row (matrix has {n_rows})")

    class_index = {c: i for i, c in enumerate(classes)}
    rows = np.array(sorted(labels.keys()), dtype=np.int64)
    X = matrix[rows].astype(np.float64)
    y = np.array([class_index[labels[int(i)]] for i in rows], dtype=np.int64)
    n = len(rows)
    n_classes = len(classes)

    rng = np.random.default_rng(cfg.seed)
    # Start near the untuned representation: truncated identity plus small noise.
    W = np.eye(d, d_out) + rng.normal(0.0, 0.01 / math.sqrt(d), size=(d, d_out))
    V = np.zeros((d_out, n_classes))
    b = np.zeros(n_classes)

    losses = [_mean_loss(X, y, W, V, b)]
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            _, dW, dV, db = adapter_loss_and_grads(X[batch], y[batch], W, V, b)
            W -= cfg.learning_rate * dW
            V -= cfg.learning_rate * dV
            b -= cfg.learning_rate * db
        epoch_loss = _mean_loss(X, y, W, V, b)
        if not math.isfinite(epoch_loss):
            raise ValueError("training diverged: non-finite loss (lower the learning rate)")
        losses.append(epoch_loss)

    return Adapter(W=W.astype(np.float32), trained_on=n, loss_history=losses)


def apply_adapter(matrix: np.ndarray, adapter: Adapter) -> np.ndarray:
    """Project ``matrix`` (N x D) through the adapter to N x D'."""
    if matrix.ndim != 2 or matrix.shape[1] != adapter.W.shape[0]:
        raise ValueError(
            f"shape mismatch: matrix {tuple(matrix.shape)} vs adapter W {tuple(adapter.W.shape)}"
        )
    return (matrix @ adapter.W).astype(np.float32)


def save_adapter(adapter: Adapter, path: str | Path) -> None:
    """Write ``W``: magic ``ADP1``, u32 D, u32 D', float32 row-major (little-endian)."""
    w = np.ascontiguousarray(adapter.W, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_ADAPTER_MAGIC)
        fh.write(struct.pack("<II", w.shape[0], w.shape[1]))
        fh.write(w.tobytes())


def load_adapter(path: str | Path) -> Adapter:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != _ADAPTER_MAGIC:
        raise ValueError(f"{path}: not an adapter file (bad magic)")
    d, d_out = struct.unpack("<II", raw[4:12])
    expected = 12 + d * d_out * 4
    if len(raw) != expected:
        raise ValueError(f"{path}: truncated adapter file")
    w = np.frombuffer(raw[12:], dtype="<f4").reshape(d, d_out).copy()
    return Adapter(W=w, trained_on=0, loss_history=[])
