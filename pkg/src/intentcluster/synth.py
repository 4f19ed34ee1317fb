"""Synthetic corpora with planted structure, for benchmarking and evaluation.

Two generators:

* :func:`grouped_corpus` - documents drawn from per-group vocabularies, so
  clustering should recover the groups.
* :func:`intent_topic_corpus` - every document mixes a dominant topic
  vocabulary with a small intent vocabulary; untuned embeddings cluster by
  topic, and only label-driven adaptation can surface the intent grouping.
"""

from __future__ import annotations

import numpy as np

from .corpus import Document


def grouped_corpus(
    n_docs: int,
    n_groups: int,
    seed: int = 0,
    *,
    vocab_per_group: int = 40,
    shared_vocab: int = 12,
    doc_len: tuple[int, int] = (12, 30),
    shared_tokens_per_doc: int = 2,
) -> tuple[list[Document], list[str]]:
    """Documents sampled from disjoint group vocabularies plus a small shared one.

    Returns ``(docs, truth)`` where ``truth[i]`` is document i's group name.
    """
    if n_groups < 1 or n_docs < n_groups:
        raise ValueError("need n_docs >= n_groups >= 1")
    rng = np.random.default_rng(seed)
    group_vocabs = [
        [f"g{g:02d}w{t:03d}" for t in range(vocab_per_group)] for g in range(n_groups)
    ]
    shared = [f"common{t:03d}" for t in range(shared_vocab)]

    docs: list[Document] = []
    truth: list[str] = []
    for i in range(n_docs):
        g = i % n_groups
        length = int(rng.integers(doc_len[0], doc_len[1] + 1))
        words = list(rng.choice(group_vocabs[g], size=length, replace=True))
        if shared_vocab and shared_tokens_per_doc:
            words += list(rng.choice(shared, size=shared_tokens_per_doc, replace=True))
        rng.shuffle(words)
        docs.append(Document.make(f"doc-{i:06d}", " ".join(words)))
        truth.append(f"group{g:02d}")
    return docs, truth


def intent_topic_corpus(
    n_docs: int,
    n_topics: int = 4,
    n_intents: int = 3,
    seed: int = 0,
    *,
    topic_vocab: int = 50,
    intent_vocab: int = 4,
    topic_tokens_per_doc: int = 24,
    intent_tokens_per_doc: int = 4,
) -> tuple[list[Document], list[str], list[str]]:
    """Crossed topic x intent corpus. Returns ``(docs, topic_truth, intent_truth)``.

    Topics and intents are assigned independently, so a topic clustering
    carries no information about intents.
    """
    rng = np.random.default_rng(seed)
    topic_vocabs = [
        [f"t{t:02d}w{w:03d}" for w in range(topic_vocab)] for t in range(n_topics)
    ]
    intent_vocabs = [
        [f"intent{i:02d}w{w:02d}" for w in range(intent_vocab)] for i in range(n_intents)
    ]
    docs: list[Document] = []
    topics: list[str] = []
    intents: list[str] = []
    for i in range(n_docs):
        t = int(rng.integers(n_topics))
        v = int(rng.integers(n_intents))
        words = list(rng.choice(topic_vocabs[t], size=topic_tokens_per_doc, replace=True))
        words += list(rng.choice(intent_vocabs[v], size=intent_tokens_per_doc, replace=True))
        rng.shuffle(words)
        docs.append(Document.make(f"doc-{i:06d}", " ".join(words)))
        topics.append(f"topic{t:02d}")
        intents.append(f"intent{v:02d}")
    return docs, topics, intents
