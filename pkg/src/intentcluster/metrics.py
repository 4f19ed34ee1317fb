"""Cluster quality against reference labels: purity and NMI.

NMI uses natural log and the arithmetic mean of the two entropies as the
normalizer. Degenerate cases: both sides single-cluster -> 1.0; exactly one
side with zero entropy -> 0.0.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .community import as_assignment


@dataclass
class EvalReport:
    purity: float
    nmi: float
    n_pred_clusters: int
    n_true_classes: int
    contingency: dict[int, dict[str, int]]  # predicted cluster -> class -> count

    def to_dict(self) -> dict:
        return {
            "purity": self.purity,
            "nmi": self.nmi,
            "n_pred_clusters": self.n_pred_clusters,
            "n_true_classes": self.n_true_classes,
            "contingency": {str(k): dict(v) for k, v in self.contingency.items()},
        }


def _truth_list(pred: Sequence[int], truth) -> list:
    if isinstance(truth, Mapping):
        missing = [i for i in range(len(pred)) if i not in truth]
        if missing:
            raise ValueError(f"node {missing[0]} has no truth label")
        return [truth[i] for i in range(len(pred))]
    truth = list(truth)
    if len(truth) != len(pred):
        raise ValueError(
            f"truth covers {len(truth)} nodes, partition has {len(pred)}"
        )
    return truth


def contingency_table(pred, truth) -> dict[int, dict[str, int]]:
    """Counts per (predicted cluster, true class) pair."""
    assignment = as_assignment(pred)
    labels = _truth_list(assignment, truth)
    table: dict[int, dict[str, int]] = {}
    for cluster, cls in zip(assignment.tolist(), labels):
        row = table.setdefault(cluster, {})
        row[cls] = row.get(cls, 0) + 1
    return table


def purity(pred, truth) -> float:
    """Fraction of documents in the majority true class of their cluster."""
    assignment = as_assignment(pred)
    if len(assignment) == 0:
        raise ValueError("empty partition")
    table = contingency_table(assignment, truth)
    return sum(max(row.values()) for row in table.values()) / len(assignment)


def nmi(pred, truth) -> float:
    """Normalized mutual information between the partition and the classes."""
    assignment = as_assignment(pred)
    n = len(assignment)
    if n == 0:
        raise ValueError("empty partition")
    labels = _truth_list(assignment, truth)
    pred_sizes = Counter(assignment.tolist())
    true_sizes = Counter(labels)
    if len(pred_sizes) == 1 and len(true_sizes) == 1:
        return 1.0
    h_pred = -sum((c / n) * math.log(c / n) for c in pred_sizes.values())
    h_true = -sum((c / n) * math.log(c / n) for c in true_sizes.values())
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    joint = Counter(zip(assignment.tolist(), labels))
    mi = sum(
        (c / n) * math.log(n * c / (pred_sizes[k] * true_sizes[j]))
        for (k, j), c in joint.items()
    )
    return mi / ((h_pred + h_true) / 2.0)


def evaluate(pred, truth) -> EvalReport:
    """Full report: purity, NMI, cluster/class counts and the contingency table."""
    assignment = as_assignment(pred)
    table = contingency_table(assignment, truth)
    return EvalReport(
        purity=purity(assignment, truth),
        nmi=nmi(assignment, truth),
        n_pred_clusters=len(table),
        n_true_classes=len({cls for row in table.values() for cls in row}),
        contingency=table,
    )
