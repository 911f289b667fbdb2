"""Classification and ranking metrics: threshold-swept optimal F1,
precision/recall at a fixed threshold, nDCG, and Pearson correlation.

Convention everywhere: predict positive iff score > threshold.
"""

import math
from dataclasses import dataclass

from .errors import CovrankError


@dataclass
class ScoredLabel:
    doc_id: str
    score: float
    label: int


@dataclass
class PrfReport:
    threshold: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


def prf_at(items: list[ScoredLabel], threshold: float) -> PrfReport:
    tp = fp = fn = tn = 0
    for item in items:
        predicted = item.score > threshold
        if predicted and item.label == 1:
            tp += 1
        elif predicted:
            fp += 1
        elif item.label == 1:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrfReport(threshold, precision, recall, f1, tp, fp, fn, tn)


def optimal_f1(items: list[ScoredLabel]) -> PrfReport:
    """Maximum F1 over every threshold midway between consecutive distinct
    scores, plus -inf/+inf sentinels; ties resolve to the lowest threshold."""
    if not any(item.label == 1 for item in items):
        raise CovrankError("optimal_f1 requires at least one positive label")
    scores = sorted({item.score for item in items})
    thresholds = [-math.inf]
    thresholds += [(a + b) / 2 for a, b in zip(scores, scores[1:])]
    thresholds.append(math.inf)

    best = None
    for threshold in thresholds:
        report = prf_at(items, threshold)
        if best is None or report.f1 > best.f1:
            best = report
    return best


def ndcg(relevances_in_predicted_order: list[float], k: int | None = None) -> float:
    """DCG@k with gain rel_i / log2(i + 1) over the predicted order, divided
    by the ideal DCG@k. k defaults to the full list."""
    rels = list(relevances_in_predicted_order)
    if any(r < 0 for r in rels):
        raise CovrankError("relevances must be nonnegative")
    if not any(r > 0 for r in rels):
        raise CovrankError("ndcg needs at least one positive relevance")
    if k is None:
        k = len(rels)
    dcg = _dcg(rels[:k])
    idcg = _dcg(sorted(rels, reverse=True)[:k])
    return dcg / idcg


def _dcg(rels: list[float]) -> float:
    return sum(rel / math.log2(i + 1) for i, rel in enumerate(rels, start=1))


def pearson(x: list[float], y: list[float]) -> float:
    if len(x) != len(y):
        raise CovrankError("pearson requires equal-length inputs")
    n = len(x)
    if n < 2:
        raise CovrankError("pearson requires at least two points")
    mx = sum(x) / n
    my = sum(y) / n
    dx = [a - mx for a in x]
    dy = [b - my for b in y]
    vx = sum(d * d for d in dx)
    vy = sum(d * d for d in dy)
    if vx == 0 or vy == 0:
        raise CovrankError("pearson undefined for zero-variance input")
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(vx * vy)
