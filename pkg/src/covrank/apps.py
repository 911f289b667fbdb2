"""Downstream procedures: ranking candidate documents for KB construction,
scheduling extraction under a time budget, and flagging dubious low-support
claims via the coverage of documents that fail to express them.
"""

from dataclasses import dataclass, field

import numpy as np

from .corpus import ExtractionTuple
from .errors import CovrankError

RANKING_METHODS = ("random", "ir_bm25", "coverage_prediction", "coverage_oracle")


def rank_documents(
    doc_ids: list[str],
    method: str,
    *,
    seed: int = 0,
    bm25_scores: dict[str, float] | None = None,
    predicted_scores: dict[str, float] | None = None,
    gold_coverage: dict[str, float] | None = None,
) -> list[str]:
    """Total order over doc_ids. Score-based methods sort descending with
    ascending doc_id as tie-break; random is a seeded shuffle."""
    if method == "random":
        rng = np.random.default_rng(seed)
        ordered = sorted(doc_ids)
        return [ordered[i] for i in rng.permutation(len(ordered))]
    if method == "ir_bm25":
        scores = bm25_scores
    elif method == "coverage_prediction":
        scores = predicted_scores
    elif method == "coverage_oracle":
        scores = gold_coverage
    else:
        raise CovrankError(f"unknown ranking method {method!r}")
    if scores is None:
        raise CovrankError(f"ranking method {method!r} needs its score input")
    missing = [d for d in doc_ids if d not in scores]
    if missing:
        raise CovrankError(f"no score for doc_ids: {', '.join(sorted(missing))}")
    return sorted(doc_ids, key=lambda d: (-scores[d], d))


def kbc_yield(
    ranked: list[str],
    k: int,
    tuples_by_doc: dict[str, list[ExtractionTuple]],
    gt_objects: set[str],
) -> tuple[int, float]:
    """Distinct tuples over the top-k documents, and the fraction of them
    whose object is in the ground truth."""
    if k < 1:
        raise CovrankError("k must be >= 1")
    union: dict[tuple[str, str, str], None] = {}
    for doc_id in ranked[:k]:
        for t in tuples_by_doc.get(doc_id, []):
            union.setdefault((t.subject, t.relation, t.object))
    if not union:
        return 0, 0.0
    hits = sum(1 for _, _, obj in union if obj in gt_objects)
    return len(union), hits / len(union)


@dataclass
class CostModel:
    """Predictor cost linear in document length; extractor cost quadratic in
    entity mention count. Seconds."""

    predictor_intercept: float = 0.0
    predictor_per_word: float = 0.0
    extractor_intercept: float = 0.0
    extractor_per_sq_mention: float = 0.0

    def __post_init__(self):
        for value in (self.predictor_intercept, self.predictor_per_word,
                      self.extractor_intercept, self.extractor_per_sq_mention):
            if value < 0:
                raise CovrankError("cost coefficients must be nonnegative")

    def predictor_cost(self, doc_length: int) -> float:
        return self.predictor_intercept + self.predictor_per_word * doc_length

    def extractor_cost(self, mention_count: int) -> float:
        return self.extractor_intercept + self.extractor_per_sq_mention * mention_count ** 2

    @classmethod
    def calibrate(
        cls,
        doc_lengths: list[int],
        mention_counts: list[int],
        mean_predictor_seconds: float = 2.0,
        mean_extractor_seconds: float = 13.6,
    ) -> "CostModel":
        """Solve the per-unit coefficients so the corpus-average predictor and
        extractor costs hit the target means (zero intercepts)."""
        if not doc_lengths or not mention_counts:
            raise CovrankError("calibration needs nonempty corpus statistics")
        mean_len = sum(doc_lengths) / len(doc_lengths)
        mean_sq = sum(m ** 2 for m in mention_counts) / len(mention_counts)
        if mean_len <= 0 or mean_sq <= 0:
            raise CovrankError("calibration needs positive mean length and mention counts")
        return cls(
            predictor_per_word=mean_predictor_seconds / mean_len,
            extractor_per_sq_mention=mean_extractor_seconds / mean_sq,
        )


@dataclass
class BudgetResult:
    re_count: int
    docs_processed: int
    seconds_used: float


def simulate_budget(
    doc_ids: list[str],
    tuples_by_doc: dict[str, list[ExtractionTuple]],
    doc_lengths: dict[str, int],
    mention_counts: dict[str, int],
    cost: CostModel,
    budget_seconds: float,
    policy: str,
    *,
    seed: int = 0,
    predicted_scores: dict[str, float] | None = None,
) -> BudgetResult:
    """Run extraction until the budget is exhausted.

    baseline: seeded random order, extractor cost per document.
    prioritized: predictor cost is paid up front for every candidate, then
    documents run in descending predicted score. A document runs only if it
    fully fits in the remaining budget; the first skip stops the run.
    """
    if budget_seconds <= 0:
        raise CovrankError("budget must be positive")

    remaining = budget_seconds
    used = 0.0
    if policy == "baseline_random":
        rng = np.random.default_rng(seed)
        ordered = sorted(doc_ids)
        order = [ordered[i] for i in rng.permutation(len(ordered))]
    elif policy == "prioritized":
        if predicted_scores is None:
            raise CovrankError("prioritized policy needs predicted scores")
        overhead = sum(cost.predictor_cost(doc_lengths[d]) for d in doc_ids)
        if overhead > remaining:
            return BudgetResult(0, 0, 0.0)
        remaining -= overhead
        used += overhead
        order = sorted(doc_ids, key=lambda d: (-predicted_scores[d], d))
    else:
        raise CovrankError(f"unknown budget policy {policy!r}")

    union: dict[tuple[str, str, str], None] = {}
    processed = 0
    for doc_id in order:
        c = cost.extractor_cost(mention_counts[doc_id])
        if c > remaining:
            break
        remaining -= c
        used += c
        processed += 1
        for t in tuples_by_doc.get(doc_id, []):
            union.setdefault((t.subject, t.relation, t.object))
    return BudgetResult(re_count=len(union), docs_processed=processed, seconds_used=used)


@dataclass
class Claim:
    subject: str
    relation: str
    object: str
    supporting_doc_ids: set[str] = field(default_factory=set)

    def __post_init__(self):
        self.supporting_doc_ids = set(self.supporting_doc_ids)
        if not self.supporting_doc_ids:
            raise CovrankError("a claim needs at least one supporting document")

    @property
    def support_count(self) -> int:
        return len(self.supporting_doc_ids)

    def key(self) -> tuple[str, str, str]:
        return (self.subject, self.relation, self.object)


@dataclass
class RefutationReport:
    claim: Claim
    max_nonexpressing_coverage: float
    verdict: str  # likely-false | insufficient-evidence


def refute_claims(
    claims: list[Claim],
    coverage_by_doc: dict[tuple[str, str, str], float],
    refutation_threshold: float = 0.5,
) -> list[RefutationReport]:
    """For each claim, the maximum coverage among same-(entity, relation)
    documents that do not express it; at or above the threshold the claim is
    likely-false. Output sorted by that value, descending."""
    docs_by_er: dict[tuple[str, str], list[tuple[str, float]]] = {}
    for (doc_id, entity_id, relation), cov in coverage_by_doc.items():
        docs_by_er.setdefault((entity_id, relation), []).append((doc_id, cov))

    reports = []
    for claim in claims:
        pool = docs_by_er.get((claim.subject, claim.relation), [])
        non_expressing = [cov for doc_id, cov in pool if doc_id not in claim.supporting_doc_ids]
        if not non_expressing:
            reports.append(RefutationReport(claim, 0.0, "insufficient-evidence"))
            continue
        value = max(non_expressing)
        verdict = "likely-false" if value >= refutation_threshold else "insufficient-evidence"
        reports.append(RefutationReport(claim, value, verdict))
    reports.sort(key=lambda r: (-r.max_nonexpressing_coverage, r.claim.key()))
    return reports


def claims_from_tuples(
    tuples: list[ExtractionTuple],
    max_support: int = 1,
) -> list[Claim]:
    """Group tuples into claims and keep the low-support ones."""
    support: dict[tuple[str, str, str], set[str]] = {}
    for t in tuples:
        support.setdefault((t.subject, t.relation, t.object), set()).add(t.doc_id)
    return [
        Claim(subject=s, relation=r, object=o, supporting_doc_ids=docs)
        for (s, r, o), docs in support.items()
        if len(docs) <= max_support
    ]
