"""Real-valued coverage, informative/uninformative binarization, and
leakage-free grouped splits with class rebalancing."""

import bisect
import json
import math
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlparse

import numpy as np

from .corpus import Corpus, GroundTruth
from .errors import CovrankError

SPLITS = ("train", "validation", "test")
GROUP_KEYS = ("entity", "site_domain", "sub_domain")


@dataclass
class CoverageRecord:
    doc_id: str
    entity_id: str
    relation: str
    coverage: float
    gt_size: int
    extracted_hits: int
    degenerate: bool = False


@dataclass
class LabeledDocument:
    doc_id: str
    entity_id: str
    relation: str
    label: int
    coverage: float


@dataclass
class SplitAssignment:
    assignment: dict[str, str]  # doc_id -> split name
    group_key: str
    seed: int

    def split_of(self, doc_id: str) -> str:
        return self.assignment[doc_id]


def compute_coverage(extracted: set[str], gt: GroundTruth, doc_id: str = "") -> CoverageRecord:
    """Fraction of the ground-truth objects present in the extracted set.

    An empty ground truth yields coverage 0 with the degenerate flag set so
    downstream config can keep or drop such documents.
    """
    gt_size = len(gt.objects)
    hits = len(set(extracted) & gt.objects)
    if gt_size == 0:
        return CoverageRecord(doc_id, gt.entity_id, gt.relation, 0.0, 0, 0, degenerate=True)
    return CoverageRecord(doc_id, gt.entity_id, gt.relation, hits / gt_size, gt_size, hits)


def binarize(
    records: list[CoverageRecord],
    percentile: float = 0.85,
    absolute: float = 0.5,
) -> list[LabeledDocument]:
    """Label each record informative (1) or uninformative (0).

    A record is informative when its coverage exceeds the absolute threshold,
    or when it is strictly greater than the coverage of at least
    ceil(percentile * (n-1)) of the other records in its group (and of at
    least one, so an all-equal group stays all-uninformative).
    """
    if not records:
        raise CovrankError("binarize requires at least one record")
    keys = {(r.entity_id, r.relation) for r in records}
    if len(keys) > 1:
        raise CovrankError(f"binarize expects a single (entity, relation) group, got {len(keys)}")

    n = len(records)
    required = max(1, math.ceil(percentile * (n - 1)))
    coverages = sorted(r.coverage for r in records)
    out = []
    for r in records:
        below = _count_strictly_below(coverages, r.coverage)
        label = int(r.coverage > absolute or below >= required)
        out.append(LabeledDocument(r.doc_id, r.entity_id, r.relation, label, r.coverage))
    return out


def _count_strictly_below(sorted_values: list[float], value: float) -> int:
    return bisect.bisect_left(sorted_values, value)


def group_value(doc, group_key: str) -> str:
    """The leakage-group value of a document under the chosen key."""
    if group_key == "entity":
        return doc.entity_id
    if group_key == "site_domain":
        return doc.site_domain
    if group_key == "sub_domain":
        host = urlparse(doc.url).hostname or ""
        return host or doc.site_domain
    raise CovrankError(f"unknown group key {group_key!r}")


def split(
    corpus: Corpus,
    labels: list[LabeledDocument],
    ratios: tuple[float, float, float] = (0.7, 0.1, 0.2),
    group_key: str = "entity",
    seed: int = 0,
) -> SplitAssignment:
    """Partition groups into train/validation/test by largest-remainder
    rounding over a seeded shuffle. Every document of a group lands in the
    same split."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise CovrankError(f"split ratios must sum to 1, got {ratios}")

    groups: dict[str, None] = {}
    for lab in labels:
        groups.setdefault(group_value(corpus.document(lab.doc_id), group_key))
    names = list(groups)
    nonzero = sum(1 for r in ratios if r > 0)
    if len(names) < nonzero:
        raise CovrankError(
            f"need at least {nonzero} groups for ratios {ratios}, got {len(names)}"
        )

    rng = np.random.default_rng(seed)
    order = [names[i] for i in rng.permutation(len(names))]
    counts = _largest_remainder(len(names), ratios)

    group_split: dict[str, str] = {}
    start = 0
    for split_name, count in zip(SPLITS, counts):
        for name in order[start:start + count]:
            group_split[name] = split_name
        start += count

    assignment = {
        lab.doc_id: group_split[group_value(corpus.document(lab.doc_id), group_key)]
        for lab in labels
    }
    return SplitAssignment(assignment=assignment, group_key=group_key, seed=seed)


def _largest_remainder(total: int, ratios: tuple[float, ...]) -> list[int]:
    raw = [total * r for r in ratios]
    counts = [int(x) for x in raw]
    leftover = total - sum(counts)
    order = sorted(range(len(ratios)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def undersample(train: list[LabeledDocument], seed: int = 0) -> list[LabeledDocument]:
    """Downsample the majority class to the minority count (50:50) and
    shuffle deterministically. Both classes must be present."""
    pos = [r for r in train if r.label == 1]
    neg = [r for r in train if r.label == 0]
    if not pos or not neg:
        raise CovrankError("undersample requires both classes to be present")

    rng = np.random.default_rng(seed)
    minority, majority = (pos, neg) if len(pos) <= len(neg) else (neg, pos)
    picked = rng.choice(len(majority), size=len(minority), replace=False)
    kept = minority + [majority[i] for i in sorted(picked)]
    return [kept[i] for i in rng.permutation(len(kept))]


def write_labels(
    labels: list[LabeledDocument],
    assignment: SplitAssignment,
    path: str | Path,
) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for lab in labels:
            fh.write(json.dumps({
                "doc_id": lab.doc_id,
                "entity_id": lab.entity_id,
                "relation": lab.relation,
                "coverage": lab.coverage,
                "label": lab.label,
                "split": assignment.split_of(lab.doc_id),
            }) + "\n")


def read_labels(path: str | Path) -> list[dict]:
    rows = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
