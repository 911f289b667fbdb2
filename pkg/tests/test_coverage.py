import math
import random

import pytest

from covrank.corpus import Corpus, Document, GroundTruth
from covrank.coverage import (
    CoverageRecord, LabeledDocument, binarize, compute_coverage, split, undersample,
)
from covrank.errors import CovrankError


def gt(objects, entity="e1", relation="founded-by"):
    return GroundTruth(entity, relation, "wiki", set(objects))


FOUNDERS = {"Elon Musk", "Martin Eberhard", "Marc Tarpenning", "JB Straubel", "Ian Wright"}


class TestComputeCoverage:
    def test_tesla_full(self, tesla_corpus):
        truth = tesla_corpus.ground_truth("Tesla", "founded-by", "wiki")
        extracted = {
            d.doc_id: {t.object for t in tesla_corpus.tuples_for_doc(d.doc_id, "founded-by")}
            for d in tesla_corpus.documents
        }
        coverages = {
            doc_id: compute_coverage(objs, truth, doc_id).coverage
            for doc_id, objs in extracted.items()
        }
        assert coverages == {"t1": 1.0, "t2": 0.4, "t3": 0.2}

    def test_empty_extraction(self):
        rec = compute_coverage(set(), gt(FOUNDERS), "d1")
        assert rec.coverage == 0.0
        assert rec.extracted_hits == 0
        assert not rec.degenerate

    def test_degenerate_empty_gt(self):
        rec = compute_coverage({"x"}, gt(set()), "d1")
        assert rec.coverage == 0.0
        assert rec.degenerate

    def test_matches_brute_force_oracle(self):
        rng = random.Random(11)
        universe = [f"o{i}" for i in range(12)]
        for _ in range(500):
            truth = set(rng.sample(universe, rng.randint(1, 10)))
            extracted = set(rng.sample(universe, rng.randint(0, 12)))
            expected = sum(1 for o in extracted if o in truth) / len(truth)
            rec = compute_coverage(extracted, gt(truth))
            assert rec.coverage == expected
            assert 0.0 <= rec.coverage <= 1.0

    def test_monotone_in_extracted(self):
        rng = random.Random(12)
        universe = [f"o{i}" for i in range(10)]
        for _ in range(200):
            truth = set(rng.sample(universe, rng.randint(1, 8)))
            small = set(rng.sample(universe, rng.randint(0, 6)))
            big = small | set(rng.sample(universe, rng.randint(0, 6)))
            assert (
                compute_coverage(small, gt(truth)).coverage
                <= compute_coverage(big, gt(truth)).coverage
            )


def recs(coverages, entity="e1", relation="founded-by"):
    return [
        CoverageRecord(f"d{i}", entity, relation, c, 5, round(c * 5))
        for i, c in enumerate(coverages)
    ]


class TestBinarize:
    def test_absolute_rule(self):
        labels = [l.label for l in binarize(recs([0.6, 0.1, 0.1]))]
        assert labels == [1, 0, 0]

    def test_percentile_rule_twenty_docs(self):
        coverages = [0.4] + [0.1] * 19
        labels = [l.label for l in binarize(recs(coverages))]
        assert labels == [1] + [0] * 19

    def test_all_zero(self):
        assert all(l.label == 0 for l in binarize(recs([0.0] * 7)))

    def test_all_zero_single_record(self):
        assert binarize(recs([0.0]))[0].label == 0

    def test_empty_error(self):
        with pytest.raises(CovrankError):
            binarize([])

    def test_mixed_groups_rejected(self):
        rows = recs([0.1]) + recs([0.2], entity="e2")
        with pytest.raises(CovrankError, match="single"):
            binarize(rows)

    def test_zero_thresholds_label_positive_coverage(self):
        rng = random.Random(13)
        for _ in range(200):
            coverages = [rng.choice([0.0, 0.0, rng.random()]) for _ in range(rng.randint(1, 12))]
            out = binarize(recs(coverages), percentile=0.0, absolute=0.0)
            for lab in out:
                assert lab.label == (1 if lab.coverage > 0 else 0)

    def test_monotone_in_own_coverage(self):
        rng = random.Random(14)
        for _ in range(300):
            n = rng.randint(1, 15)
            coverages = [rng.random() for _ in range(n)]
            i = rng.randrange(n)
            before = binarize(recs(coverages))[i].label
            bumped = list(coverages)
            bumped[i] = min(1.0, bumped[i] + rng.random() * (1 - bumped[i]))
            after = binarize(recs(bumped))[i].label
            assert after >= before


def corpus_with_entities(n_entities, docs_per_entity=3, sites=None):
    docs = []
    for i in range(n_entities):
        for j in range(docs_per_entity):
            site = sites[i % len(sites)] if sites else f"site{i}.com"
            docs.append(Document(
                doc_id=f"d{i}_{j}", entity_id=f"e{i}",
                url=f"https://sub{i % 12}.{site}/x", site_domain=site, text="t",
            ))
    return Corpus(documents=docs)


def labels_for(corpus):
    return [
        LabeledDocument(d.doc_id, d.entity_id, "ceo", 0, 0.0)
        for d in corpus.documents
    ]


class TestSplit:
    def test_ten_entities_split_7_1_2(self):
        corpus = corpus_with_entities(10)
        assignment = split(corpus, labels_for(corpus), (0.7, 0.1, 0.2), "entity", seed=0)
        per_split = {"train": set(), "validation": set(), "test": set()}
        for d in corpus.documents:
            per_split[assignment.split_of(d.doc_id)].add(d.entity_id)
        assert (len(per_split["train"]), len(per_split["validation"]),
                len(per_split["test"])) == (7, 1, 2)

    def test_deterministic(self):
        corpus = corpus_with_entities(9)
        a = split(corpus, labels_for(corpus), (0.7, 0.1, 0.2), "entity", seed=5)
        b = split(corpus, labels_for(corpus), (0.7, 0.1, 0.2), "entity", seed=5)
        assert a.assignment == b.assignment

    def test_no_group_straddles_splits(self):
        rng = random.Random(15)
        for seed in range(10):
            corpus = corpus_with_entities(rng.randint(3, 20), rng.randint(1, 4))
            labels = labels_for(corpus)
            assignment = split(corpus, labels, (0.7, 0.1, 0.2), "entity", seed=seed)
            assert set(assignment.assignment) == {d.doc_id for d in corpus.documents}
            by_entity = {}
            for d in corpus.documents:
                by_entity.setdefault(d.entity_id, set()).add(
                    assignment.split_of(d.doc_id))
            assert all(len(s) == 1 for s in by_entity.values())

    def test_sub_domain_grouping(self):
        corpus = corpus_with_entities(24, sites=["a.com", "b.com"])
        assignment = split(corpus, labels_for(corpus), (0.7, 0.1, 0.2), "sub_domain", seed=1)
        hosts = {}
        for d in corpus.documents:
            host = d.url.split("/")[2]
            hosts.setdefault(host, set()).add(assignment.split_of(d.doc_id))
        assert len(hosts) >= 12
        assert all(len(s) == 1 for s in hosts.values())

    def test_too_few_groups(self):
        corpus = corpus_with_entities(2)
        with pytest.raises(CovrankError, match="groups"):
            split(corpus, labels_for(corpus), (0.7, 0.1, 0.2), "entity", seed=0)

    def test_bad_ratios(self):
        corpus = corpus_with_entities(5)
        with pytest.raises(CovrankError, match="sum to 1"):
            split(corpus, labels_for(corpus), (0.5, 0.1, 0.2), "entity", seed=0)


def labeled(n_pos, n_neg):
    rows = [LabeledDocument(f"p{i}", "e1", "ceo", 1, 0.9) for i in range(n_pos)]
    rows += [LabeledDocument(f"n{i}", "e1", "ceo", 0, 0.1) for i in range(n_neg)]
    return rows


class TestUndersample:
    def test_majority_downsampled(self):
        out = undersample(labeled(10, 30), seed=0)
        assert sum(r.label == 1 for r in out) == 10
        assert sum(r.label == 0 for r in out) == 10

    def test_balanced_unchanged_membership(self):
        rows = labeled(10, 10)
        out = undersample(rows, seed=0)
        assert sorted(r.doc_id for r in out) == sorted(r.doc_id for r in rows)

    def test_empty_class_error(self):
        with pytest.raises(CovrankError, match="both classes"):
            undersample(labeled(0, 10), seed=0)

    def test_subset_and_exact_balance(self):
        rng = random.Random(16)
        for seed in range(20):
            n_pos, n_neg = rng.randint(1, 30), rng.randint(1, 30)
            rows = labeled(n_pos, n_neg)
            out = undersample(rows, seed=seed)
            ids = [r.doc_id for r in out]
            assert len(ids) == len(set(ids))
            assert set(ids) <= {r.doc_id for r in rows}
            assert sum(r.label == 1 for r in out) == sum(r.label == 0 for r in out) \
                == min(n_pos, n_neg)

    def test_deterministic(self):
        rows = labeled(5, 25)
        a = [r.doc_id for r in undersample(rows, seed=9)]
        b = [r.doc_id for r in undersample(rows, seed=9)]
        assert a == b
