import itertools
import random

import pytest

from covrank.apps import (
    BudgetResult, Claim, CostModel, claims_from_tuples, kbc_yield,
    rank_documents, refute_claims, simulate_budget,
)
from covrank.corpus import ExtractionTuple
from covrank.errors import CovrankError


def tup(doc_id, obj, subject="e1", relation="ceo"):
    return ExtractionTuple(doc_id, subject, relation, obj)


class TestRankDocuments:
    def test_oracle_sorts_by_gold(self):
        order = rank_documents(
            ["a", "b", "c"], "coverage_oracle",
            gold_coverage={"a": 0.2, "b": 1.0, "c": 0.4},
        )
        assert order == ["b", "c", "a"]

    def test_random_deterministic(self):
        a = rank_documents(["a", "b", "c", "d"], "random", seed=7)
        b = rank_documents(["a", "b", "c", "d"], "random", seed=7)
        assert a == b
        assert sorted(a) == ["a", "b", "c", "d"]

    def test_prediction_matching_gold_equals_oracle(self):
        gold = {"a": 0.3, "b": 0.9, "c": 0.1}
        assert rank_documents(list(gold), "coverage_prediction", predicted_scores=gold) \
            == rank_documents(list(gold), "coverage_oracle", gold_coverage=gold)

    def test_oracle_without_gold_errors(self):
        with pytest.raises(CovrankError, match="score input"):
            rank_documents(["a"], "coverage_oracle")

    def test_ties_break_by_doc_id(self):
        order = rank_documents(
            ["d", "b", "a"], "ir_bm25", bm25_scores={"a": 1.0, "b": 1.0, "d": 1.0})
        assert order == ["a", "b", "d"]

    def test_oracle_maximizes_topk_coverage_sum(self):
        rng = random.Random(51)
        for _ in range(30):
            n = rng.randint(1, 7)
            gold = {f"d{i}": round(rng.random(), 3) for i in range(n)}
            ranked = rank_documents(sorted(gold), "coverage_oracle", gold_coverage=gold)
            for k in range(1, n + 1):
                achieved = sum(gold[d] for d in ranked[:k])
                best = max(
                    sum(gold[d] for d in perm[:k])
                    for perm in itertools.permutations(gold)
                )
                assert achieved == pytest.approx(best)


class TestKbcYield:
    def test_three_of_five_plus_spurious(self):
        truth = {f"g{i}" for i in range(5)}
        tuples = {"d1": [tup("d1", "g0"), tup("d1", "g1"), tup("d1", "g2"),
                         tup("d1", "junk")]}
        got = kbc_yield(["d1"], 1, tuples, truth)
        assert got == (4, 0.75)

    def test_k_beyond_pool_is_method_independent(self):
        truth = {"g0"}
        tuples = {
            "d1": [tup("d1", "g0")],
            "d2": [tup("d2", "x")],
            "d3": [tup("d3", "y"), tup("d3", "g0")],
        }
        a = kbc_yield(["d1", "d2", "d3"], 10, tuples, truth)
        b = kbc_yield(["d3", "d1", "d2"], 10, tuples, truth)
        assert a == b == (3, 1 / 3)

    def test_empty_extractions(self):
        assert kbc_yield(["d1"], 1, {}, {"g"}) == (0, 0.0)

    def test_duplicates_collapse(self):
        truth = {"g"}
        tuples = {"d1": [tup("d1", "g")], "d2": [tup("d2", "g")]}
        assert kbc_yield(["d1", "d2"], 2, tuples, truth) == (1, 1.0)


class TestCostModel:
    def test_calibration_hits_target_means(self):
        lengths = [100, 200, 300]
        mentions = [2, 4, 6]
        cost = CostModel.calibrate(lengths, mentions)
        mean_pred = sum(cost.predictor_cost(l) for l in lengths) / 3
        mean_extr = sum(cost.extractor_cost(m) for m in mentions) / 3
        assert mean_pred == pytest.approx(2.0)
        assert mean_extr == pytest.approx(13.6)

    def test_quadratic_mentions(self):
        cost = CostModel(extractor_per_sq_mention=1.0)
        assert cost.extractor_cost(4) == 16.0

    def test_negative_coefficients_rejected(self):
        with pytest.raises(CovrankError):
            CostModel(predictor_intercept=-1.0)


def uniform_pool():
    doc_ids = ["d1", "d2", "d3"]
    tuples = {
        "d1": [tup("d1", f"a{i}") for i in range(5)],
        "d2": [tup("d2", "b0")],
        "d3": [],
    }
    lengths = {d: 10 for d in doc_ids}
    mentions = {d: 2 for d in doc_ids}
    cost = CostModel(extractor_intercept=10.0)  # flat 10 s per doc
    return doc_ids, tuples, lengths, mentions, cost


class TestSimulateBudget:
    def test_enumerated_two_slot_orders(self):
        doc_ids, tuples, lengths, mentions, cost = uniform_pool()
        yields = []
        for perm in itertools.permutations(doc_ids):
            union = set()
            for d in perm[:2]:  # budget 20 fits exactly two docs
                union |= {t.object for t in tuples[d]}
            yields.append(len(union))
        best, worst = max(yields), min(yields)
        assert best == 6 and worst == 1

        prioritized = simulate_budget(
            doc_ids, tuples, lengths, mentions,
            CostModel(extractor_intercept=10.0), 20.0, "prioritized",
            predicted_scores={"d1": 0.9, "d2": 0.5, "d3": 0.1},
        )
        assert prioritized.re_count == best
        assert prioritized.docs_processed == 2

    def test_saturation_equalizes_policies(self):
        doc_ids, tuples, lengths, mentions, cost = uniform_pool()
        base = simulate_budget(doc_ids, tuples, lengths, mentions, cost, 1000.0,
                               "baseline_random", seed=0)
        prio = simulate_budget(
            doc_ids, tuples, lengths, mentions,
            CostModel(extractor_intercept=10.0), 1000.0, "prioritized",
            predicted_scores={"d1": 0.1, "d2": 0.2, "d3": 0.3},
        )
        assert base.docs_processed == prio.docs_processed == 3
        assert base.re_count == prio.re_count == 6

    def test_predictor_overhead_consumes_budget(self):
        doc_ids, tuples, lengths, mentions, _ = uniform_pool()
        cost = CostModel(predictor_per_word=1.0, extractor_intercept=1.0)
        result = simulate_budget(
            doc_ids, tuples, lengths, mentions, cost, 29.0, "prioritized",
            predicted_scores={d: 0.5 for d in doc_ids},
        )
        assert result == BudgetResult(0, 0, 0.0)

    def test_tiny_budget_returns_zero_not_error(self):
        doc_ids, tuples, lengths, mentions, cost = uniform_pool()
        result = simulate_budget(doc_ids, tuples, lengths, mentions, cost, 5.0,
                                 "baseline_random", seed=0)
        assert (result.re_count, result.docs_processed) == (0, 0)

    def test_never_exceeds_budget(self):
        rng = random.Random(52)
        for seed in range(50):
            n = rng.randint(1, 20)
            doc_ids = [f"d{i}" for i in range(n)]
            tuples = {d: [tup(d, f"{d}o{j}") for j in range(rng.randint(0, 4))]
                      for d in doc_ids}
            lengths = {d: rng.randint(1, 500) for d in doc_ids}
            mentions = {d: rng.randint(0, 20) for d in doc_ids}
            cost = CostModel(
                predictor_per_word=0.01, extractor_intercept=1.0,
                extractor_per_sq_mention=0.05,
            )
            budget = rng.uniform(1, 60)
            for policy, kwargs in (
                ("baseline_random", {"seed": seed}),
                ("prioritized", {"predicted_scores": {d: rng.random() for d in doc_ids}}),
            ):
                result = simulate_budget(doc_ids, tuples, lengths, mentions, cost,
                                         budget, policy, **kwargs)
                assert result.seconds_used <= budget + 1e-9

    def test_baseline_deterministic(self):
        doc_ids, tuples, lengths, mentions, cost = uniform_pool()
        a = simulate_budget(doc_ids, tuples, lengths, mentions, cost, 20.0,
                            "baseline_random", seed=3)
        b = simulate_budget(doc_ids, tuples, lengths, mentions, cost, 20.0,
                            "baseline_random", seed=3)
        assert a == b


class TestRefuteClaims:
    def coverage(self):
        return {
            ("d1", "e1", "ceo"): 0.9,
            ("d2", "e1", "ceo"): 0.2,
            ("d3", "e1", "ceo"): 0.1,
        }

    def test_absent_from_high_coverage_is_likely_false(self):
        claim = Claim("e1", "ceo", "bogus", {"d3"})
        report = refute_claims([claim], self.coverage(), 0.5)[0]
        assert report.verdict == "likely-false"
        assert report.max_nonexpressing_coverage == 0.9

    def test_absent_only_from_low_coverage(self):
        claim = Claim("e1", "ceo", "maybe", {"d1"})
        report = refute_claims([claim], self.coverage(), 0.5)[0]
        assert report.verdict == "insufficient-evidence"
        assert report.max_nonexpressing_coverage == 0.2

    def test_no_nonexpressing_docs(self):
        claim = Claim("e1", "ceo", "everywhere", {"d1", "d2", "d3"})
        report = refute_claims([claim], self.coverage(), 0.5)[0]
        assert report.verdict == "insufficient-evidence"
        assert report.max_nonexpressing_coverage == 0.0

    def test_sorted_descending(self):
        claims = [
            Claim("e1", "ceo", "weak", {"d1"}),   # max non-expressing 0.2
            Claim("e1", "ceo", "strong", {"d3"}),  # max non-expressing 0.9
        ]
        reports = refute_claims(claims, self.coverage(), 0.5)
        assert [r.max_nonexpressing_coverage for r in reports] == [0.9, 0.2]

    def test_order_invariant_under_permutation(self):
        rng = random.Random(53)
        claims = [Claim("e1", "ceo", f"o{i}", {rng.choice(["d1", "d2", "d3"])})
                  for i in range(10)]
        forward = refute_claims(claims, self.coverage(), 0.5)
        shuffled = claims[:]
        rng.shuffle(shuffled)
        backward = refute_claims(shuffled, self.coverage(), 0.5)
        assert [r.claim.key() for r in forward] == [r.claim.key() for r in backward]


class TestClaimsFromTuples:
    def test_low_support_only(self):
        tuples = [tup("d1", "rare"), tup("d1", "common"), tup("d2", "common")]
        claims = claims_from_tuples(tuples, max_support=1)
        assert [c.object for c in claims] == ["rare"]
        assert claims[0].support_count == 1

    def test_support_counts(self):
        tuples = [tup("d1", "x"), tup("d2", "x"), tup("d3", "y")]
        claims = claims_from_tuples(tuples, max_support=5)
        by_obj = {c.object: c.support_count for c in claims}
        assert by_obj == {"x": 2, "y": 1}
