"""covrank command line: synth, coverage, featurize, train, evaluate, rank,
budget, refute, embed-check.

Exit codes: 0 success, 1 domain error, 2 usage or I/O error. Logs go to
stderr (level via COVRANK_LOG); data goes to the --out targets only.
"""

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import apps, coverage as cov, features as feats, metrics, model as models, synthgen
from .corpus import (
    AliasTable, Corpus, GroundTruth, dedup_tuples, load_corpus, mask_with_numbers,
    read_tuples,
)
from .errors import CovrankError
from .features import (
    FEATURE_NAMES, FeatureConfig, MentionProvider, PopularityTable, ner_count,
)
from .vectorize import fit_vocabulary, load_embeddings, tfidf_vector, Vocabulary

log = logging.getLogger("covrank")

MODEL_KINDS = ("lr", "tfidf", "ngrams", "stacked", "herb")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, os.environ.get("COVRANK_LOG", "error").upper(), logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _check_inputs(args)
        return args.func(args)
    except CovrankError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _check_inputs(args) -> None:
    names = ["docs", "tuples", "gt", "aliases", "popularity", "mentions",
             "labels", "features", "embeddings"]
    if args.command != "train":  # train's --model is a kind name, not a path
        names.append("model")
    for name in names:
        path = getattr(args, name, None)
        if path is not None and not Path(path).exists():
            print(f"error: missing input file: {path}", file=sys.stderr)
            raise SystemExit(2)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covrank")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus with planted coverage")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-entities", type=int, default=10)
    p.add_argument("--docs-per-entity", type=int, default=20)
    p.add_argument("--gt-size", type=int, default=5)
    p.add_argument("--signal-strength", type=float, default=0.8)
    p.add_argument("--embedding-dim", type=int, default=32)
    p.add_argument("--embedding-signal", type=float, default=0.8)
    p.add_argument("--relation", default="founded-by")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("coverage", help="compute coverage, labels and splits")
    p.add_argument("--docs", required=True)
    p.add_argument("--tuples", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--variant", choices=("wiki", "web", "wikiweb"), default="web")
    p.add_argument("--aliases")
    p.add_argument("--relation")
    p.add_argument("--percentile", type=float, default=0.85)
    p.add_argument("--absolute", type=float, default=0.5)
    p.add_argument("--group-key", choices=cov.GROUP_KEYS, default="entity")
    p.add_argument("--ratios", default="0.7,0.1,0.2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--keep-degenerate", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("featurize", help="compute the six heuristic signals")
    p.add_argument("--docs", required=True)
    p.add_argument("--aliases")
    p.add_argument("--popularity")
    p.add_argument("--mentions")
    p.add_argument("--relation", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("train", help="train a coverage classifier")
    p.add_argument("--model", required=True,
                   help="lr|tfidf|ngrams|stacked|herb|heuristic:<name>")
    p.add_argument("--labels", required=True)
    p.add_argument("--features")
    p.add_argument("--docs")
    p.add_argument("--mentions")
    p.add_argument("--embeddings")
    p.add_argument("--relation")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--learning-rate", type=float, default=1e-5)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a split and emit report.json")
    p.add_argument("--model", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--features")
    p.add_argument("--docs")
    p.add_argument("--mentions")
    p.add_argument("--embeddings")
    p.add_argument("--relation")
    p.add_argument("--split", choices=cov.SPLITS, default="test")
    p.add_argument("--method")
    p.add_argument("--ndcg-k", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("rank", help="rank one (entity, relation) document pool")
    p.add_argument("--method", choices=apps.RANKING_METHODS, required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--entity", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--labels", help="labels.jsonl with gold coverage (oracle)")
    p.add_argument("--model")
    p.add_argument("--features")
    p.add_argument("--mentions")
    p.add_argument("--embeddings")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("budget", help="simulate extraction under a time budget")
    p.add_argument("--policy", choices=("baseline_random", "prioritized"), required=True)
    p.add_argument("--budget-seconds", type=float, required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--tuples", required=True)
    p.add_argument("--mentions", required=True)
    p.add_argument("--relation", required=True)
    p.add_argument("--model")
    p.add_argument("--features")
    p.add_argument("--embeddings")
    p.add_argument("--oracle-labels", help="use gold coverage from labels.jsonl as scores")
    p.add_argument("--predictor-seconds", type=float, default=2.0)
    p.add_argument("--extractor-seconds", type=float, default=13.6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_budget)

    p = sub.add_parser("refute", help="flag dubious low-support claims")
    p.add_argument("--tuples", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--max-support", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--relation")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_refute)

    p = sub.add_parser("embed-check", help="validate an embedding file")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--docs")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_embed_check)

    return parser


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_synth(args) -> int:
    config = synthgen.SynthConfig(
        n_entities=args.n_entities,
        docs_per_entity=args.docs_per_entity,
        gt_size=args.gt_size,
        signal_strength=args.signal_strength,
        embedding_dimension=args.embedding_dim,
        embedding_signal=args.embedding_signal,
        seed=args.seed,
        relation=args.relation,
    )
    result = synthgen.generate(config)
    synthgen.write_outputs(result, args.out, args.relation)
    log.info("wrote synthetic corpus with %d documents to %s",
             len(result.corpus.documents), args.out)
    return 0


def _parse_ratios(raw: str) -> tuple[float, float, float]:
    parts = raw.split(",")
    if len(parts) != 3:
        raise CovrankError(f"ratios must be three comma-separated numbers, got {raw!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def _cmd_coverage(args) -> int:
    corpus = load_corpus(args.docs, args.tuples, args.gt)
    aliases = AliasTable.load(args.aliases) if args.aliases else AliasTable()
    tuples = dedup_tuples(corpus.tuples, aliases)
    ground_truths = {
        key: GroundTruth(gt.entity_id, gt.relation, gt.variant,
                         {aliases.canon(o) for o in gt.objects})
        for key, gt in corpus.ground_truths.items()
    }
    corpus = Corpus(corpus.documents, tuples, ground_truths)

    extracted: dict[tuple[str, str, str], set[str]] = {}
    for t in tuples:
        extracted.setdefault((t.doc_id, t.subject, t.relation), set()).add(t.object)

    labeled: list[cov.LabeledDocument] = []
    for entity_id in corpus.entity_ids():
        pool = corpus.documents_for_entity(entity_id)
        relations = sorted({
            r for (e, r, v) in corpus.ground_truths if e == entity_id and v == args.variant
        })
        for relation in relations:
            if args.relation and relation != args.relation:
                continue
            gt = corpus.ground_truth(entity_id, relation, args.variant)
            records = []
            for doc in pool:
                rec = cov.compute_coverage(
                    extracted.get((doc.doc_id, entity_id, relation), set()), gt, doc.doc_id
                )
                if rec.degenerate and not args.keep_degenerate:
                    continue
                records.append(rec)
            if records:
                labeled.extend(cov.binarize(records, args.percentile, args.absolute))

    if not labeled:
        raise CovrankError("no labeled documents produced; check --variant/--relation")
    assignment = cov.split(
        corpus, labeled, _parse_ratios(args.ratios), args.group_key, args.seed
    )
    cov.write_labels(labeled, assignment, args.out)
    log.info("wrote %d labels to %s", len(labeled), args.out)
    return 0


def _cmd_featurize(args) -> int:
    corpus = load_corpus(args.docs)
    config = FeatureConfig(
        aliases=AliasTable.load(args.aliases) if args.aliases else AliasTable(),
        popularity=PopularityTable.load(args.popularity) if args.popularity else PopularityTable(),
        mentions=MentionProvider.from_file(args.mentions) if args.mentions
        else MentionProvider.heuristic(),
    )
    rows = []
    for entity_id in corpus.entity_ids():
        vectors = feats.featurize(corpus, entity_id, args.relation, config)
        for doc in corpus.documents_for_entity(entity_id):
            rows.append((doc.doc_id, entity_id, args.relation, vectors[doc.doc_id]))
    feats.write_features(rows, args.out)
    log.info("wrote %d feature rows to %s", len(rows), args.out)
    return 0


def _load_mention_spans(path: str | None) -> dict[str, list[tuple[int, int]]]:
    if not path:
        return {}
    provider = MentionProvider.from_file(path)
    return {doc_id: [(s, e) for s, e, _ in spans] for doc_id, spans in provider.spans.items()}


def _masked_text(doc, spans_by_doc) -> str:
    return mask_with_numbers(doc.text, spans_by_doc.get(doc.doc_id, []))


def _read_rows(args):
    rows = cov.read_labels(args.labels)
    if args.relation:
        rows = [r for r in rows if r["relation"] == args.relation]
    if not rows:
        raise CovrankError("no label rows selected")
    return rows


def _heuristic_matrix(rows, features_map):
    matrix = []
    for r in rows:
        key = (r["doc_id"], r["entity_id"], r["relation"])
        if key not in features_map:
            raise CovrankError(f"features.jsonl has no row for {key}")
        matrix.append(features_map[key].as_list())
    return np.asarray(matrix, dtype=float)


def _require_flags(args, names: list[str], context: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        print(f"error: {context} requires {', '.join(missing)}", file=sys.stderr)
        raise SystemExit(2)


def _train_config(args) -> models.TrainConfig:
    return models.TrainConfig(
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        l2_penalty=args.l2,
        seed=args.seed,
    )


def _cmd_train(args) -> int:
    kind = args.model
    if kind.startswith("heuristic:"):
        feature = kind.split(":", 1)[1]
        if feature not in FEATURE_NAMES:
            print(f"error: unknown heuristic {feature!r}; choose from {FEATURE_NAMES}",
                  file=sys.stderr)
            raise SystemExit(2)
        data = {"kind": "heuristic", "feature": feature, "threshold": 0.5,
                "relation": args.relation, "masking": False}
        _write_json(args.out, data)
        return 0
    if kind not in MODEL_KINDS:
        print(f"error: unknown model kind {kind!r}", file=sys.stderr)
        raise SystemExit(2)
    if kind == "herb":
        _require_flags(args, ["embeddings", "features"], "--model herb")
    if kind in ("lr", "stacked"):
        _require_flags(args, ["features"], f"--model {kind}")
    if kind in ("tfidf", "ngrams", "stacked"):
        _require_flags(args, ["docs"], f"--model {kind}")

    rows = _read_rows(args)
    train_rows = [r for r in rows if r["split"] == "train"]
    val_rows = [r for r in rows if r["split"] == "validation"]
    if not train_rows:
        raise CovrankError("no training rows in labels file")
    train_labeled = [
        cov.LabeledDocument(r["doc_id"], r["entity_id"], r["relation"], r["label"], r["coverage"])
        for r in train_rows
    ]
    balanced = cov.undersample(train_labeled, seed=args.seed)
    balanced_rows = [
        {"doc_id": d.doc_id, "entity_id": d.entity_id, "relation": d.relation, "label": d.label}
        for d in balanced
    ]
    y = np.asarray([d.label for d in balanced], dtype=float)
    config = _train_config(args)

    features_map = feats.read_features(args.features) if args.features else {}
    corpus = load_corpus(args.docs) if args.docs else None
    spans_by_doc = _load_mention_spans(args.mentions)
    masking = bool(args.mentions)

    data: dict = {"relation": args.relation, "masking": masking}
    if kind == "lr":
        H = _heuristic_matrix(balanced_rows, features_map)
        trained = models.train_lr(H, y, config)
        data["input"] = "heuristics"
    elif kind in ("tfidf", "ngrams"):
        max_n = 1 if kind == "tfidf" else 3
        texts = [_masked_text(corpus.document(r["doc_id"]), spans_by_doc)
                 for r in balanced_rows]
        vocab = fit_vocabulary(texts, max_n=max_n, min_df=args.min_df)
        vectors = [tfidf_vector(t, vocab) for t in texts]
        trained = models.train_lr_sparse(vectors, y, config, len(vocab))
        data["input"] = kind
        data["vocab"] = vocab.to_json()
    elif kind == "stacked":
        H = _heuristic_matrix(balanced_rows, features_map)
        texts = [_masked_text(corpus.document(r["doc_id"]), spans_by_doc)
                 for r in balanced_rows]
        vocab = fit_vocabulary(texts, max_n=1, min_df=args.min_df)
        vectors = [tfidf_vector(t, vocab) for t in texts]
        trained = models.train_stacked(vectors, H, y, config, len(vocab))
        data["input"] = "stacked"
        data["vocab"] = vocab.to_json()
    else:  # herb
        H = _heuristic_matrix(balanced_rows, features_map)
        store = load_embeddings(args.embeddings)
        doc_ids = [r["doc_id"] for r in balanced_rows]
        trained = models.train_herb(store, doc_ids, H, y, config)
        data["input"] = "herb"

    data.update(models.model_to_json(trained))

    if val_rows and any(r["label"] == 1 for r in val_rows):
        scores = _score_rows(data, val_rows, corpus, features_map, args)
        items = [metrics.ScoredLabel(r["doc_id"], s, r["label"])
                 for r, s in zip(val_rows, scores)]
        data["threshold"] = metrics.optimal_f1(items).threshold
    _write_json(args.out, data)
    log.info("trained %s model on %d samples -> %s", kind, len(y), args.out)
    return 0


def _score_rows(data: dict, rows, corpus, features_map, args) -> list[float]:
    """Scores under a serialized model for labels.jsonl rows."""
    kind = data["kind"]
    if kind == "heuristic":
        feature = data["feature"]
        if not features_map:
            raise CovrankError("heuristic scoring needs --features")
        return [
            float(getattr(features_map[(r["doc_id"], r["entity_id"], r["relation"])], feature))
            for r in rows
        ]

    trained = models.model_from_json(data)
    if data.get("masking") and not getattr(args, "mentions", None):
        print("error: model was trained with masking; pass --mentions", file=sys.stderr)
        raise SystemExit(2)
    spans_by_doc = _load_mention_spans(getattr(args, "mentions", None))

    if data.get("input") == "heuristics":
        H = _heuristic_matrix(rows, features_map)
        return [float(p) for p in trained.predict_batch(H)]
    if data.get("input") in ("tfidf", "ngrams"):
        if corpus is None:
            raise CovrankError("tfidf scoring needs --docs")
        vocab = Vocabulary.from_json(data["vocab"])
        return [
            trained.predict_sparse(
                tfidf_vector(_masked_text(corpus.document(r["doc_id"]), spans_by_doc), vocab))
            for r in rows
        ]
    if data.get("input") == "stacked":
        if corpus is None:
            raise CovrankError("stacked scoring needs --docs")
        vocab = Vocabulary.from_json(data["vocab"])
        H = _heuristic_matrix(rows, features_map)
        out = []
        for r, h in zip(rows, H):
            vec = tfidf_vector(_masked_text(corpus.document(r["doc_id"]), spans_by_doc), vocab)
            out.append(trained.predict(vec, h))
        return out
    if data.get("input") == "herb":
        embeddings_path = getattr(args, "embeddings", None)
        if not embeddings_path:
            print("error: --model herb requires --embeddings", file=sys.stderr)
            raise SystemExit(2)
        store = load_embeddings(embeddings_path)
        H = _heuristic_matrix(rows, features_map)
        return [
            trained.predict(store.get(r["doc_id"]), h) for r, h in zip(rows, H)
        ]
    raise CovrankError(f"cannot score model input {data.get('input')!r}")


def _cmd_evaluate(args) -> int:
    data = json.loads(Path(args.model).read_text())
    rows = [r for r in _read_rows(args) if r["split"] == args.split]
    if not rows:
        raise CovrankError(f"no rows in split {args.split!r}")
    features_map = feats.read_features(args.features) if args.features else {}
    corpus = load_corpus(args.docs) if args.docs else None
    scores = _score_rows(data, rows, corpus, features_map, args)
    items = [metrics.ScoredLabel(r["doc_id"], s, r["label"]) for r, s in zip(rows, scores)]

    best = metrics.optimal_f1(items)
    ranked = sorted(items, key=lambda it: (-it.score, it.doc_id))
    ndcg_value = metrics.ndcg([float(it.label) for it in ranked], args.ndcg_k)

    report = {
        "relation": args.relation or "all",
        "method": args.method or data.get("input") or data["kind"],
        "optimal_f1": best.f1,
        "threshold": best.threshold,
        "precision": best.precision,
        "recall": best.recall,
        "ndcg": ndcg_value,
        "n_test": len(items),
    }
    _write_json(args.out, report)
    log.info("evaluate %s on %s: optimal F1 %.4f", report["method"], args.split, best.f1)
    return 0


def _cmd_rank(args) -> int:
    corpus = load_corpus(args.docs)
    pool = [d.doc_id for d in corpus.documents_for_entity(args.entity)]
    if not pool:
        raise CovrankError(f"no documents for entity {args.entity!r}")

    kwargs: dict = {"seed": args.seed}
    scores: dict[str, float] = {}
    if args.method == "ir_bm25":
        index = feats.Bm25Index({
            d.doc_id: d.text for d in corpus.documents_for_entity(args.entity)
        })
        query = feats.relation_query(args.entity, args.relation)
        scores = {doc_id: index.score(query, doc_id) for doc_id in pool}
        kwargs["bm25_scores"] = scores
    elif args.method == "coverage_oracle":
        _require_flags(args, ["labels"], "--method coverage_oracle")
        rows = cov.read_labels(args.labels)
        scores = {
            r["doc_id"]: r["coverage"] for r in rows
            if r["entity_id"] == args.entity and r["relation"] == args.relation
        }
        missing = [d for d in pool if d not in scores]
        if missing:
            raise CovrankError(
                "oracle ranking lacks gold coverage for: " + ", ".join(sorted(missing))
            )
        kwargs["gold_coverage"] = scores
    elif args.method == "coverage_prediction":
        _require_flags(args, ["model"], "--method coverage_prediction")
        data = json.loads(Path(args.model).read_text())
        features_map = feats.read_features(args.features) if args.features else {}
        rows = [
            {"doc_id": doc_id, "entity_id": args.entity, "relation": args.relation}
            for doc_id in pool
        ]
        values = _score_rows(data, rows, corpus, features_map, args)
        scores = dict(zip(pool, values))
        kwargs["predicted_scores"] = scores

    ranked = apps.rank_documents(pool, args.method, **kwargs)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "doc_id", "method", "score"])
        for position, doc_id in enumerate(ranked, start=1):
            writer.writerow([position, doc_id, args.method, scores.get(doc_id, 0.0)])
    return 0


def _cmd_budget(args) -> int:
    corpus = load_corpus(args.docs, args.tuples)
    provider = MentionProvider.from_file(args.mentions)
    doc_lengths = {d.doc_id: d.word_count for d in corpus.documents}
    # extraction cost follows the mentions the extractor pairs up for this
    # relation: the target-typed ones
    mention_counts = {
        d.doc_id: ner_count(d, args.relation, provider) for d in corpus.documents
    }
    cost = apps.CostModel.calibrate(
        list(doc_lengths.values()),
        list(mention_counts.values()),
        args.predictor_seconds,
        args.extractor_seconds,
    )

    predicted: dict[str, float] | None = None
    if args.policy == "prioritized":
        if args.oracle_labels:
            if not Path(args.oracle_labels).exists():
                print(f"error: missing input file: {args.oracle_labels}", file=sys.stderr)
                raise SystemExit(2)
            predicted = {
                r["doc_id"]: r["coverage"] for r in cov.read_labels(args.oracle_labels)
            }
        else:
            _require_flags(args, ["model", "features", "relation"], "--policy prioritized")
            data = json.loads(Path(args.model).read_text())
            features_map = feats.read_features(args.features)
            rows = [
                {"doc_id": d.doc_id, "entity_id": d.entity_id, "relation": args.relation}
                for d in corpus.documents
            ]
            values = _score_rows(data, rows, corpus, features_map, args)
            predicted = {r["doc_id"]: v for r, v in zip(rows, values)}

    tuples_by_doc: dict[str, list] = {}
    for t in corpus.tuples:
        tuples_by_doc.setdefault(t.doc_id, []).append(t)

    totals = {"re_count": 0, "docs_processed": 0, "seconds_used": 0.0}
    for entity_id in corpus.entity_ids():
        pool = [d.doc_id for d in corpus.documents_for_entity(entity_id)]
        result = apps.simulate_budget(
            pool, tuples_by_doc, doc_lengths, mention_counts, cost,
            args.budget_seconds, args.policy, seed=args.seed,
            predicted_scores=predicted,
        )
        totals["re_count"] += result.re_count
        totals["docs_processed"] += result.docs_processed
        totals["seconds_used"] += result.seconds_used

    report = {
        "policy": args.policy,
        "budget_s": args.budget_seconds,
        "re_count": totals["re_count"],
        "docs_processed": totals["docs_processed"],
        "seconds_used": totals["seconds_used"],
    }
    _write_json(args.out, report)
    return 0


def _cmd_refute(args) -> int:
    corpus_rows = cov.read_labels(args.labels)
    coverage_by_doc = {
        (r["doc_id"], r["entity_id"], r["relation"]): r["coverage"] for r in corpus_rows
    }
    tuples = read_tuples(args.tuples)
    if args.relation:
        tuples = [t for t in tuples if t.relation == args.relation]
    claims = apps.claims_from_tuples(tuples, args.max_support)
    reports = apps.refute_claims(claims, coverage_by_doc, args.threshold)
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write(json.dumps({
                "subject": rep.claim.subject,
                "relation": rep.claim.relation,
                "object": rep.claim.object,
                "support_count": rep.claim.support_count,
                "supporting_doc_ids": sorted(rep.claim.supporting_doc_ids),
                "max_nonexpressing_coverage": rep.max_nonexpressing_coverage,
                "verdict": rep.verdict,
            }) + "\n")
    log.info("wrote %d refutation reports to %s", len(reports), args.out)
    return 0


def _cmd_embed_check(args) -> int:
    store = load_embeddings(args.embeddings)
    matches = None
    if args.docs:
        corpus = load_corpus(args.docs)
        corpus_ids = {d.doc_id for d in corpus.documents}
        matches = corpus_ids == set(store.vectors)
    log.info("embedding file: %d records, dimension %d", len(store), store.dimension)
    print(f"count={len(store)} dimension={store.dimension}"
          + ("" if matches is None else f" matches_corpus={matches}"),
          file=sys.stderr)
    if args.out:
        _write_json(args.out, {
            "count": len(store), "dimension": store.dimension, "matches_corpus": matches,
        })
    if matches is False:
        raise CovrankError("embedding doc_ids do not match the corpus")
    return 0


def _write_json(path: str | Path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


if __name__ == "__main__":
    sys.exit(main())
