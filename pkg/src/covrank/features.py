"""The six cheap per-document signals and the top-half baseline classifier.

Signals: document length, typed named-entity mention count, query-entity
saliency, BM25 relevance of the document to "<entity> <relation>", website
popularity rank, and Flesch reading ease.
"""

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import AliasTable, Corpus, Document, RELATION_TARGET_TYPE
from .errors import CovrankError
from .text import count_syllables, fold_tokens, sentences, tokenize

FEATURE_NAMES = ("doc_length", "ner_count", "entity_saliency", "bm25", "popularity", "flesch")


@dataclass
class FeatureVector:
    doc_length: int
    ner_count: int
    entity_saliency: int
    bm25: float
    popularity: float
    flesch: float

    def as_list(self) -> list[float]:
        return [float(getattr(self, name)) for name in FEATURE_NAMES]


class Bm25Index:
    """Okapi BM25 over case-folded tokens with k1=1.5, b=0.75 and the
    non-negative idf variant ln(1 + (N - df + 0.5) / (df + 0.5))."""

    def __init__(self, docs: dict[str, str], k1: float = 1.5, b: float = 0.75):
        if not docs:
            raise CovrankError("BM25 index needs at least one document")
        self.k1 = k1
        self.b = b
        self.term_freqs: dict[str, Counter] = {}
        self.doc_lens: dict[str, int] = {}
        df: Counter = Counter()
        for doc_id, text in docs.items():
            toks = fold_tokens(text)
            tf = Counter(toks)
            self.term_freqs[doc_id] = tf
            self.doc_lens[doc_id] = len(toks)
            df.update(tf.keys())
        self.df = dict(df)
        self.n_docs = len(docs)
        self.avgdl = sum(self.doc_lens.values()) / self.n_docs

    def idf(self, term: str) -> float:
        df = self.df.get(term, 0)
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def score(self, query_tokens: list[str], doc_id: str) -> float:
        if doc_id not in self.term_freqs:
            raise CovrankError(f"doc_id {doc_id!r} not in BM25 index")
        tf = self.term_freqs[doc_id]
        dl = self.doc_lens[doc_id]
        norm = self.k1 * (1.0 - self.b + self.b * dl / self.avgdl) if self.avgdl > 0 else self.k1
        total = 0.0
        for term in query_tokens:
            f = tf.get(term, 0)
            if f:
                total += self.idf(term) * f * (self.k1 + 1.0) / (f + norm)
        return total


class PopularityTable:
    """site_domain -> popularity rank (1 = most popular)."""

    def __init__(self, ranks: dict[str, int] | None = None):
        self.ranks = dict(ranks or {})
        for domain, rank in self.ranks.items():
            if rank < 1:
                raise CovrankError(f"rank for {domain!r} must be >= 1, got {rank}")

    @classmethod
    def load(cls, path: str | Path) -> "PopularityTable":
        ranks = {}
        with Path(path).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                domain, _, rank = line.partition("\t")
                ranks[domain] = int(rank)
        return cls(ranks)


def popularity(site_domain: str, table: PopularityTable) -> float:
    """Bounded monotone transform 1/ln(rank+1); 0 for unranked domains."""
    rank = table.ranks.get(site_domain)
    if rank is None:
        return 0.0
    return 1.0 / math.log(rank + 1.0)


_CAPITALIZED = re.compile(r"^\W*[A-Z]")


@dataclass
class MentionProvider:
    """Typed mention spans per document, or a capitalized-run fallback.

    In gold-file mode each document must have an entry; in heuristic mode the
    count is the number of maximal capitalized token runs, type-agnostic.
    """

    mode: str = "gold-file"
    spans: dict[str, list[tuple[int, int, str]]] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "MentionProvider":
        spans: dict[str, list[tuple[int, int, str]]] = {}
        with Path(path).open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                spans[record["doc_id"]] = [
                    (m["start"], m["end"], m["type"]) for m in record["mentions"]
                ]
        return cls(mode="gold-file", spans=spans)

    @classmethod
    def heuristic(cls) -> "MentionProvider":
        return cls(mode="heuristic")

    def mentions(self, doc: Document) -> list[tuple[int, int, str]]:
        if self.mode == "gold-file":
            if doc.doc_id not in self.spans:
                raise CovrankError(f"no gold mentions for doc_id {doc.doc_id!r}")
            return self.spans[doc.doc_id]
        return [(0, 0, "RUN")] * _capitalized_runs(doc.text)


def _capitalized_runs(text: str) -> int:
    runs = 0
    in_run = False
    for raw in text.split():
        if _CAPITALIZED.match(raw):
            if not in_run:
                runs += 1
            in_run = True
        else:
            in_run = False
    return runs


def doc_length(doc: Document) -> int:
    return doc.word_count


def ner_count(doc: Document, relation: str, provider: MentionProvider) -> int:
    """Mentions whose type matches the relation's target type (person or
    organization); in heuristic mode, the capitalized-run count."""
    if relation not in RELATION_TARGET_TYPE:
        raise CovrankError(f"unknown relation {relation!r}")
    mentions = provider.mentions(doc)
    if provider.mode == "heuristic":
        return len(mentions)
    target = RELATION_TARGET_TYPE[relation]
    return sum(1 for _, _, kind in mentions if kind == target)


def entity_saliency(doc: Document, aliases: list[str]) -> int:
    """Non-overlapping longest-match case-insensitive alias occurrences at
    token boundaries."""
    if not aliases:
        raise CovrankError("entity_saliency needs at least one alias")
    ordered = sorted(aliases, key=len, reverse=True)
    pattern = re.compile(
        r"(?<!\w)(?:" + "|".join(re.escape(a) for a in ordered) + r")(?!\w)",
        re.IGNORECASE,
    )
    return sum(1 for _ in pattern.finditer(doc.text))


def flesch(doc: Document) -> float:
    """Flesch reading ease over the shared tokenizer, sentence splitter, and
    vowel-group syllable counter."""
    words = tokenize(doc.text)
    sents = sentences(doc.text)
    if not words or not sents:
        raise CovrankError(f"flesch needs at least one word and one sentence (doc {doc.doc_id!r})")
    n_syllables = sum(count_syllables(w) for w in words)
    return 206.835 - 1.015 * (len(words) / len(sents)) - 84.6 * (n_syllables / len(words))


def relation_query(entity_id: str, relation: str) -> list[str]:
    """Case-folded query tokens for "<entity> <relation>", with the relation
    name split on hyphens so its words can match document text."""
    return fold_tokens(f"{entity_id} {relation.replace('-', ' ')}")


@dataclass
class FeatureConfig:
    aliases: AliasTable
    popularity: PopularityTable
    mentions: MentionProvider


def featurize(
    corpus: Corpus,
    entity_id: str,
    relation: str,
    config: FeatureConfig,
) -> dict[str, FeatureVector]:
    """All six signals for every document in the (entity, relation) pool.
    The BM25 index is built over the pool itself."""
    pool = corpus.documents_for_entity(entity_id)
    if not pool:
        raise CovrankError(f"no documents for entity {entity_id!r}")
    index = Bm25Index({d.doc_id: d.text for d in pool})
    query = relation_query(entity_id, relation)
    alias_list = config.aliases.aliases_for(entity_id)

    out: dict[str, FeatureVector] = {}
    for doc in pool:
        out[doc.doc_id] = FeatureVector(
            doc_length=doc_length(doc),
            ner_count=ner_count(doc, relation, config.mentions),
            entity_saliency=entity_saliency(doc, alias_list),
            bm25=index.score(query, doc.doc_id),
            popularity=popularity(doc.site_domain, config.popularity),
            flesch=flesch(doc),
        )
    return out


def heuristic_classifier(scores: dict[str, float]) -> dict[str, int]:
    """Label the top half by score as positive: sort by score descending with
    doc_id ascending tie-break, first ceil(n/2) get 1."""
    if not scores:
        raise CovrankError("heuristic_classifier needs at least one document")
    ranked = sorted(scores, key=lambda d: (-scores[d], d))
    cut = math.ceil(len(ranked) / 2)
    return {doc_id: int(i < cut) for i, doc_id in enumerate(ranked)}


def write_features(
    rows: list[tuple[str, str, str, FeatureVector]],
    path: str | Path,
) -> None:
    """rows: (doc_id, entity_id, relation, vector) per line of features.jsonl."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id, entity_id, relation, vec in rows:
            record = {"doc_id": doc_id, "entity_id": entity_id, "relation": relation}
            record.update({
                "doc_length": vec.doc_length,
                "ner_count": vec.ner_count,
                "entity_saliency": vec.entity_saliency,
                "bm25": vec.bm25,
                "popularity": vec.popularity,
                "flesch": vec.flesch,
            })
            fh.write(json.dumps(record) + "\n")


def read_features(path: str | Path) -> dict[tuple[str, str, str], FeatureVector]:
    out = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            r = json.loads(line)
            out[(r["doc_id"], r["entity_id"], r["relation"])] = FeatureVector(
                doc_length=r["doc_length"],
                ner_count=r["ner_count"],
                entity_saliency=r["entity_saliency"],
                bm25=r["bm25"],
                popularity=r["popularity"],
                flesch=r["flesch"],
            )
    return out
