"""Data model and ingestion: documents, extraction tuples, ground-truth
object sets, alias canonicalization, and entity/number masking."""

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CovrankError, ParseError
from .text import normalize_phrase, phrase_token_set, word_count

RELATIONS = (
    "member-of",
    "family",
    "edu-at",
    "position-held",
    "partner-org",
    "founded-by",
    "ceo",
    "board-member",
)

# Target mention type for the NER-frequency signal.
RELATION_TARGET_TYPE = {
    "family": "PER",
    "founded-by": "PER",
    "ceo": "PER",
    "board-member": "PER",
    "position-held": "PER",
    "member-of": "ORG",
    "edu-at": "ORG",
    "partner-org": "ORG",
}

GT_VARIANTS = ("wiki", "web", "wikiweb")

ENTITY_MASK = "[ENT]"
NUMBER_MASK = "[NUM]"


@dataclass
class Document:
    doc_id: str
    entity_id: str
    url: str
    site_domain: str
    text: str
    word_count: int = -1

    def __post_init__(self):
        if self.word_count < 0:
            self.word_count = word_count(self.text)


@dataclass(frozen=True)
class ExtractionTuple:
    doc_id: str
    subject: str
    relation: str
    object: str
    confidence: float = 1.0

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise CovrankError(f"unknown relation {self.relation!r}")
        if not self.subject or not self.object:
            raise CovrankError("tuple subject/object must be non-empty")

    def key(self) -> tuple[str, str, str, str]:
        return (self.doc_id, self.subject, self.relation, self.object)


class AliasTable:
    """Maps surface forms to canonical identifiers.

    Unknown forms canonicalize to their case-folded, whitespace-collapsed
    selves, so canon is idempotent by construction.
    """

    def __init__(self, canonical_aliases: dict[str, list[str]] | None = None):
        self._canon: dict[str, str] = {}
        self._aliases: dict[str, list[str]] = {}
        for canonical, aliases in (canonical_aliases or {}).items():
            self.add(canonical, aliases)

    def add(self, canonical: str, aliases: list[str]) -> None:
        self._canon[normalize_phrase(canonical)] = canonical
        for a in aliases:
            self._canon[normalize_phrase(a)] = canonical
        seen = self._aliases.setdefault(canonical, [canonical])
        for a in aliases:
            if a not in seen:
                seen.append(a)

    def canon(self, surface: str) -> str:
        folded = normalize_phrase(surface)
        return self._canon.get(folded, folded)

    def aliases_for(self, entity_id: str) -> list[str]:
        return list(self._aliases.get(entity_id, [entity_id]))

    @classmethod
    def load(cls, path: str | Path) -> "AliasTable":
        table = cls()
        for line_no, record in _read_jsonl(path):
            canonical = _require(record, "canonical", str, path, line_no)
            aliases = record.get("aliases", [])
            if not isinstance(aliases, list):
                raise ParseError(path, line_no, "aliases must be a list")
            table.add(canonical, [str(a) for a in aliases])
        return table


@dataclass
class GroundTruth:
    entity_id: str
    relation: str
    variant: str
    objects: set[str] = field(default_factory=set)

    def __post_init__(self):
        if self.variant not in GT_VARIANTS:
            raise CovrankError(f"unknown GT variant {self.variant!r}")
        self.objects = set(self.objects)


@dataclass
class Corpus:
    documents: list[Document] = field(default_factory=list)
    tuples: list[ExtractionTuple] = field(default_factory=list)
    ground_truths: dict[tuple[str, str, str], GroundTruth] = field(default_factory=dict)

    def __post_init__(self):
        self._by_id: dict[str, Document] = {}
        for doc in self.documents:
            if doc.doc_id in self._by_id:
                raise CovrankError(f"duplicate doc_id {doc.doc_id!r}")
            self._by_id[doc.doc_id] = doc
        for tup in self.tuples:
            if tup.doc_id not in self._by_id:
                raise CovrankError(f"tuple references unknown doc_id {tup.doc_id!r}")

    def document(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise CovrankError(f"unknown doc_id {doc_id!r}") from None

    def has_document(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def documents_for_entity(self, entity_id: str) -> list[Document]:
        return [d for d in self.documents if d.entity_id == entity_id]

    def entity_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for d in self.documents:
            seen.setdefault(d.entity_id)
        return list(seen)

    def tuples_for_doc(self, doc_id: str, relation: str | None = None) -> list[ExtractionTuple]:
        return [
            t for t in self.tuples
            if t.doc_id == doc_id and (relation is None or t.relation == relation)
        ]

    def ground_truth(self, entity_id: str, relation: str, variant: str) -> GroundTruth | None:
        return self.ground_truths.get((entity_id, relation, variant))


def _read_jsonl(path: str | Path):
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(path, line_no, "record is not a JSON object")
            yield line_no, record


def _require(record: dict, key: str, kind, path, line_no):
    if key not in record:
        raise ParseError(path, line_no, f"missing field {key!r}")
    value = record[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ParseError(path, line_no, f"field {key!r} has wrong type")
    return value


def load_corpus(
    documents_path: str | Path,
    tuples_path: str | Path | None = None,
    gt_path: str | Path | None = None,
) -> Corpus:
    """Load a corpus from the JSONL file trio. Raises on parse errors,
    duplicate doc ids, and tuples referencing unknown documents."""
    documents = []
    seen_ids = set()
    for line_no, record in _read_jsonl(documents_path):
        doc = Document(
            doc_id=_require(record, "doc_id", str, documents_path, line_no),
            entity_id=_require(record, "entity_id", str, documents_path, line_no),
            url=record.get("url", ""),
            site_domain=record.get("site_domain", ""),
            text=_require(record, "text", str, documents_path, line_no),
        )
        if doc.doc_id in seen_ids:
            raise ParseError(documents_path, line_no, f"duplicate doc_id {doc.doc_id!r}")
        seen_ids.add(doc.doc_id)
        documents.append(doc)

    tuples = []
    if tuples_path is not None:
        for line_no, record in _read_jsonl(tuples_path):
            try:
                tup = ExtractionTuple(
                    doc_id=_require(record, "doc_id", str, tuples_path, line_no),
                    subject=_require(record, "subject", str, tuples_path, line_no),
                    relation=_require(record, "relation", str, tuples_path, line_no),
                    object=_require(record, "object", str, tuples_path, line_no),
                    confidence=float(record.get("confidence", 1.0)),
                )
            except CovrankError as exc:
                raise ParseError(tuples_path, line_no, str(exc)) from exc
            if tup.doc_id not in seen_ids:
                raise ParseError(
                    tuples_path, line_no,
                    f"tuple references unknown doc_id {tup.doc_id!r}",
                )
            tuples.append(tup)

    ground_truths: dict[tuple[str, str, str], GroundTruth] = {}
    if gt_path is not None:
        for line_no, record in _read_jsonl(gt_path):
            try:
                gt = GroundTruth(
                    entity_id=_require(record, "entity_id", str, gt_path, line_no),
                    relation=_require(record, "relation", str, gt_path, line_no),
                    variant=_require(record, "variant", str, gt_path, line_no),
                    objects=set(_require(record, "objects", list, gt_path, line_no)),
                )
            except CovrankError as exc:
                raise ParseError(gt_path, line_no, str(exc)) from exc
            ground_truths[(gt.entity_id, gt.relation, gt.variant)] = gt

    return Corpus(documents=documents, tuples=tuples, ground_truths=ground_truths)


def save_corpus(
    corpus: Corpus,
    documents_path: str | Path,
    tuples_path: str | Path | None = None,
    gt_path: str | Path | None = None,
) -> None:
    """Inverse of load_corpus; load(save(c)) is structurally equal to c."""
    with Path(documents_path).open("w", encoding="utf-8") as fh:
        for d in corpus.documents:
            fh.write(json.dumps({
                "doc_id": d.doc_id,
                "entity_id": d.entity_id,
                "url": d.url,
                "site_domain": d.site_domain,
                "text": d.text,
            }, ensure_ascii=False) + "\n")
    if tuples_path is not None:
        with Path(tuples_path).open("w", encoding="utf-8") as fh:
            for t in corpus.tuples:
                fh.write(json.dumps({
                    "doc_id": t.doc_id,
                    "subject": t.subject,
                    "relation": t.relation,
                    "object": t.object,
                    "confidence": t.confidence,
                }, ensure_ascii=False) + "\n")
    if gt_path is not None:
        with Path(gt_path).open("w", encoding="utf-8") as fh:
            for gt in corpus.ground_truths.values():
                fh.write(json.dumps({
                    "entity_id": gt.entity_id,
                    "relation": gt.relation,
                    "variant": gt.variant,
                    "objects": sorted(gt.objects),
                }, ensure_ascii=False) + "\n")


def read_tuples(path: str | Path) -> list[ExtractionTuple]:
    """Read a tuples.jsonl file on its own, without document validation."""
    tuples = []
    for line_no, record in _read_jsonl(path):
        try:
            tuples.append(ExtractionTuple(
                doc_id=_require(record, "doc_id", str, path, line_no),
                subject=_require(record, "subject", str, path, line_no),
                relation=_require(record, "relation", str, path, line_no),
                object=_require(record, "object", str, path, line_no),
                confidence=float(record.get("confidence", 1.0)),
            ))
        except CovrankError as exc:
            raise ParseError(path, line_no, str(exc)) from exc
    return tuples


def dedup_tuples(tuples: list[ExtractionTuple], aliases: AliasTable) -> list[ExtractionTuple]:
    """Canonicalize subjects/objects and collapse exact duplicate rows,
    keeping the maximum confidence. Idempotent; preserves first-seen order."""
    merged: dict[tuple[str, str, str, str], ExtractionTuple] = {}
    for t in tuples:
        canon = ExtractionTuple(
            doc_id=t.doc_id,
            subject=aliases.canon(t.subject),
            relation=t.relation,
            object=aliases.canon(t.object),
            confidence=t.confidence,
        )
        prev = merged.get(canon.key())
        if prev is None or canon.confidence > prev.confidence:
            merged[canon.key()] = canon
    return list(merged.values())


def build_gt_web(corpus: Corpus, entity_id: str, relation: str) -> GroundTruth:
    """Frequency-filtered ground truth from corpus-wide extractions.

    An object qualifies when it appears in at least 5% of the entity's
    documents, or its document frequency is at least a fifth of the highest
    document frequency for the (entity, relation) pair.
    """
    docs = corpus.documents_for_entity(entity_id)
    if not docs:
        raise CovrankError(f"no documents for entity {entity_id!r}")
    n_docs = len(docs)

    doc_sets: dict[str, set[str]] = {}
    for t in corpus.tuples:
        if t.subject == entity_id and t.relation == relation:
            doc_sets.setdefault(t.object, set()).add(t.doc_id)
    docfreq = {obj: len(ids) for obj, ids in doc_sets.items()}

    objects: set[str] = set()
    if docfreq:
        max_freq = max(docfreq.values())
        for obj, freq in docfreq.items():
            if freq >= 0.05 * n_docs or freq >= max_freq / 5:
                objects.add(obj)
    return GroundTruth(entity_id=entity_id, relation=relation, variant="web", objects=objects)


def merge_gt(gt_a: GroundTruth, gt_b: GroundTruth, similarity_threshold: float = 0.5) -> GroundTruth:
    """Union of two ground truths with near-duplicate objects identified.

    Two objects merge when their normalized strings are equal or their
    punctuation-stripped token sets have Jaccard >= similarity_threshold;
    the lexicographically smaller form is kept.
    """
    if (gt_a.entity_id, gt_a.relation) != (gt_b.entity_id, gt_b.relation):
        raise CovrankError(
            f"cannot merge ground truths for ({gt_a.entity_id}, {gt_a.relation}) "
            f"and ({gt_b.entity_id}, {gt_b.relation})"
        )

    kept: list[tuple[str, str, frozenset[str]]] = []  # (object, normalized, token set)
    for obj in sorted(gt_a.objects | gt_b.objects):
        norm = normalize_phrase(obj)
        toks = phrase_token_set(obj)
        duplicate = False
        for _, kept_norm, kept_toks in kept:
            if norm == kept_norm or _jaccard(toks, kept_toks) >= similarity_threshold:
                duplicate = True
                break
        if not duplicate:
            kept.append((obj, norm, toks))
    return GroundTruth(
        entity_id=gt_a.entity_id,
        relation=gt_a.relation,
        variant="wikiweb",
        objects={obj for obj, _, _ in kept},
    )


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def mask_with_numbers(text: str, entity_mentions: list[tuple[int, int]]) -> str:
    """mask_text with number spans found by regex; digit runs inside an
    entity mention are masked as part of the entity."""
    from .text import number_spans as find_numbers

    numbers = [
        (s, e) for s, e in find_numbers(text)
        if not any(s < me and ms < e for ms, me in entity_mentions)
    ]
    return mask_text(text, entity_mentions, numbers)


def mask_text(
    text: str,
    entity_mentions: list[tuple[int, int]],
    number_spans: list[tuple[int, int]],
) -> str:
    """Replace entity spans with [ENT] and number spans with [NUM].

    Spans fully contained in a longer span are dropped (longest match wins);
    any remaining partial overlap is an error, as is any out-of-bounds span.
    """
    spans = [(s, e, ENTITY_MASK) for s, e in entity_mentions]
    spans += [(s, e, NUMBER_MASK) for s, e in number_spans]
    for start, end, _ in spans:
        if start < 0 or end > len(text) or start >= end:
            raise CovrankError(f"span ({start}, {end}) out of bounds for text of length {len(text)}")

    # Longest-match resolution: sort longest-first, drop contained spans.
    resolved: list[tuple[int, int, str]] = []
    for start, end, token in sorted(spans, key=lambda s: (-(s[1] - s[0]), s[0], s[2])):
        contained = any(ks <= start and end <= ke for ks, ke, _ in resolved)
        if not contained:
            resolved.append((start, end, token))

    resolved.sort()
    for (s1, e1, _), (s2, e2, _) in zip(resolved, resolved[1:]):
        if s2 < e1:
            raise CovrankError(f"overlapping spans ({s1}, {e1}) and ({s2}, {e2})")

    out = []
    cursor = 0
    for start, end, token in resolved:
        out.append(text[cursor:start])
        out.append(token)
        cursor = end
    out.append(text[cursor:])
    return "".join(out)
