"""Seeded synthetic-corpus generator with a planted coverage signal.

Every document gets a target coverage drawn from a bimodal prior (22.6% mass
near high coverage, mirroring the observed informative share) and embeds
exactly that fraction of its ground-truth objects, so empirical coverage
equals the planted value. Document length, entity saliency, typed-mention
count, lexical cues, site popularity, and the document embedding all
correlate with the planted coverage in proportion to the strength knobs;
at strength zero they are independent noise.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (
    Corpus, Document, ExtractionTuple, GroundTruth, RELATION_TARGET_TYPE,
)
from .errors import CovrankError
from .vectorize import EmbeddingStore, write_embeddings

INFORMATIVE_MASS = 0.226

# Lexical cues planted in proportion to coverage, each with its own noise
# draw so bag-of-words models can average several weak channels. None overlap
# the ranking query tokens, so BM25 sees coverage only through entity-mention
# frequency.
CUE_WORDS = (
    "creator", "pioneer", "established", "launched", "origin",
    "history", "leadership", "overview",
)

# Any one planted feature channel keeps this much of the strength knob; the
# rest is per-channel noise. Single heuristics stay mediocre predictors while
# models that pool several channels (or the embedding) do well.
CHANNEL_ATTENUATION = 0.5

N_SITES = 40
NOISE_VOCAB = 400


@dataclass
class SynthConfig:
    n_entities: int = 10
    docs_per_entity: int = 20
    gt_size: int = 5
    signal_strength: float = 0.8
    embedding_dimension: int = 32
    embedding_signal: float = 0.8
    seed: int = 0
    relation: str = "founded-by"

    def __post_init__(self):
        if min(self.n_entities, self.docs_per_entity, self.gt_size,
               self.embedding_dimension) < 1:
            raise CovrankError("synth counts must be positive")
        for knob in (self.signal_strength, self.embedding_signal):
            if not 0.0 <= knob <= 1.0:
                raise CovrankError("strength knobs must be in [0, 1]")
        if self.relation not in RELATION_TARGET_TYPE:
            raise CovrankError(f"unknown relation {self.relation!r}")


@dataclass
class PlantedDoc:
    coverage: float
    entity_mentions: int
    typed_mentions: int
    cue_words: int
    noise_words: int
    site_rank: int


@dataclass
class SynthResult:
    corpus: Corpus
    gold_coverage: dict[str, float]  # doc_id -> planted coverage
    planted: dict[str, PlantedDoc]
    embeddings: EmbeddingStore
    mentions: dict[str, list[tuple[int, int, str]]]
    popularity_ranks: dict[str, int]
    aliases: dict[str, list[str]] = field(default_factory=dict)


def _mix(rng, strength: float, coverage: float) -> float:
    """Signal knob: strength 1 tracks coverage exactly, strength 0 is noise."""
    return strength * coverage + (1.0 - strength) * rng.random()


def generate(config: SynthConfig) -> SynthResult:
    rng = np.random.default_rng(config.seed)
    s = config.signal_strength
    target_type = RELATION_TARGET_TYPE[config.relation]
    entity_type = "ORG" if target_type == "PER" else "PER"

    direction = rng.standard_normal(config.embedding_dimension)
    direction /= np.linalg.norm(direction)

    documents: list[Document] = []
    tuples: list[ExtractionTuple] = []
    ground_truths: dict[tuple[str, str, str], GroundTruth] = {}
    gold_coverage: dict[str, float] = {}
    planted: dict[str, PlantedDoc] = {}
    mentions: dict[str, list[tuple[int, int, str]]] = {}
    embeddings = EmbeddingStore(config.embedding_dimension)
    aliases: dict[str, list[str]] = {}

    popularity_ranks = {f"site{k:03d}.example": k + 1 for k in range(N_SITES)}

    for i in range(config.n_entities):
        entity_id = f"ent{i:03d}"
        aliases[entity_id] = [entity_id]
        gt_objects = [f"obj{i:03d}x{j}" for j in range(config.gt_size)]
        ground_truths[(entity_id, config.relation, "web")] = GroundTruth(
            entity_id=entity_id, relation=config.relation, variant="web",
            objects=set(gt_objects),
        )

        for j in range(config.docs_per_entity):
            doc_id = f"d{i:03d}x{j:03d}"
            if rng.random() < INFORMATIVE_MASS:
                hits = int(rng.integers(_ceil(0.6 * config.gt_size), config.gt_size + 1))
            else:
                hits = int(rng.integers(0, int(0.4 * config.gt_size) + 1))
            coverage = hits / config.gt_size

            hit_objects = [gt_objects[k] for k in sorted(rng.choice(
                config.gt_size, size=hits, replace=False))]
            n_spurious = round(4.8 * max(0.0, coverage - 0.2))
            spurious = [f"sp{i:03d}x{j:03d}x{m}" for m in range(n_spurious)]

            ch = s * CHANNEL_ATTENUATION
            n_entity = max(1, round(1 + 14 * _mix(rng, ch, coverage)))
            # typed mentions stay independent of coverage so extraction cost
            # (quadratic in mentions) does not track the planted signal
            n_typed = round(4 + 12 * rng.random())
            cue_counts = [round(3 * _mix(rng, ch, coverage)) for _ in CUE_WORDS]
            n_noise = round(40 + 160 * _mix(rng, ch, coverage))
            n_numbers = int(rng.integers(1, 4))

            site_q = _mix(rng, ch, coverage)
            site_index = int(round((1.0 - site_q) * (N_SITES - 1)))
            site = f"site{site_index:03d}.example"

            items: list[tuple[str, str | None]] = []
            items += [(entity_id, entity_type)] * n_entity
            items += [(obj, None) for obj in hit_objects + spurious]
            items += [(f"nm{i:03d}x{j:03d}x{m}", target_type) for m in range(n_typed)]
            for word, count in zip(CUE_WORDS, cue_counts):
                items += [(word, None)] * count
            items += [(f"w{int(rng.integers(NOISE_VOCAB)):03d}", None) for _ in range(n_noise)]
            items += [(str(1900 + int(rng.integers(200))), None) for _ in range(n_numbers)]
            order = rng.permutation(len(items))
            items = [items[k] for k in order]

            text, spans = _assemble(items, rng)
            mentions[doc_id] = spans

            documents.append(Document(
                doc_id=doc_id,
                entity_id=entity_id,
                url=f"https://www.{site}/{doc_id}",
                site_domain=site,
                text=text,
            ))
            for obj in hit_objects + spurious:
                tuples.append(ExtractionTuple(
                    doc_id=doc_id, subject=entity_id,
                    relation=config.relation, object=obj,
                ))
            gold_coverage[doc_id] = coverage
            planted[doc_id] = PlantedDoc(
                coverage=coverage, entity_mentions=n_entity, typed_mentions=n_typed,
                cue_words=sum(cue_counts), noise_words=n_noise, site_rank=site_index + 1,
            )
            noise = rng.standard_normal(config.embedding_dimension)
            vec = config.embedding_signal * coverage * direction \
                + (1.0 - config.embedding_signal) * noise
            embeddings.add(doc_id, vec.astype(np.float32))

    corpus = Corpus(documents=documents, tuples=tuples, ground_truths=ground_truths)
    return SynthResult(
        corpus=corpus, gold_coverage=gold_coverage, planted=planted,
        embeddings=embeddings, mentions=mentions,
        popularity_ranks=popularity_ranks, aliases=aliases,
    )


def _ceil(x: float) -> int:
    n = int(x)
    return n if n == x else n + 1


def _assemble(items: list[tuple[str, str | None]], rng) -> tuple[str, list[tuple[int, int, str]]]:
    """Join tokens into sentences of 6-12 words, recording the character span
    of every typed mention token."""
    parts: list[str] = []
    spans: list[tuple[int, int, str]] = []
    offset = 0
    sentence_len = 0
    sentence_cap = int(rng.integers(6, 13))
    for idx, (token, mention_type) in enumerate(items):
        if parts:
            parts.append(" ")
            offset += 1
        start = offset
        parts.append(token)
        offset += len(token)
        if mention_type is not None:
            spans.append((start, start + len(token), mention_type))
        sentence_len += 1
        last = idx == len(items) - 1
        if sentence_len >= sentence_cap or last:
            parts.append(".")
            offset += 1
            sentence_len = 0
            sentence_cap = int(rng.integers(6, 13))
    return "".join(parts), spans


def write_outputs(result: SynthResult, outdir: str | Path, relation: str) -> None:
    """Emit the standard file suite: documents/tuples/gt/aliases/mentions
    JSONL, popularity TSV, and the binary embedding file."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    from .corpus import save_corpus

    save_corpus(
        result.corpus,
        outdir / "documents.jsonl",
        outdir / "tuples.jsonl",
        outdir / "gt.jsonl",
    )
    with (outdir / "aliases.jsonl").open("w", encoding="utf-8") as fh:
        for canonical, alias_list in result.aliases.items():
            fh.write(json.dumps({"canonical": canonical, "aliases": alias_list}) + "\n")
    with (outdir / "mentions.jsonl").open("w", encoding="utf-8") as fh:
        for doc in result.corpus.documents:
            spans = result.mentions[doc.doc_id]
            fh.write(json.dumps({
                "doc_id": doc.doc_id,
                "mentions": [{"start": s, "end": e, "type": t} for s, e, t in spans],
            }) + "\n")
    with (outdir / "popularity.tsv").open("w", encoding="utf-8") as fh:
        for domain, rank in result.popularity_ranks.items():
            fh.write(f"{domain}\t{rank}\n")
    write_embeddings(result.embeddings, outdir / "embeddings.bin")
    with (outdir / "planted.jsonl").open("w", encoding="utf-8") as fh:
        for doc in result.corpus.documents:
            fh.write(json.dumps({
                "doc_id": doc.doc_id,
                "entity_id": doc.entity_id,
                "relation": relation,
                "coverage": result.gold_coverage[doc.doc_id],
            }) + "\n")
