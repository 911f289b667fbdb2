"""Sparse TF-IDF n-gram vectors and the external document-embedding store.

Embeddings are consumed, never computed, here; any producer that writes the
binary format below can feed the fusion classifier.
"""

import math
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CovrankError
from .text import fold_tokens

EMBEDDING_MAGIC = b"CVEM"
EMBEDDING_VERSION = 1

VOCAB_CAP = 100_000


@dataclass
class Vocabulary:
    index: dict[str, int]  # space-joined n-gram -> dense column
    df: dict[str, int]
    n_docs: int
    max_n: int
    min_df: int

    def __len__(self) -> int:
        return len(self.index)

    def idf(self, ngram: str) -> float:
        return math.log((1.0 + self.n_docs) / (1.0 + self.df[ngram])) + 1.0

    def to_json(self) -> dict:
        terms = sorted(self.index, key=self.index.get)
        return {
            "terms": terms,
            "df": [self.df[t] for t in terms],
            "n_docs": self.n_docs,
            "max_n": self.max_n,
            "min_df": self.min_df,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Vocabulary":
        terms = data["terms"]
        return cls(
            index={t: i for i, t in enumerate(terms)},
            df=dict(zip(terms, data["df"])),
            n_docs=data["n_docs"],
            max_n=data["max_n"],
            min_df=data["min_df"],
        )


@dataclass
class SparseVector:
    entries: list[tuple[int, float]] = field(default_factory=list)  # sorted by index

    def norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in self.entries))

    def dot(self, other: "SparseVector") -> float:
        a, b = self.entries, other.entries
        i = j = 0
        total = 0.0
        while i < len(a) and j < len(b):
            if a[i][0] == b[j][0]:
                total += a[i][1] * b[j][1]
                i += 1
                j += 1
            elif a[i][0] < b[j][0]:
                i += 1
            else:
                j += 1
        return total


def _ngrams(tokens: list[str], max_n: int):
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            yield " ".join(tokens[i:i + n])


def fit_vocabulary(
    train_texts: list[str],
    max_n: int = 1,
    min_df: int = 2,
    cap: int = VOCAB_CAP,
) -> Vocabulary:
    """Fit an n-gram vocabulary on the training texts only: keep n-grams with
    document frequency >= min_df, cap to the most frequent, and assign column
    indices lexicographically."""
    if not train_texts:
        raise CovrankError("cannot fit a vocabulary on an empty training set")
    df: Counter = Counter()
    for text in train_texts:
        df.update(set(_ngrams(fold_tokens(text), max_n)))
    kept = [t for t, c in df.items() if c >= min_df]
    if len(kept) > cap:
        kept = sorted(kept, key=lambda t: (-df[t], t))[:cap]
    kept.sort()
    return Vocabulary(
        index={t: i for i, t in enumerate(kept)},
        df={t: df[t] for t in kept},
        n_docs=len(train_texts),
        max_n=max_n,
        min_df=min_df,
    )


def tfidf_vector(text: str, vocab: Vocabulary) -> SparseVector:
    """tf * smooth-idf weights, L2-normalized; out-of-vocabulary n-grams are
    ignored and an all-OOV document yields the zero vector."""
    counts: Counter = Counter()
    for gram in _ngrams(fold_tokens(text), vocab.max_n):
        if gram in vocab.index:
            counts[gram] += 1
    entries = [(vocab.index[g], c * vocab.idf(g)) for g, c in counts.items()]
    entries.sort()
    norm = math.sqrt(sum(w * w for _, w in entries))
    if norm > 0:
        entries = [(i, w / norm) for i, w in entries]
    return SparseVector(entries)


class EmbeddingStore:
    """doc_id -> dense float32 vector, all of one dimension."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray] | None = None):
        if dimension <= 0:
            raise CovrankError(f"embedding dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.vectors: dict[str, np.ndarray] = {}
        for doc_id, vec in (vectors or {}).items():
            self.add(doc_id, vec)

    def add(self, doc_id: str, vec) -> None:
        arr = np.asarray(vec, dtype=np.float32)
        if arr.shape != (self.dimension,):
            raise CovrankError(
                f"embedding for {doc_id!r} has shape {arr.shape}, expected ({self.dimension},)"
            )
        if not np.all(np.isfinite(arr)):
            raise CovrankError(f"embedding for {doc_id!r} contains non-finite values")
        self.vectors[doc_id] = arr

    def get(self, doc_id: str) -> np.ndarray:
        try:
            return self.vectors[doc_id]
        except KeyError:
            raise CovrankError(f"no embedding for doc_id {doc_id!r}") from None

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.vectors


def write_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    """Little-endian binary: magic, version u32, dimension u32, count u64,
    then per record u16 id length, UTF-8 id, dimension * f32."""
    with Path(path).open("wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<IIQ", EMBEDDING_VERSION, store.dimension, len(store.vectors)))
        for doc_id, vec in store.vectors.items():
            raw = doc_id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(vec.astype("<f4").tobytes())


def load_embeddings(path: str | Path) -> EmbeddingStore:
    data = Path(path).read_bytes()
    if data[:4] != EMBEDDING_MAGIC:
        raise CovrankError(f"{path}: bad magic bytes, not an embedding file")
    if len(data) < 20:
        raise CovrankError(f"{path}: truncated header")
    version, dimension, count = struct.unpack_from("<IIQ", data, 4)
    if version != EMBEDDING_VERSION:
        raise CovrankError(f"{path}: unsupported format version {version}")
    if dimension == 0:
        raise CovrankError(f"{path}: embedding dimension 0")

    store = EmbeddingStore(dimension)
    offset = 20
    vec_bytes = 4 * dimension
    for i in range(count):
        if offset + 2 > len(data):
            raise CovrankError(f"{path}: truncated record {i}")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + vec_bytes > len(data):
            raise CovrankError(f"{path}: truncated record {i}")
        doc_id = data[offset:offset + id_len].decode("utf-8")
        offset += id_len
        vec = np.frombuffer(data, dtype="<f4", count=dimension, offset=offset).copy()
        offset += vec_bytes
        store.add(doc_id, vec)
    return store
