import math
import random

import numpy as np
import pytest

from covrank.errors import CovrankError
from covrank.vectorize import (
    EmbeddingStore, SparseVector, Vocabulary, fit_vocabulary, load_embeddings,
    tfidf_vector, write_embeddings,
)


def tfidf_oracle(text: str, train: list[str], max_n=1) -> dict[str, float]:
    """Independent recomputation: raw counts, smooth idf, L2 normalize."""
    def grams(t):
        toks = t.casefold().split()
        return [" ".join(toks[i:i + n]) for n in range(1, max_n + 1)
                for i in range(len(toks) - n + 1)]

    df = {}
    for t in train:
        for g in set(grams(t)):
            df[g] = df.get(g, 0) + 1
    weights = {}
    for g in grams(text):
        if g in df:
            weights[g] = weights.get(g, 0) + 1
    for g in weights:
        weights[g] *= math.log((1 + len(train)) / (1 + df[g])) + 1
    norm = math.sqrt(sum(w * w for w in weights.values()))
    return {g: w / norm for g, w in weights.items()} if norm else {}


class TestVocabulary:
    def test_unigrams(self):
        vocab = fit_vocabulary(["a b", "a c"], max_n=1, min_df=1)
        assert set(vocab.index) == {"a", "b", "c"}

    def test_min_df_filter(self):
        vocab = fit_vocabulary(["a b", "a c"], max_n=1, min_df=2)
        assert set(vocab.index) == {"a"}

    def test_bigrams_included(self):
        vocab = fit_vocabulary(["a b"], max_n=2, min_df=1)
        assert "a b" in vocab.index

    def test_empty_train_errors(self):
        with pytest.raises(CovrankError):
            fit_vocabulary([], max_n=1, min_df=1)

    def test_indices_dense_and_lexicographic(self):
        vocab = fit_vocabulary(["c b a", "a b c"], max_n=1, min_df=1)
        terms = sorted(vocab.index, key=vocab.index.get)
        assert terms == sorted(terms)
        assert sorted(vocab.index.values()) == list(range(len(vocab)))

    def test_cap_keeps_most_frequent(self):
        texts = [f"common rare{i}" for i in range(10)]
        vocab = fit_vocabulary(texts, max_n=1, min_df=1, cap=1)
        assert set(vocab.index) == {"common"}

    def test_json_round_trip(self):
        vocab = fit_vocabulary(["a b", "a c"], max_n=2, min_df=1)
        again = Vocabulary.from_json(vocab.to_json())
        assert again.index == vocab.index
        assert again.df == vocab.df
        assert again.n_docs == vocab.n_docs


class TestTfidfVector:
    def test_worked_example(self):
        vocab = fit_vocabulary(["a b", "a c"], max_n=1, min_df=1)
        vec = tfidf_vector("a b", vocab)
        weights = {i: w for i, w in vec.entries}
        assert weights[vocab.index["a"]] == pytest.approx(0.5797386715376657, abs=1e-6)
        assert weights[vocab.index["b"]] == pytest.approx(0.8148024746671689, abs=1e-6)

    def test_oov_document_zero_vector(self):
        vocab = fit_vocabulary(["a b"], max_n=1, min_df=1)
        assert tfidf_vector("z z z", vocab).entries == []

    def test_duplication_invariance(self):
        vocab = fit_vocabulary(["a b", "a c"], max_n=1, min_df=1)
        assert tfidf_vector("a b", vocab).entries == pytest.approx(
            tfidf_vector("a b a b", vocab).entries)

    def test_unit_norm_property(self):
        rng = random.Random(31)
        words = [f"w{i}" for i in range(15)]
        for _ in range(200):
            train = [" ".join(rng.choices(words, k=rng.randint(1, 10)))
                     for _ in range(rng.randint(1, 8))]
            vocab = fit_vocabulary(train, max_n=rng.randint(1, 3), min_df=1)
            text = " ".join(rng.choices(words, k=rng.randint(1, 10)))
            vec = tfidf_vector(text, vocab)
            if vec.entries:
                assert vec.norm() == pytest.approx(1.0, abs=1e-9)
            assert all(0 <= i < len(vocab) for i, _ in vec.entries)
            indices = [i for i, _ in vec.entries]
            assert indices == sorted(indices)

    def test_matches_oracle(self):
        rng = random.Random(32)
        words = [f"w{i}" for i in range(10)]
        for _ in range(100):
            train = [" ".join(rng.choices(words, k=rng.randint(1, 8)))
                     for _ in range(rng.randint(1, 6))]
            max_n = rng.randint(1, 2)
            vocab = fit_vocabulary(train, max_n=max_n, min_df=1)
            text = train[rng.randrange(len(train))]
            vec = tfidf_vector(text, vocab)
            expected = tfidf_oracle(text, train, max_n)
            got = {g: w for g, i in vocab.index.items()
                   for j, w in vec.entries if j == i}
            assert set(got) == set(expected)
            for g in expected:
                assert got[g] == pytest.approx(expected[g], abs=1e-9)

    def test_self_cosine_one_disjoint_zero(self):
        vocab = fit_vocabulary(["a b", "c d"], max_n=1, min_df=1)
        va = tfidf_vector("a b", vocab)
        vc = tfidf_vector("c d", vocab)
        assert va.dot(va) == pytest.approx(1.0, abs=1e-12)
        assert va.dot(vc) == 0.0


class TestEmbeddingStore:
    def store(self, n=3, dim=8, seed=0):
        rng = np.random.default_rng(seed)
        store = EmbeddingStore(dim)
        for i in range(n):
            store.add(f"d{i}", rng.standard_normal(dim).astype(np.float32))
        return store

    def test_round_trip_bit_exact(self, tmp_path):
        store = self.store(n=5, dim=768)
        path = tmp_path / "emb.bin"
        write_embeddings(store, path)
        again = load_embeddings(path)
        assert again.dimension == 768
        assert len(again) == 5
        for doc_id, vec in store.vectors.items():
            assert again.get(doc_id).tobytes() == vec.tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embeddings(self.store(), path)
        data = bytearray(path.read_bytes())
        data[:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(CovrankError, match="magic"):
            load_embeddings(path)

    def test_truncated_record(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embeddings(self.store(), path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(CovrankError, match="truncated"):
            load_embeddings(path)

    def test_zero_dimension_rejected(self):
        with pytest.raises(CovrankError, match="dimension"):
            EmbeddingStore(0)

    def test_empty_store_valid_lookup_fails(self, tmp_path):
        path = tmp_path / "emb.bin"
        write_embeddings(EmbeddingStore(4), path)
        store = load_embeddings(path)
        assert len(store) == 0
        with pytest.raises(CovrankError, match="no embedding"):
            store.get("missing")

    def test_wrong_shape_rejected(self):
        store = EmbeddingStore(4)
        with pytest.raises(CovrankError, match="shape"):
            store.add("d1", np.zeros(5, dtype=np.float32))

    def test_nonfinite_rejected(self):
        store = EmbeddingStore(2)
        with pytest.raises(CovrankError, match="finite"):
            store.add("d1", np.array([1.0, np.inf], dtype=np.float32))
