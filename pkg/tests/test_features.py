import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pashto_textclf.errors import FeatureError, FormatError
from pashto_textclf.features import (
    SparseVector, Vocabulary, VectorizerConfig, analyze, build_vocabulary, load_vocabulary,
    ngrams, save_vocabulary, stack, tfidf_transform, unstack, vectorize, vectorize_counts,
    vectorize_texts,
)
from pashto_textclf.textnorm import NormalizationConfig

from oracles import count_matrix_ref, tfidf_matrix_ref

DOCS = [["a", "b", "a"], ["b", "c"]]

token_docs = st.lists(st.lists(st.sampled_from("abcdefgh"), max_size=8), min_size=1, max_size=8)


def vocab(mode="unigram", docs=DOCS, **kw):
    return build_vocabulary(docs, VectorizerConfig(mode, **kw))


class TestBuildVocabulary:
    def test_unigram_df(self):
        v = vocab()
        assert v.terms == ["a", "b", "c"]
        assert (v.df("a"), v.df("b"), v.df("c")) == (1, 2, 1)
        assert v.n_docs == 2

    def test_bigram_terms(self):
        assert vocab("bigram").terms == ["a b", "b a", "b c"]

    def test_trigram_terms(self):
        assert vocab("trigram").terms == ["a b a"]

    def test_single_doc(self):
        v = build_vocabulary([["x"]])
        assert v.terms == ["x"] and v.df("x") == 1 and v.n_docs == 1

    def test_tfidf_uses_unigrams(self):
        assert vocab("tfidf").terms == vocab().terms

    def test_min_df(self):
        assert vocab(min_df=2).terms == ["b"]

    def test_max_features_ranking(self):
        docs = [["a", "b"], ["b", "c"], ["c", "d"], ["c"]]
        assert vocab(docs=docs, max_features=2).terms == ["b", "c"]

    @pytest.mark.parametrize("docs", [[], [[], []]])
    def test_empty_training(self, docs):
        with pytest.raises(FeatureError):
            build_vocabulary(docs)

    @pytest.mark.parametrize("kw", [{"mode": "fourgram"}, {"min_df": 0}, {"max_features": 0}])
    def test_bad_config(self, kw):
        with pytest.raises(FeatureError):
            VectorizerConfig(**kw)

    @settings(max_examples=100, deadline=None)
    @given(token_docs)
    def test_deterministic_and_df_bounds(self, docs):
        if not any(docs):
            return
        a, b = build_vocabulary(docs), build_vocabulary(docs)
        assert a.term_to_index == b.term_to_index
        assert list(a.term_to_index.values()) == list(range(len(a)))
        assert a.terms == sorted(a.terms)
        assert np.all(a.doc_freq >= 1) and np.all(a.doc_freq <= a.n_docs)

    def test_ngrams(self):
        assert ngrams(["a", "b", "c"], 2) == ["a b", "b c"]
        assert ngrams(["a"], 3) == []


class TestVectorizeCounts:
    def test_counts(self):
        v = build_vocabulary([["a"], ["b"], ["c"]])
        assert vectorize_counts(["a", "b", "a"], v).entries == [(0, 2.0), (1, 1.0)]

    def test_oov_and_empty(self):
        v = vocab()
        for tokens in (["z", "y"], []):
            vec = vectorize_counts(tokens, v)
            assert vec.entries == [] and vec.dim == 3


class TestTfidf:
    def corpus_vocab(self):
        return build_vocabulary([["a", "b", "a"], ["b", "c"], ["c", "c", "c"]], VectorizerConfig("tfidf"))

    def test_pre_normalization_weight(self):
        v = self.corpus_vocab()
        counts = vectorize_counts(["a", "b", "a"], v)
        raw = counts.weights * v.idf()[counts.indices]
        assert raw[0] == pytest.approx(2 * (math.log(4 / 2) + 1), abs=1e-12)
        assert raw[0] == pytest.approx(3.3863, abs=1e-4)

    def test_idf_one_when_everywhere(self):
        assert build_vocabulary([["x"]]).idf()[0] == 1.0

    def test_unit_norm(self):
        v = self.corpus_vocab()
        vec = vectorize(["a", "b", "a", "c"], v)
        assert np.linalg.norm(vec.weights) == pytest.approx(1.0, abs=1e-9)

    def test_zero_vector_untouched(self):
        v = self.corpus_vocab()
        assert vectorize(["zz"], v).entries == []

    def test_dim_mismatch(self):
        with pytest.raises(FeatureError):
            tfidf_transform(SparseVector([0], [1.0], 9), self.corpus_vocab())

    @settings(max_examples=100, deadline=None)
    @given(token_docs, st.lists(st.sampled_from("abcdefghij"), max_size=10))
    def test_matches_oracle_and_nonnegative(self, docs, query):
        if not any(docs):
            return
        v = build_vocabulary(docs, VectorizerConfig("tfidf"))
        _, ref = tfidf_matrix_ref(docs, [query])
        got = vectorize(query, v)
        assert np.all(got.weights > 0)
        np.testing.assert_allclose(got.to_dense(), ref[0], atol=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(token_docs, st.sampled_from([1, 2, 3]))
    def test_counts_match_oracle(self, docs, n):
        mode = {1: "unigram", 2: "bigram", 3: "trigram"}[n]
        if not any(len(d) >= n for d in docs):
            return
        v = build_vocabulary(docs, VectorizerConfig(mode))
        terms, counts, df = count_matrix_ref(docs, docs, n)
        assert v.terms == terms and v.doc_freq.tolist() == df
        for doc, row in zip(docs, counts):
            dense = vectorize(doc, v).to_dense()
            assert np.all(dense == np.round(dense))
            assert dense.tolist() == row


class TestSparseVector:
    @pytest.mark.parametrize("idx,w,dim", [([1, 0], [1.0, 1.0], 3), ([0], [0.0], 3),
                                           ([3], [1.0], 3), ([0, 1], [1.0], 3)])
    def test_invalid(self, idx, w, dim):
        with pytest.raises(FeatureError):
            SparseVector(idx, w, dim)

    def test_dense_round_trip(self):
        vec = SparseVector.from_dense([0, 2.5, 0, -1])
        assert vec.entries == [(1, 2.5), (3, -1.0)]
        np.testing.assert_array_equal(vec.to_dense(), [0, 2.5, 0, -1])

    def test_stack_unstack(self):
        vecs = [SparseVector([0, 2], [1.0, 2.0], 4), SparseVector([], [], 4), SparseVector([3], [5.0], 4)]
        X = stack(vecs)
        assert X.shape == (3, 4)
        assert unstack(X) == vecs

    def test_stack_dim_mismatch(self):
        with pytest.raises(FeatureError):
            stack([SparseVector([0], [1.0], 2), SparseVector([0], [1.0], 3)])


class TestVocabularyPersistence:
    def test_round_trip(self, tmp_path):
        v = build_vocabulary([["د", "دوزخ"], ["دوزخ", "لمبې"]], VectorizerConfig("bigram", max_features=5),
                             NormalizationConfig(strip_zwnj=True))
        save_vocabulary(v, tmp_path / "v.json")
        loaded = load_vocabulary(tmp_path / "v.json")
        assert loaded == v
        assert loaded.content_hash() == v.content_hash()

    def test_hash_depends_on_config(self):
        assert vocab("unigram").content_hash() != vocab("tfidf").content_hash()

    def test_bad_version(self):
        data = vocab().to_dict()
        data["format_version"] = 7
        with pytest.raises(FormatError):
            Vocabulary.from_dict(data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            load_vocabulary(tmp_path / "none.json")


def test_vectorize_texts_uses_vocab_normalization():
    v = build_vocabulary([analyze("دوزخ 12 لمبې", NormalizationConfig())], VectorizerConfig())
    [vec] = vectorize_texts(["دوزخ، دوزخ abc"], v)
    assert vec.entries == [(v.term_to_index["دوزخ"], 2.0)]
