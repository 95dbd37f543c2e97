import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from pashto_textclf.classifiers import ModelConfig, positive_scores, predict_labels, train
from pashto_textclf.corpus import MULTI, LabelSchema
from pashto_textclf.errors import DimensionError, FormatError, MetricError, TrainingError
from pashto_textclf.features import (
    SparseVector, VectorizerConfig, analyze, build_vocabulary, stack, vectorize, vectorize_texts,
)
from pashto_textclf.harness.synth import keyword_document
from pashto_textclf.multilabel import (
    MultiLabelModel, label_scores, load_multilabel_model, per_label_accuracy,
    predict_label_vector, predict_label_vectors, save_multilabel_model, threshold_scores,
    train_binary_relevance,
)

from oracles import per_label_accuracy_ref

HAND_X = sp.csr_matrix([[2.0, 0.0, 1.0], [0.0, 3.0, 1.0], [2.0, 3.0, 0.0], [0.0, 0.0, 2.0]])
HAND_Y = np.array([[1, 0], [0, 1], [1, 1], [0, 0]])


@pytest.fixture(scope="module")
def unigram_space(multi_synth):
    corpus = multi_synth.corpus
    vocab = build_vocabulary([analyze(t, VectorizerConfig()) for t in corpus.texts])
    X = stack(vectorize_texts(corpus.texts, vocab), len(vocab))
    return vocab, X, corpus.label_matrix()


class TestThreshold:
    def test_bits(self):
        np.testing.assert_array_equal(threshold_scores([0.9, 0.4, 0.6], 0.5), [1, 0, 1])

    def test_boundary_is_inclusive(self):
        np.testing.assert_array_equal(threshold_scores([0.5], 0.5), [1])

    @settings(max_examples=100, deadline=None)
    @given(arrays(np.float64, (6, 4), elements=st.floats(0, 1)),
           st.floats(0.01, 1.0), st.floats(0.01, 1.0))
    def test_monotone_shrinkage(self, scores, t1, t2):
        lo, hi = sorted((t1, t2))
        assert np.all(threshold_scores(scores, hi) <= threshold_scores(scores, lo))

    def test_above_one_predicts_nothing(self):
        model = train_binary_relevance(ModelConfig("MNB"), HAND_X, HAND_Y).with_threshold(1.0 + 1e-9)
        assert predict_label_vectors(model, HAND_X).sum() == 0


class TestTraining:
    def test_independent_of_other_labels(self):
        cfg = ModelConfig("LR", {"epochs": 50}, seed=3)
        model = train_binary_relevance(cfg, HAND_X, HAND_Y)
        for j in range(2):
            solo = train(cfg.with_seed(3 + j), HAND_X, HAND_Y[:, j], n_classes=2)
            np.testing.assert_array_equal(predict_label_vectors(model, HAND_X)[:, j],
                                          (positive_scores(solo, HAND_X) >= 0.5).astype(int))
            assert model.per_label_models[j].dumps() == solo.dumps()

    def test_all_positive_label(self):
        schema = LabelSchema(("Sport",), MULTI)
        with pytest.raises(TrainingError, match="'Sport' has no negative"):
            train_binary_relevance(ModelConfig("MNB"), HAND_X, np.ones((4, 1)), schema)

    def test_no_positive_label(self):
        Y = HAND_Y.copy()
        Y[:, 1] = 0
        with pytest.raises(TrainingError, match="'label1' has no positive"):
            train_binary_relevance(ModelConfig("MNB"), HAND_X, Y)

    def test_length_mismatch(self):
        with pytest.raises(TrainingError):
            train_binary_relevance(ModelConfig("MNB"), HAND_X, HAND_Y[:3])

    def test_schema_width_mismatch(self):
        with pytest.raises(TrainingError):
            train_binary_relevance(ModelConfig("MNB"), HAND_X, HAND_Y, LabelSchema(("a", "b", "c"), MULTI))

    @pytest.mark.parametrize("alg", ["MNB", "GNB", "KNN"])
    def test_label_permutation_equivariance(self, alg):
        rng = np.random.default_rng(0)
        X = sp.csr_matrix(rng.poisson(1.0, size=(30, 8)).astype(float))
        Y = rng.integers(0, 2, size=(30, 4))
        Y[0], Y[1] = 1, 0
        perm = [2, 0, 3, 1]
        base = label_scores(train_binary_relevance(ModelConfig(alg), X, Y), X)
        permuted = label_scores(train_binary_relevance(ModelConfig(alg), X, Y[:, perm]), X)
        np.testing.assert_array_equal(permuted, base[:, perm])

    def test_planted_keyword_label_is_separable(self, unigram_space, multi_synth):
        _, X, Y = unigram_space
        j = multi_synth.corpus.schema.index("Sport")
        Yj = Y[:, j:j + 1]
        model = train_binary_relevance(ModelConfig("DT"), X, Yj, LabelSchema(("Sport",), MULTI))
        assert np.mean(predict_labels(model.per_label_models[0], X) == Yj[:, 0]) == 1.0


class TestPrediction:
    def test_political_economic_news_article(self, unigram_space, multi_synth):
        vocab, X, Y = unigram_space
        schema = multi_synth.corpus.schema
        model = train_binary_relevance(ModelConfig("MNB"), X, Y, schema)
        wanted = ["Economic", "Politic", "News"]
        text = keyword_document(multi_synth, wanted, length=80, seed=1)
        bits = predict_label_vector(model, vectorize(analyze(text, vocab), vocab))
        assert [n for n, b in zip(schema.names, bits) if b] == [n for n in schema.names if n in wanted]

    def test_empty_prediction_allowed(self):
        model = train_binary_relevance(ModelConfig("MNB"), HAND_X, HAND_Y).with_threshold(0.999999)
        assert predict_label_vector(model, SparseVector([], [], 3)).sum() == 0

    def test_dimension_mismatch(self):
        model = train_binary_relevance(ModelConfig("MNB"), HAND_X, HAND_Y)
        with pytest.raises(DimensionError):
            predict_label_vector(model, SparseVector([0], [1.0], 4))

    def test_round_trip(self, tmp_path):
        model = train_binary_relevance(ModelConfig("SVM", {"epochs": 5}), HAND_X, HAND_Y, threshold=0.4)
        save_multilabel_model(model, tmp_path / "m.json")
        loaded = load_multilabel_model(tmp_path / "m.json")
        assert loaded.dumps() == model.dumps()
        np.testing.assert_array_equal(label_scores(loaded, HAND_X), label_scores(model, HAND_X))

    def test_wrong_kind(self, tmp_path):
        with pytest.raises(FormatError):
            MultiLabelModel.from_dict({"format_version": 1, "kind": "chain"})


class TestPerLabelAccuracy:
    def test_perfect(self, unigram_space):
        _, X, Y = unigram_space
        model = train_binary_relevance(ModelConfig("DT"), X[:200], Y[:200])
        np.testing.assert_array_equal(per_label_accuracy(model, X[:200], Y[:200]), 1.0)

    def test_always_zero_is_base_rate(self):
        rng = np.random.default_rng(1)
        X = sp.csr_matrix(rng.poisson(1.0, size=(40, 5)).astype(float))
        Y = rng.integers(0, 2, size=(40, 3))
        Y[0], Y[1] = 1, 0
        model = train_binary_relevance(ModelConfig("MNB"), X, Y).with_threshold(2.0)
        np.testing.assert_allclose(per_label_accuracy(model, X, Y), 1.0 - Y.mean(axis=0))

    def test_matches_recount(self, unigram_space):
        _, X, Y = unigram_space
        model = train_binary_relevance(ModelConfig("MNB"), X[:300], Y[:300])
        P = predict_label_vectors(model, X[300:])
        ref = per_label_accuracy_ref(Y[300:].tolist(), P.tolist())
        np.testing.assert_allclose(per_label_accuracy(model, X[300:], Y[300:]), ref, atol=1e-12)

    def test_empty_test_set(self):
        model = train_binary_relevance(ModelConfig("MNB"), HAND_X, HAND_Y)
        with pytest.raises(MetricError):
            per_label_accuracy(model, [], [])
        with pytest.raises(MetricError):
            per_label_accuracy(model, sp.csr_matrix((0, 3)), np.zeros((0, 2)))
