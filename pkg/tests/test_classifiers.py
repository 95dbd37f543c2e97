import math

import numpy as np
import pytest
import scipy.sparse as sp

from pashto_textclf.classifiers import (
    ALGORITHMS, PROBABILISTIC, ModelConfig, TrainedModel, load_model, predict_label,
    predict_labels, predict_scores, positive_scores, relu, save_model, score_matrix, train,
)
from pashto_textclf.errors import DimensionError, FeatureError, FormatError, TrainingError
from pashto_textclf.features import SparseVector, unstack

FAST = {
    "RF": {"n_trees": 7},
    "LR": {"epochs": 60},
    "SVM": {"epochs": 10},
    "MLP": {"epochs": 15},
}


def fast_config(alg, seed=0, **extra):
    return ModelConfig(alg, {**FAST.get(alg, {}), **extra}, seed)


def random_problem(seed, n=60, V=12, C=3):
    rng = np.random.default_rng(seed)
    X = rng.poisson(0.8, size=(n, V)).astype(float)
    y = rng.integers(0, C, size=n)
    y[:C] = np.arange(C)
    return sp.csr_matrix(X), y


def mlp_with(b2, n_features=3):
    C = len(b2)
    params = {"W1": np.zeros((n_features, 20)), "b1": np.zeros(20),
              "W2": np.zeros((20, C)), "b2": np.asarray(b2, dtype=float)}
    return TrainedModel("MLP", {}, 0, C, n_features, params)


class TestRelu:
    @pytest.mark.parametrize("a,expected", [(-2.0, 0.0), (3.5, 3.5), (0.0, 0.0)])
    def test_examples(self, a, expected):
        assert relu(a) == expected

    def test_vector(self):
        np.testing.assert_array_equal(relu([-1.0, 0.5, -0.0, 2.0]), [0.0, 0.5, 0.0, 2.0])


class TestNaiveBayes:
    def test_gaussian_one_dimensional(self):
        X = sp.csr_matrix([[0.0], [0.2], [10.0], [10.2]])
        model = train(ModelConfig("GNB"), X, [0, 0, 1, 1])
        q = SparseVector([0], [1.0], 1)
        assert predict_label(model, q) == 0

        var = model.params["variances"][:, 0]
        means = np.array([0.1, 10.1])
        loglik = -0.5 * np.log(2 * math.pi * var) - (1.0 - means) ** 2 / (2 * var)
        expected = np.exp(loglik - loglik.max())
        expected /= expected.sum()
        np.testing.assert_allclose(predict_scores(model, q), expected, atol=1e-12)

    def test_multinomial_symmetric_posterior(self):
        X = sp.csr_matrix([[1.0, 2.0], [2.0, 1.0]])
        model = train(ModelConfig("MNB"), X, [0, 1])
        np.testing.assert_allclose(predict_scores(model, SparseVector([0, 1], [1.0, 1.0], 2)),
                                   [0.5, 0.5], atol=1e-12)

    def test_multinomial_term_probabilities_sum_to_one(self):
        X, y = random_problem(1)
        model = train(ModelConfig("MNB"), X, y)
        np.testing.assert_allclose(np.exp(model.params["feature_log_prob"]).sum(axis=1), 1.0, atol=1e-9)

    def test_gaussian_variance_floor(self):
        X, y = random_problem(2)
        X = X.tolil()
        X[:, 0] = 0.0
        model = train(ModelConfig("GNB"), X.tocsr(), y)
        eps = model.params["epsilon"][0]
        assert eps > 0
        assert np.all(model.params["variances"] >= eps)

    @pytest.mark.parametrize("c", [0.01, 3.7, 1000.0])
    def test_gaussian_scale_invariance(self, c):
        X, y = random_problem(3, n=80)
        Q, _ = random_problem(4, n=50)
        base = predict_labels(train(ModelConfig("GNB"), X, y), Q)
        scaled = predict_labels(train(ModelConfig("GNB"), X * c, y), Q * c)
        np.testing.assert_array_equal(base, scaled)

    def test_multinomial_rejects_negative_weights(self):
        with pytest.raises(TrainingError, match="non-negative"):
            train(ModelConfig("MNB"), sp.csr_matrix([[1.0, -1.0], [0.0, 2.0]]), [0, 1])


class TestPrediction:
    def test_zero_weight_mlp_is_uniform(self):
        model = mlp_with(np.zeros(4))
        np.testing.assert_allclose(predict_scores(model, SparseVector([0, 2], [1.5, -2.0], 3)),
                                   0.25, atol=1e-15)

    def test_argmax(self):
        model = mlp_with(np.log([0.2, 0.5, 0.3]))
        x = SparseVector([], [], 3)
        np.testing.assert_allclose(predict_scores(model, x), [0.2, 0.5, 0.3], atol=1e-12)
        assert predict_label(model, x) == 1

    def test_tie_goes_to_lowest_index(self):
        assert predict_label(mlp_with([0.0, 0.0]), SparseVector([], [], 3)) == 0
        assert predict_label(mlp_with([-1.0, 0.0, 0.0]), SparseVector([], [], 3)) == 1

    def test_knn_self_vote(self):
        X, y = random_problem(5)
        model = train(ModelConfig("KNN", {"k": 1}), X, y)
        for i, x in enumerate(unstack(X[:10])):
            if x.indices.size:
                assert predict_scores(model, x)[y[i]] == 1.0

    def test_logistic_separable(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(-1, 1, size=(40, 2))
        pts = pts[np.abs(pts[:, 0] - pts[:, 1]) > 0.2]
        y = (pts[:, 0] > pts[:, 1]).astype(int)
        X = sp.csr_matrix(np.hstack([pts, np.ones((len(pts), 1))]))
        S = score_matrix(train(ModelConfig("LR", {"epochs": 500, "learning_rate": 0.1}), X, y), X)
        assert np.all(S[np.arange(len(y)), y] > S[np.arange(len(y)), 1 - y])

    @pytest.mark.parametrize("alg", ALGORITHMS)
    def test_label_is_argmax_on_random_vectors(self, alg):
        X, y = random_problem(6)
        model = train(fast_config(alg), X, y)
        rng = np.random.default_rng(7)
        Q = sp.csr_matrix(rng.poisson(0.8, size=(500, X.shape[1])).astype(float))
        S = score_matrix(model, Q)
        np.testing.assert_array_equal(predict_labels(model, Q), np.argmax(S, axis=1))
        for x, row in zip(unstack(Q[:25]), S[:25]):
            assert predict_label(model, x) == int(np.argmax(row))

    @pytest.mark.parametrize("alg", sorted(PROBABILISTIC))
    def test_probabilistic_scores_are_distributions(self, alg):
        X, y = random_problem(8)
        S = score_matrix(train(fast_config(alg), X, y), X)
        assert np.all(S >= 0) and np.all(S <= 1)
        np.testing.assert_allclose(S.sum(axis=1), 1.0, atol=1e-9)

    def test_svm_binary_uses_one_hyperplane(self):
        X, y = random_problem(9, C=2)
        model = train(fast_config("SVM"), X, y)
        assert model.params["weights"].shape == (X.shape[1], 1)
        S = score_matrix(model, X)
        np.testing.assert_array_equal(S[:, 0], -S[:, 1])
        assert np.all((positive_scores(model, X) > 0.5) == (S[:, 1] > 0))

    def test_mlp_shapes(self):
        X, y = random_problem(10, V=7, C=4)
        p = train(fast_config("MLP"), X, y).params
        assert p["W1"].shape == (7, 20) and p["W2"].shape == (20, 4)
        assert p["b1"].shape == (20,) and p["b2"].shape == (4,)

    def test_dimension_mismatch(self):
        X, y = random_problem(11)
        model = train(ModelConfig("MNB"), X, y)
        with pytest.raises(DimensionError):
            predict_scores(model, SparseVector([0], [1.0], X.shape[1] + 1))
        with pytest.raises(DimensionError):
            score_matrix(model, sp.csr_matrix((2, X.shape[1] - 1)))


class TestTraining:
    @pytest.mark.parametrize("alg", ALGORITHMS)
    def test_deterministic(self, alg):
        X, y = random_problem(12)
        a = train(fast_config(alg, seed=5), X, y)
        b = train(fast_config(alg, seed=5), X, y)
        assert a.dumps() == b.dumps()

    @pytest.mark.parametrize("alg", ALGORITHMS)
    def test_round_trip(self, alg, tmp_path):
        X, y = random_problem(13)
        model = train(fast_config(alg), X, y).with_metadata("abc", ("x", "y", "z"))
        save_model(model, tmp_path / "m.json")
        loaded = load_model(tmp_path / "m.json")
        assert loaded.dumps() == model.dumps()
        np.testing.assert_array_equal(score_matrix(loaded, X), score_matrix(model, X))

    def test_defaults_recorded(self):
        X, y = random_problem(14)
        model = train(ModelConfig("KNN"), X, y)
        assert model.hyperparameters == {"k": 5}
        mlp = ModelConfig("MLP").resolved()
        assert mlp["hidden_units"] == 20

    def test_dt_memorises(self):
        rng = np.random.default_rng(15)
        dense = np.unique(rng.integers(0, 3, size=(50, 6)).astype(float), axis=0)
        y = rng.integers(0, 3, size=len(dense))
        X = sp.csr_matrix(dense)
        assert np.all(predict_labels(train(ModelConfig("DT"), X, y, n_classes=3), X) == y)

    def test_empty_training_set(self):
        with pytest.raises(TrainingError, match="empty"):
            train(ModelConfig("MNB"), [], [])
        with pytest.raises(TrainingError, match="empty"):
            train(ModelConfig("MNB"), sp.csr_matrix((0, 3)), [])

    def test_length_mismatch(self):
        X, y = random_problem(16)
        with pytest.raises(TrainingError, match="labels"):
            train(ModelConfig("MNB"), X, y[:-1])

    @pytest.mark.parametrize("alg", ["LR", "SVM", "MLP"])
    def test_single_class_discriminative(self, alg):
        X, _ = random_problem(17)
        with pytest.raises(TrainingError, match="two distinct classes"):
            train(ModelConfig(alg), X, np.zeros(X.shape[0], dtype=int), n_classes=2)

    def test_mixed_dimensions(self):
        with pytest.raises(FeatureError):
            train(ModelConfig("MNB"), [SparseVector([0], [1.0], 2), SparseVector([0], [1.0], 3)], [0, 1])

    @pytest.mark.parametrize("config", [
        lambda: ModelConfig("XGB"),
        lambda: ModelConfig("MLP", {"layers": 3}),
    ])
    def test_invalid_config(self, config):
        with pytest.raises(TrainingError):
            config()

    def test_label_out_of_range(self):
        X, y = random_problem(18)
        with pytest.raises(TrainingError):
            train(ModelConfig("MNB"), X, y, n_classes=2)

    def test_knn_k_zero(self):
        X, y = random_problem(19)
        with pytest.raises(TrainingError):
            train(ModelConfig("KNN", {"k": 0}), X, y)

    def test_bad_model_version(self):
        X, y = random_problem(20)
        data = train(ModelConfig("MNB"), X, y).to_dict()
        data["format_version"] = 3
        with pytest.raises(FormatError):
            TrainedModel.from_dict(data)
