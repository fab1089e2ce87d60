import numpy as np
import pytest

from privsense import svm
from privsense.errors import DegenerateLabelError, InvalidConfigError
from privsense.rng import RngStream


def make_blobs(n_points, margin, stream, dim=2):
    """Two Gaussian clouds pushed apart until the first axis separates
    them by at least ``margin`` (a certifiably separable construction)."""
    gen = stream.generator()
    half = n_points // 2
    neg = gen.normal(0.0, 0.5, size=(half, dim))
    pos = gen.normal(0.0, 0.5, size=(n_points - half, dim))
    shift = margin - (pos[:, 0].min() - neg[:, 0].max())
    pos[:, 0] += max(shift, 0.0)
    x = np.vstack([neg, pos])
    y = np.concatenate([np.zeros(half, int), np.ones(n_points - half, int)])
    assert pos[:, 0].min() - neg[:, 0].max() >= margin - 1e-9  # oracle check
    return x, y


def test_separable_blobs_low_error():
    x, y = make_blobs(200, 2.0, RngStream(1))
    tr, te = svm.split_indices(200, 0.8, RngStream(2))
    rate = svm.train_test_rate(x, y, tr, te)
    assert rate <= 0.02


def test_shuffled_labels_near_chance():
    gen = RngStream(3).generator()
    x = gen.standard_normal((1000, 5))
    y = gen.integers(0, 2, 1000)
    tr, te = svm.split_indices(1000, 0.8, RngStream(4))
    rate = svm.train_test_rate(x, y, tr, te)
    assert 0.4 <= rate <= 0.6


def test_constant_features_predict_majority():
    x = np.full((50, 3), 0.7)
    y = np.array([1] * 35 + [0] * 15)
    model = svm.train_linear_svm(x, y)
    rate = svm.misclassification_rate(model, x, y)
    assert rate == pytest.approx(15 / 50)


def test_single_class_training_rejected():
    x = RngStream(5).generator().standard_normal((20, 3))
    with pytest.raises(DegenerateLabelError):
        svm.train_linear_svm(x, np.ones(20, int))


def test_training_deterministic():
    x, y = make_blobs(100, 1.0, RngStream(6))
    a = svm.train_linear_svm(x, y)
    b = svm.train_linear_svm(x, y)
    assert np.array_equal(a.weights, b.weights)
    assert a.bias == b.bias


def test_split_indices_deterministic_and_disjoint():
    tr1, te1 = svm.split_indices(100, 0.8, RngStream(7))
    tr2, te2 = svm.split_indices(100, 0.8, RngStream(7))
    assert np.array_equal(tr1, tr2)
    assert np.array_equal(te1, te2)
    assert len(tr1) == 80 and len(te1) == 20
    assert set(tr1) | set(te1) == set(range(100))
    with pytest.raises(InvalidConfigError):
        svm.split_indices(100, 1.0, RngStream(0))


def test_noise_response_curve_monotone_shape():
    x, y = make_blobs(200, 2.0, RngStream(8))
    rates = svm.noise_response_curve(
        x, y, epsilons=(0.01, 0.1, 1.6), noise_base=0.05, trials=5,
        rng=RngStream(9))
    assert rates[0.01] > rates[0.1] >= rates[1.6] - 0.05
    assert rates[1.6] <= 0.1
