"""From-scratch linear classifier used as the utility probe.

Full-batch subgradient descent on the L2-regularized hinge loss with a
damped 1/(reg * (t + t0)) step schedule and tail-iterate averaging.
Deterministic by construction: no sampling, fixed epoch count, zero
initialization.  The bias is unregularized so a constant-feature table
degrades gracefully to majority prediction.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabelError, DimensionMismatchError, InvalidConfigError
from .privacy import laplace_vector
from .rng import RngStream
from .validation import as_float_matrix


@dataclass(frozen=True)
class SvmConfig:
    epochs: int = 600
    reg: float = 1e-2

    def __post_init__(self):
        if self.epochs < 1 or self.reg <= 0:
            raise InvalidConfigError("epochs must be >= 1 and reg > 0")


@dataclass(frozen=True)
class LinearSvm:
    weights: np.ndarray
    bias: float

    def decision(self, features) -> np.ndarray:
        return as_float_matrix(features, "features") @ self.weights + self.bias

    def predict(self, features) -> np.ndarray:
        """Predicted 0/1 labels."""
        return (self.decision(features) >= 0.0).astype(int)


def train_linear_svm(features, labels, config: SvmConfig | None = None
                     ) -> LinearSvm:
    """Fit the hinge-loss classifier on 0/1 labels."""
    config = config or SvmConfig()
    x = as_float_matrix(features, "features")
    y01 = np.asarray(labels, dtype=int)
    if y01.shape[0] != x.shape[0]:
        raise DimensionMismatchError(
            f"{x.shape[0]} rows but {y01.shape[0]} labels")
    classes = np.unique(y01)
    if classes.size < 2:
        raise DegenerateLabelError(
            f"training labels contain a single class {classes.tolist()}")
    y = 2.0 * y01 - 1.0
    n_samples, n_features = x.shape
    w = np.zeros(n_features)
    b = 0.0
    # The offset keeps the first steps O(1); undamped 1/(reg*t) schedules
    # overshoot the bias badly and recover too slowly at small reg.
    offset = 1.0 / config.reg
    w_acc = np.zeros(n_features)
    b_acc = 0.0
    tail = 0
    for t in range(1, config.epochs + 1):
        margin = y * (x @ w + b)
        active = margin < 1.0
        grad_w = config.reg * w - (x[active].T @ y[active]) / n_samples
        grad_b = -float(np.sum(y[active])) / n_samples
        step = 1.0 / (config.reg * (t + offset))
        w -= step * grad_w
        b -= step * grad_b
        if t > config.epochs // 2:
            w_acc += w
            b_acc += b
            tail += 1
    return LinearSvm(weights=w_acc / tail, bias=float(b_acc / tail))


def misclassification_rate(model: LinearSvm, features, labels) -> float:
    """Fraction of points the model labels incorrectly."""
    y01 = np.asarray(labels, dtype=int)
    pred = model.predict(features)
    if pred.shape[0] != y01.shape[0]:
        raise DimensionMismatchError(
            f"{pred.shape[0]} predictions but {y01.shape[0]} labels")
    return float(np.mean(pred != y01))


def split_indices(n_records: int, train_fraction: float, rng: RngStream):
    """Deterministic shuffled train/test split (train fraction first)."""
    if not 0.0 < train_fraction < 1.0:
        raise InvalidConfigError(
            f"train fraction must lie in (0, 1), got {train_fraction}")
    order = rng.generator().permutation(n_records)
    cut = int(round(train_fraction * n_records))
    cut = min(max(cut, 1), n_records - 1)
    return order[:cut], order[cut:]


def train_test_rate(features, labels, train_idx, test_idx,
                    config: SvmConfig | None = None) -> float:
    """Train on the train split, report the held-out error rate."""
    model = train_linear_svm(features[train_idx], labels[train_idx], config)
    return misclassification_rate(model, features[test_idx], labels[test_idx])


def noise_response_curve(features, labels, epsilons, noise_base: float,
                         trials: int, rng: RngStream,
                         config: SvmConfig | None = None,
                         train_fraction: float = 0.8) -> dict:
    """Held-out error of the probe classifier under budget-scaled noise.

    For each epsilon, features are perturbed with i.i.d. Laplace noise of
    scale ``noise_base / epsilon`` (a direct scalar-release mechanism at
    sensitivity ``noise_base``) and the 80/20 classifier error is averaged
    over seeded trials.  This isolates how the utility metric responds to
    the privacy budget, independent of the measurement pipeline.
    """
    x = as_float_matrix(features, "features")
    rates = {}
    for ei, eps in enumerate(epsilons):
        if eps <= 0:
            raise InvalidConfigError(f"epsilon must be > 0, got {eps}")
        per_trial = []
        for t in range(trials):
            noise = laplace_vector(x.size, noise_base / eps,
                                   rng.child(ei, t, 0)).reshape(x.shape)
            tr, te = split_indices(x.shape[0], train_fraction,
                                   rng.child(ei, t, 1))
            per_trial.append(train_test_rate(x + noise, labels, tr, te, config))
        rates[float(eps)] = float(np.mean(per_trial))
    return rates
