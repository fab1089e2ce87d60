"""Sensitivity, Laplace noise and the private measurement mechanism.

Two noise calibrations are exposed and labelled rather than silently
merged: ``paper`` uses scale sqrt(m)/epsilon for m measurements, while
``calibrated`` uses the measurement matrix's actual worst-case column
norm over epsilon (exactly 1/epsilon for unit-column matrices).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidConfigError
from .linalg import column_l2_norms
from .rng import as_generator
from .validation import as_float_vector

PAPER = "paper"
CALIBRATED = "calibrated"
CALIBRATION_MODES = (PAPER, CALIBRATED)


@dataclass(frozen=True)
class PrivacyBudget:
    """Per-record privacy budget; smaller epsilon means more noise."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidConfigError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class NoiseCalibration:
    """Laplace scale parameter plus the rule that produced it."""

    mode: str
    scale: float

    def __post_init__(self):
        if self.mode not in CALIBRATION_MODES:
            raise InvalidConfigError(f"unknown calibration mode {self.mode!r}")
        if not self.scale > 0:
            raise InvalidConfigError(f"scale must be > 0, got {self.scale}")


def l2_sensitivity(phi) -> float:
    """Worst-case column norm of the measurement matrix.

    Equals the largest change in the projection output when one input
    coordinate moves by one.
    """
    return float(np.max(column_l2_norms(phi)))


def calibrate(mode: str, phi, m: int, budget: PrivacyBudget) -> NoiseCalibration:
    """Build the noise calibration for a measurement matrix."""
    if mode == PAPER:
        scale = np.sqrt(m) / budget.epsilon
    elif mode == CALIBRATED:
        scale = l2_sensitivity(phi) / budget.epsilon
    else:
        raise InvalidConfigError(f"unknown calibration mode {mode!r}")
    return NoiseCalibration(mode=mode, scale=float(scale))


def laplace_vector(dim: int, scale: float, rng) -> np.ndarray:
    """Zero-mean Laplace draws via the inverse CDF of uniforms.

    ``z = -scale * sgn(u) * ln(1 - 2|u|)`` for u uniform on (-1/2, 1/2);
    exact, branch free, and deterministic under a seeded stream.
    """
    if not scale > 0:
        raise InvalidConfigError(f"Laplace scale must be > 0, got {scale}")
    if dim < 1:
        raise InvalidConfigError(f"dimension must be >= 1, got {dim}")
    gen = as_generator(rng)
    u = gen.random(dim) - 0.5
    # u == -1/2 has probability 2^-53 per draw; clamp keeps entries finite.
    t = np.maximum(1.0 - 2.0 * np.abs(u), np.finfo(float).tiny)
    sgn = np.where(u >= 0.0, 1.0, -1.0)
    return -scale * sgn * np.log(t)


def laplace_sample(scale: float, rng) -> float:
    """Single Laplace draw; see :func:`laplace_vector`."""
    return float(laplace_vector(1, scale, rng)[0])


def privatize(y, budget: PrivacyBudget, calibration: NoiseCalibration,
              rng) -> np.ndarray:
    """Add i.i.d. Laplace noise at the calibrated scale to a measurement
    vector.  The calibration itself travels with the published table's
    provenance; this function only produces the noisy vector."""
    vec = as_float_vector(y, "y")
    return vec + laplace_vector(vec.shape[0], calibration.scale, rng)


def default_delta(calibration: NoiseCalibration, m: int) -> float:
    """Root of the expected squared noise norm, ``scale * sqrt(2 m)``.

    Used as the default residual radius handed to the constrained solver,
    so reconstruction needs only the published calibration, never the
    realized noise.
    """
    if m < 1:
        raise InvalidConfigError(f"m must be >= 1, got {m}")
    return float(calibration.scale * np.sqrt(2.0 * m))


@dataclass(frozen=True)
class RatioProbeResult:
    """Outcome of the empirical indistinguishability probe."""

    max_log_ratio: float
    conclusive: bool
    bins_used: int


def scalar_laplace_mechanism(scale: float):
    """Callable ``(value, rng, size) -> samples`` adding Laplace noise."""

    def mechanism(value, rng, size):
        return float(value) + laplace_vector(size, scale, rng)

    return mechanism


def dp_ratio_probe(mechanism, input_a, input_b, epsilon: float,
                   bins: int, trials: int, rng,
                   min_count: int = 50) -> RatioProbeResult:
    """Histogram-based smoke test of an epsilon-indistinguishability claim.

    Runs the mechanism ``trials`` times on each of two neighboring inputs,
    histograms both runs over shared quantile bins of the pooled sample,
    and reports the largest absolute log probability ratio over bins where
    both counts reach ``min_count``.  A statistical check, not a proof: an
    honestly calibrated mechanism stays near or below epsilon, an
    under-noised one overshoots.
    """
    if bins < 5:
        raise InvalidConfigError(f"bins must be >= 5, got {bins}")
    if trials < 10_000:
        raise InvalidConfigError(f"trials must be >= 10^4, got {trials}")
    if not epsilon > 0:
        raise InvalidConfigError(f"epsilon must be > 0, got {epsilon}")
    gen = as_generator(rng)
    out_a = np.asarray(mechanism(input_a, gen, trials), dtype=float)
    out_b = np.asarray(mechanism(input_b, gen, trials), dtype=float)
    pooled = np.concatenate([out_a, out_b])
    edges = np.unique(np.quantile(pooled, np.linspace(0.0, 1.0, bins + 1)))
    if edges.size < 2:
        return RatioProbeResult(0.0, False, 0)
    edges[0] -= 1e-9
    edges[-1] += 1e-9
    count_a, _ = np.histogram(out_a, bins=edges)
    count_b, _ = np.histogram(out_b, bins=edges)
    ok = (count_a >= min_count) & (count_b >= min_count)
    if not np.any(ok):
        return RatioProbeResult(0.0, False, 0)
    ratios = np.abs(np.log(count_a[ok] / count_b[ok]))
    return RatioProbeResult(float(np.max(ratios)), True, int(np.sum(ok)))
