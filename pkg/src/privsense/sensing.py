"""Measurement ensembles: keyed random projection plus sparse transform.

The ensemble bundles the measurement matrix, the orthonormal analysis
basis and their product (the operator applied to coefficient vectors).
All operations are pure; ensembles are immutable after construction.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatchError, InvalidConfigError, InvalidDimensionError
from .rng import RngStream, as_generator
from .validation import as_float_vector

#: Empirical recovery threshold on the restricted-isometry estimate.
RECOVERY_RIP_THRESHOLD = np.sqrt(2.0) - 1.0

UNIT_COLUMN = "unit-column"
RAW_SCALED = "raw-scaled"
NORMALIZATION_MODES = (UNIT_COLUMN, RAW_SCALED)

DCT = "dct"
IDENTITY = "identity"
BASES = (DCT, IDENTITY)


@dataclass(frozen=True)
class MeasurementEnsemble:
    """Measurement matrix ``phi`` (m x n), orthonormal basis ``psi``
    (n x n) and their product ``sensing = phi @ psi``."""

    phi: np.ndarray
    psi: np.ndarray
    sensing: np.ndarray
    m: int
    n: int
    normalization: str
    basis: str
    stream: RngStream | None = None


@dataclass(frozen=True)
class SparsityProfile:
    """Number of coefficients retained by hard thresholding."""

    s: int


def build_ensemble(n: int, measurement_rate: float, rng,
                   normalization: str = UNIT_COLUMN,
                   basis: str = DCT) -> MeasurementEnsemble:
    """Draw a seeded Gaussian measurement matrix and pair it with a basis.

    ``unit-column`` scales every column of the Gaussian draw to unit
    Euclidean norm, which pins the projection's sensitivity to exactly 1.
    ``raw-scaled`` uses i.i.d. N(0, 1/m) entries, the classical scaling
    under which column norms merely concentrate near 1.
    """
    if n < 4:
        raise InvalidDimensionError(f"ambient dimension must be >= 4, got {n}")
    if not 0.0 < measurement_rate < 1.0:
        raise InvalidConfigError(
            f"measurement rate must lie in (0, 1), got {measurement_rate}")
    if normalization not in NORMALIZATION_MODES:
        raise InvalidConfigError(f"unknown normalization {normalization!r}")
    if basis not in BASES:
        raise InvalidConfigError(f"unknown basis {basis!r}")
    m = int(round(measurement_rate * n))
    if m < 2:
        raise InvalidConfigError(
            f"measurement rate {measurement_rate} gives m={m} < 2 at n={n}")
    stream = rng if isinstance(rng, RngStream) else None
    phi = linalg.gaussian_matrix(m, n, rng)
    if normalization == UNIT_COLUMN:
        phi = phi / np.linalg.norm(phi, axis=0)
    else:
        phi = phi / np.sqrt(m)
    psi = linalg.dct_basis(n) if basis == DCT else np.eye(n)
    return MeasurementEnsemble(phi=phi, psi=psi, sensing=phi @ psi, m=m, n=n,
                               normalization=normalization, basis=basis,
                               stream=stream)


def identity_ensemble(n: int) -> MeasurementEnsemble:
    """Square pass-through ensemble (phi = psi = I), for tests only."""
    if n < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {n}")
    eye = np.eye(n)
    return MeasurementEnsemble(phi=eye, psi=eye.copy(), sensing=eye.copy(),
                               m=n, n=n, normalization=UNIT_COLUMN,
                               basis=IDENTITY, stream=None)


def sample(ensemble: MeasurementEnsemble, x) -> np.ndarray:
    """Forward measurement ``phi @ x`` of one record."""
    vec = as_float_vector(x, "x")
    if vec.shape[0] != ensemble.n:
        raise DimensionMismatchError(
            f"record has dimension {vec.shape[0]}, ensemble expects {ensemble.n}")
    return ensemble.phi @ vec


def analyze(ensemble: MeasurementEnsemble, x) -> np.ndarray:
    """Coefficients of ``x`` in the ensemble's basis (``psi.T @ x``)."""
    vec = as_float_vector(x, "x")
    if vec.shape[0] != ensemble.n:
        raise DimensionMismatchError(
            f"record has dimension {vec.shape[0]}, ensemble expects {ensemble.n}")
    return ensemble.psi.T @ vec


def synthesize(ensemble: MeasurementEnsemble, s) -> np.ndarray:
    """Signal reconstruction ``psi @ s`` from coefficients."""
    vec = as_float_vector(s, "s")
    if vec.shape[0] != ensemble.n:
        raise DimensionMismatchError(
            f"coefficients have dimension {vec.shape[0]}, ensemble expects {ensemble.n}")
    return ensemble.psi @ vec


def sparsify(s, profile: SparsityProfile) -> np.ndarray:
    """Keep the ``profile.s`` largest-magnitude entries, zero the rest.

    Ties keep the lowest index (stable ordering), so the result is
    deterministic.
    """
    vec = as_float_vector(s, "s")
    if not 1 <= profile.s <= vec.shape[0]:
        raise InvalidConfigError(
            f"sparsity {profile.s} outside [1, {vec.shape[0]}]")
    if profile.s >= vec.shape[0]:
        return vec.copy()
    order = np.argsort(-np.abs(vec), kind="stable")
    out = np.zeros_like(vec)
    keep = order[:profile.s]
    out[keep] = vec[keep]
    return out


def rip_probe(ensemble: MeasurementEnsemble, s: int, trials: int, rng) -> float:
    """Empirical lower bound on the restricted-isometry constant.

    Maximum of ``| ||A u||^2 - 1 |`` over random s-sparse unit vectors u.
    A nested trial sequence (same stream, more trials) can only increase
    the estimate, since it is a running maximum.
    """
    if not 1 <= s <= ensemble.m:
        raise InvalidConfigError(f"sparsity {s} outside [1, m={ensemble.m}]")
    if trials < 1:
        raise InvalidConfigError(f"trials must be >= 1, got {trials}")
    gen = as_generator(rng)
    worst = 0.0
    for _ in range(trials):
        support = gen.choice(ensemble.n, size=s, replace=False)
        u = np.zeros(ensemble.n)
        u[support] = gen.standard_normal(s)
        u /= np.linalg.norm(u)
        worst = max(worst, abs(float(np.sum((ensemble.sensing @ u) ** 2)) - 1.0))
    return worst
