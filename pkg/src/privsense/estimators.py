"""Estimator-style front end so the pipeline composes with the
scikit-learn ecosystem (get_params/set_params, fit/transform, cloning).

``CompressivePublisher.fit`` derives the keys from the seed and sizes the
embedding power from the training table; ``transform`` publishes.  The
companion ``TieredReconstructor`` inverts published tables at whatever
authorization level its key material supports.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import pipeline, sensing
from .embedding import build_coding_key
from .errors import AuthorizationError, InvalidConfigError
from .keys import KeySet, load_keyset
from .reconstruct import AuthorizationLevel
from .rng import CODING, MEASUREMENT, NOISE, RngStream
from .solver import SolverConfig
from .validation import as_float_matrix


class CompressivePublisher(BaseEstimator, TransformerMixin):
    """Publish [0, 1] tables as privatized, optionally watermarked
    measurement vectors.

    Parameters
    ----------
    epsilon : float
        Per-record privacy budget.
    measurement_rate : float
        Compression ratio m/n in (0, 1).
    embedding_rate : float
        Message-length ratio M/m in (0, 1); ignored when ``embed`` is off.
    power_fraction : float
        Embedding power cap as a fraction of the median clean measurement
        norm of the fitted table.
    calibration : {"paper", "calibrated"}
        Laplace scale rule: sqrt(m)/epsilon, or the measurement matrix's
        worst-case column norm over epsilon.
    normalization : {"unit-column", "raw-scaled"}
        Measurement matrix normalization.
    basis : {"dct", "identity"}
        Sparse analysis basis.
    embed : bool
        Whether to add per-record messages.
    sparsify : int or None
        Optional hard-thresholding level applied to coefficients before
        measurement (synthetic-data mode).
    seed : int
        Master seed; keys and noise streams derive from it.
    """

    def __init__(self, epsilon=1.0, measurement_rate=0.5, embedding_rate=0.2,
                 power_fraction=0.1, calibration="calibrated",
                 normalization="unit-column", basis="dct", embed=True,
                 sparsify=None, seed=0):
        self.epsilon = epsilon
        self.measurement_rate = measurement_rate
        self.embedding_rate = embedding_rate
        self.power_fraction = power_fraction
        self.calibration = calibration
        self.normalization = normalization
        self.basis = basis
        self.embed = embed
        self.sparsify = sparsify
        self.seed = seed

    def fit(self, X, y=None):
        table = as_float_matrix(X, "X")
        root = RngStream(self.seed)
        self.n_features_in_ = table.shape[1]
        self.ensemble_ = sensing.build_ensemble(
            table.shape[1], self.measurement_rate, root.child(MEASUREMENT),
            normalization=self.normalization, basis=self.basis)
        self.coding_key_ = None
        if self.embed:
            norms = np.linalg.norm(table @ self.ensemble_.phi.T, axis=1)
            power_cap = self.power_fraction * float(np.median(norms))
            if power_cap <= 0:
                raise InvalidConfigError(
                    "embedding power came out non-positive; the fitted "
                    "table has no signal energy")
            self.coding_key_ = build_coding_key(
                self.ensemble_.m, self.embedding_rate, power_cap,
                root.child(CODING))
        self._noise_stream = root.child(NOISE)
        return self

    def transform(self, X):
        """Published (records, m) measurement table for X."""
        if not hasattr(self, "ensemble_"):
            raise InvalidConfigError("publisher is not fitted; call fit first")
        result = pipeline.publish_table(
            as_float_matrix(X, "X"), self.ensemble_, self.coding_key_,
            self.epsilon, self.calibration, self._noise_stream,
            embed_messages=self.embed, sparsify_level=self.sparsify)
        self.provenance_ = result.provenance
        self.message_bits_ = result.message_bits
        return result.measurements


class TieredReconstructor(BaseEstimator, TransformerMixin):
    """Recover records from published measurements at one authorization
    level.

    Parameters
    ----------
    level : {"l0", "l1", "l2"}
        What key material the caller claims.
    keys : KeySet, CompressivePublisher, or path
        Key source.  A fitted publisher hands over its in-memory keys; a
        path is loaded as a key-file bundle.  Level 0 needs none.
    provenance : dict or None
        Publication provenance (for the default solver radius).
    delta : float or None
        Explicit solver radius overriding the provenance-derived default.
    """

    def __init__(self, level="l2", keys=None, provenance=None, delta=None):
        self.level = level
        self.keys = keys
        self.provenance = provenance
        self.delta = delta

    def fit(self, X=None, y=None):
        level = AuthorizationLevel.parse(self.level)
        ensemble = None
        coding = None
        if isinstance(self.keys, CompressivePublisher):
            if not hasattr(self.keys, "ensemble_"):
                raise InvalidConfigError("publisher key source is not fitted")
            ensemble = self.keys.ensemble_
            coding = self.keys.coding_key_
            if level == AuthorizationLevel.L2 and coding is None:
                raise AuthorizationError(
                    "level l2 requires a coding key but the publisher "
                    "was fitted without embedding")
        elif isinstance(self.keys, KeySet):
            self.keys.require(level)
            if self.keys.measurement is not None:
                ensemble = self.keys.measurement.materialize()
            if self.keys.coding is not None:
                coding = self.keys.coding.materialize()
        elif self.keys is not None:
            keyset = load_keyset(self.keys, level)
            ensemble = keyset.measurement.materialize() \
                if keyset.measurement else None
            coding = keyset.coding.materialize() if keyset.coding else None
        elif level != AuthorizationLevel.L0:
            raise AuthorizationError(
                f"level {level.value} requires key material")
        self.level_ = level
        self.ensemble_ = ensemble
        self.coding_key_ = coding
        return self

    def transform(self, X):
        """Recovered (records, n) table; level 0 passes measurements
        through unchanged."""
        if not hasattr(self, "level_"):
            self.fit()
        prov = self.provenance
        if prov is None and isinstance(self.keys, CompressivePublisher):
            prov = getattr(self.keys, "provenance_", None)
        result = pipeline.reconstruct_table(
            as_float_matrix(X, "X"), self.level_, ensemble=self.ensemble_,
            coding_key=self.coding_key_, provenance=prov, delta=self.delta,
            config=SolverConfig())
        self.last_result_ = result
        return result.x_star
