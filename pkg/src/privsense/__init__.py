"""Differentially private compressive publication of tabular data.

Records are projected through a keyed random measurement matrix,
perturbed with calibrated Laplace noise, and optionally overlaid with a
keyed message.  Three reconstruction tiers consume the published tables:
no keys (perturbed measurements as-is), the measurement key (constrained
l1 recovery), or both keys (message cancellation, decoding and an
improved re-solve).
"""

from .embedding import CodingKey, MessageVector, build_coding_key
from .errors import PrivsenseError
from .estimators import CompressivePublisher, TieredReconstructor
from .privacy import NoiseCalibration, PrivacyBudget
from .reconstruct import AuthorizationLevel, ReconstructionResult
from .rng import RngStream
from .sensing import MeasurementEnsemble, SparsityProfile, build_ensemble
from .solver import BpdnProblem, SolverCertificate, SolverConfig
from .sweep import ExperimentConfig, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AuthorizationLevel",
    "BpdnProblem",
    "CodingKey",
    "CompressivePublisher",
    "ExperimentConfig",
    "MeasurementEnsemble",
    "MessageVector",
    "NoiseCalibration",
    "PrivacyBudget",
    "PrivsenseError",
    "ReconstructionResult",
    "RngStream",
    "SolverCertificate",
    "SolverConfig",
    "SparsityProfile",
    "TieredReconstructor",
    "build_coding_key",
    "build_ensemble",
    "run_sweep",
    "__version__",
]
