"""Tiered reconstruction of published measurement vectors.

Level 0 holds no keys and consumes the published vectors as-is.  Level 1
holds the measurement key and runs one constrained solve per record.
Level 2 additionally holds the coding key: it first cancels the embedded
message with an annihilating projection, solves in the projected domain,
estimates the message by least squares, snaps it to the antipodal
alphabet, strips it from the measurements and re-solves at full size.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .embedding import CodingKey, decode_bits
from .errors import DimensionMismatchError, MissingMessageError
from .sensing import MeasurementEnsemble
from .solver import SolverCertificate, SolverConfig, sign_pos, solve_bpdn_batch
from .validation import as_float_matrix, as_float_vector


class AuthorizationLevel(enum.Enum):
    """What key material a data user holds."""

    L0 = "l0"
    L1 = "l1"
    L2 = "l2"

    @classmethod
    def parse(cls, text) -> "AuthorizationLevel":
        if isinstance(text, cls):
            return text
        return cls(str(text).lower())


@dataclass(frozen=True)
class ReconstructionResult:
    """Recovered record(s) plus solver evidence.

    ``x_star`` is absent for level 0; ``bits`` only present for level 2.
    Certificates are keyed by solve stage ("main" for the single-solve
    path, "projected"/"final" for the two-stage path).
    """

    x_star: np.ndarray | None
    bits: list[str] | None
    certificates: dict[str, list[SolverCertificate]] = field(default_factory=dict)
    input_kind: str = "unspecified"

    @property
    def converged(self) -> np.ndarray:
        flags = None
        for certs in self.certificates.values():
            stage = np.array([c.converged for c in certs], dtype=bool)
            flags = stage if flags is None else (flags & stage)
        if flags is None:
            return np.array([], dtype=bool)
        return flags


def reconstruct_l0(published) -> np.ndarray:
    """Identity pass-through: without keys the published measurements are
    themselves the level-0 product analysed downstream."""
    arr = np.asarray(published, dtype=float)
    return arr.copy()


def _as_columns(y):
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 1:
        return arr[:, None], True
    return as_float_matrix(arr, "published").T.copy(), False
    # note: table input is (records, m); columns are per-record vectors


def reconstruct_semi(y_pub, ensemble: MeasurementEnsemble, delta: float,
                     config: SolverConfig | None = None,
                     input_kind: str = "unspecified") -> ReconstructionResult:
    """Single constrained solve against the full sensing operator.

    Accepts one m-vector or a (records, m) table; whichever published
    vector the caller's authorization exposes is used and recorded.
    """
    cols, single = _as_columns(y_pub)
    if cols.shape[0] != ensemble.m:
        raise DimensionMismatchError(
            f"published vectors have dimension {cols.shape[0]}, "
            f"ensemble has m={ensemble.m}")
    coeffs, certs = solve_bpdn_batch(ensemble.sensing, cols, delta, config)
    x_star = ensemble.psi @ coeffs
    out = x_star[:, 0] if single else x_star.T
    return ReconstructionResult(x_star=out, bits=None,
                                certificates={"main": certs},
                                input_kind=input_kind)


def build_annihilator(key: CodingKey) -> np.ndarray:
    """Orthonormal-row matrix F with F B = 0, dropping the embedded
    message from the measurement domain; F is (m - M) x m."""
    return linalg.orthonormal_null_basis(key.matrix)


def reconstruct_full(y_w, ensemble: MeasurementEnsemble,
                     key: CodingKey | None, delta: float,
                     config: SolverConfig | None = None,
                     delta_projected: float | None = None,
                     input_kind: str = "unspecified") -> ReconstructionResult:
    """Two-stage recovery with message decoding.

    Stage order per record: (1) project the watermarked vector through
    the annihilator; (2) constrained solve against the projected
    operator; (3) least-squares estimate of the message from the
    unexplained measurement part; (4) snap each entry to +-amplitude with
    sgn(0) = +1; (5) strip the snapped message and re-solve at full size.
    With no coding key the embedding is disabled and this degenerates to
    the single-solve path.
    """
    if key is None:
        result = reconstruct_semi(y_w, ensemble, delta, config,
                                  input_kind=input_kind)
        return ReconstructionResult(x_star=result.x_star, bits=None,
                                    certificates=result.certificates,
                                    input_kind=input_kind)
    cols, single = _as_columns(y_w)
    if cols.shape[0] != ensemble.m:
        raise DimensionMismatchError(
            f"published vectors have dimension {cols.shape[0]}, "
            f"ensemble has m={ensemble.m}")
    annihilator = build_annihilator(key)
    t_dim = annihilator.shape[0]
    if delta_projected is None:
        # The projection keeps t_dim of m orthonormal noise directions, so
        # the expected squared noise norm shrinks by t_dim / m.
        delta_projected = float(delta * np.sqrt(t_dim / ensemble.m))

    projected = annihilator @ cols
    proj_coeffs, proj_certs = solve_bpdn_batch(
        annihilator @ ensemble.sensing, projected, delta_projected, config)

    unexplained = cols - ensemble.sensing @ proj_coeffs
    w_ls = np.column_stack([
        linalg.least_squares(key.matrix, unexplained[:, j])
        for j in range(unexplained.shape[1])])
    w_snapped = key.amplitude * sign_pos(w_ls)

    stripped = cols - key.matrix @ w_snapped
    final_coeffs, final_certs = solve_bpdn_batch(
        ensemble.sensing, stripped, delta, config)
    x_star = ensemble.psi @ final_coeffs

    bits = [decode_bits(w_snapped[:, j]) for j in range(w_snapped.shape[1])]
    out = x_star[:, 0] if single else x_star.T
    return ReconstructionResult(
        x_star=out,
        bits=bits,
        certificates={"projected": proj_certs, "final": final_certs},
        input_kind=input_kind)


def decode_message(result: ReconstructionResult) -> list[str]:
    """Decoded bit strings of a full reconstruction (+a -> 1, -a -> 0)."""
    if result.bits is None:
        raise MissingMessageError(
            "no embedded message: result was not produced by a full "
            "(level-2) reconstruction with a coding key")
    return list(result.bits)
