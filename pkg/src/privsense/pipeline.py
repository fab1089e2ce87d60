"""Table-level publication and reconstruction with provenance.

Publication runs per record: basis analysis, optional hard thresholding,
measurement, Laplace perturbation, optional message embedding.  The
published artifact is the measurement table plus a provenance record
carrying everything a reconstructing party needs apart from the keys
themselves (noise calibration, shapes, power bound, stream addresses).
"""

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from . import privacy, sensing
from .embedding import CodingKey, encode_message
from .errors import DimensionMismatchError, InvalidConfigError
from .privacy import NoiseCalibration, PrivacyBudget
from .reconstruct import (AuthorizationLevel, ReconstructionResult,
                          reconstruct_full, reconstruct_l0, reconstruct_semi)
from .rng import MESSAGE, NOISE, RngStream
from .solver import SolverConfig

PROVENANCE_FORMAT = "privsense-publish 1"


@dataclass(frozen=True)
class PublishResult:
    measurements: np.ndarray          # (records, m)
    provenance: dict
    message_bits: list[str] | None    # per-record embedded bits


def publish_table(values, ensemble: sensing.MeasurementEnsemble,
                  coding_key: CodingKey | None, epsilon: float,
                  calibration_mode: str, stream: RngStream,
                  embed_messages: bool = True,
                  sparsify_level: int | None = None) -> PublishResult:
    """Publish every row of a [0, 1] table at the given budget.

    Records are processed independently with per-record noise and message
    streams derived from ``stream``, so any subset of rows reproduces
    bit-identically and rows may be processed in parallel.
    """
    table = np.asarray(values, dtype=float)
    if table.ndim != 2:
        raise InvalidConfigError("publish expects a 2-D table")
    n_records, n = table.shape
    if n != ensemble.n:
        raise DimensionMismatchError(
            f"table width {n} does not match ensemble n={ensemble.n}")
    budget = PrivacyBudget(epsilon)
    calibration = privacy.calibrate(calibration_mode, ensemble.phi,
                                    ensemble.m, budget)

    coeffs = table @ ensemble.psi  # rows are per-record coefficient vectors
    if sparsify_level is not None:
        profile = sensing.SparsityProfile(sparsify_level)
        coeffs = np.vstack([sensing.sparsify(coeffs[i], profile)
                            for i in range(n_records)])
    clean = coeffs @ ensemble.sensing.T

    published = np.empty((n_records, ensemble.m))
    bits = [] if (embed_messages and coding_key is not None) else None
    for i in range(n_records):
        noisy = privacy.privatize(clean[i], budget, calibration,
                                  stream.child(NOISE, i))
        if bits is not None:
            gen = stream.child(MESSAGE, i).generator()
            message = encode_message(gen.integers(0, 2, coding_key.message_len),
                                     coding_key.amplitude)
            noisy = noisy + coding_key.matrix @ message.values
            bits.append(message.bits)
        published[i] = noisy

    provenance = {
        "format": PROVENANCE_FORMAT,
        "records": int(n_records),
        "n": int(ensemble.n),
        "m": int(ensemble.m),
        "normalization": ensemble.normalization,
        "basis": ensemble.basis,
        "epsilon": float(epsilon),
        "calibration": {"mode": calibration.mode,
                        "scale": float(calibration.scale)},
        "sparsify": None if sparsify_level is None else int(sparsify_level),
        "embedding": {
            "enabled": bool(bits is not None),
            "message_len": int(coding_key.message_len) if bits is not None else 0,
            "power_cap": float(coding_key.power_cap) if bits is not None else 0.0,
        },
        "output_kind": "watermarked" if bits is not None else "privatized",
        "stream": {"seed": f"0x{stream.seed & ((1 << 64) - 1):016x}",
                   "key": list(stream.key)},
    }
    return PublishResult(measurements=published, provenance=provenance,
                         message_bits=bits)


def delta_from_provenance(provenance: dict) -> float:
    """Default solver radius: the RMS noise norm of the recorded
    calibration, so reconstruction never needs the realized noise."""
    cal = provenance["calibration"]
    return privacy.default_delta(
        NoiseCalibration(mode=cal["mode"], scale=cal["scale"]),
        int(provenance["m"]))


def reconstruct_table(published, level, ensemble=None, coding_key=None,
                      provenance=None, delta=None,
                      config: SolverConfig | None = None
                      ) -> ReconstructionResult:
    """Dispatch reconstruction of a published table at one level.

    ``delta`` defaults to the provenance-derived noise radius.  Level 0
    needs neither keys nor provenance; level 2 falls back to the
    single-solve path when publication carried no embedded messages.
    """
    level = AuthorizationLevel.parse(level)
    table = np.asarray(published, dtype=float)
    if level == AuthorizationLevel.L0:
        return ReconstructionResult(x_star=reconstruct_l0(table), bits=None,
                                    input_kind="published")
    if ensemble is None:
        raise InvalidConfigError(f"level {level.value} requires the "
                                 "measurement ensemble")
    if delta is None:
        if provenance is None:
            raise InvalidConfigError(
                "either delta or provenance must be supplied")
        delta = delta_from_provenance(provenance)
    input_kind = "unspecified"
    if provenance is not None:
        input_kind = provenance.get("output_kind", "unspecified")
    if level == AuthorizationLevel.L1:
        return reconstruct_semi(table, ensemble, delta, config,
                                input_kind=input_kind)
    embedded = provenance is None or provenance["embedding"]["enabled"]
    key = coding_key if embedded else None
    return reconstruct_full(table, ensemble, key, delta, config,
                            input_kind=input_kind)


def l2_error_metric(original, recovered):
    """Per-record Euclidean distances and their mean."""
    a = np.asarray(original, dtype=float)
    b = np.asarray(recovered, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"table shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 1:
        a = a[None, :]
        b = b[None, :]
    per_record = np.linalg.norm(a - b, axis=1)
    return float(np.mean(per_record)), per_record


def _atomic_write(path, text: str) -> None:
    tmp = str(path) + ".tmp"
    with open(tmp, "w", newline="") as handle:
        handle.write(text)
    os.replace(tmp, path)


def save_published_csv(result: PublishResult, path) -> None:
    """Measurement table as ``rec_id, y_1..y_m`` plus a JSON sidecar."""
    m = result.measurements.shape[1]
    lines = [",".join(["rec_id"] + [f"y_{j + 1}" for j in range(m)])]
    for i, row in enumerate(result.measurements):
        lines.append(",".join([str(i)] + [repr(float(v)) for v in row]))
    _atomic_write(path, "\n".join(lines) + "\n")
    _atomic_write(str(path) + ".provenance.json",
                  json.dumps(result.provenance, sort_keys=True, indent=2)
                  + "\n")


def load_published_csv(path):
    """Read a published table and its provenance sidecar."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = list(reader)
    if not header or header[0] != "rec_id":
        raise InvalidConfigError(f"{path}: expected rec_id header")
    table = np.array([[float(v) for v in row[1:]] for row in rows])
    sidecar = str(path) + ".provenance.json"
    provenance = None
    if os.path.exists(sidecar):
        with open(sidecar) as handle:
            provenance = json.load(handle)
    return table, provenance
