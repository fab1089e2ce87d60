"""Keyed message embedding in the measurement domain.

A secret seed generates a column-normalized Gaussian coding matrix B.
Messages are dense antipodal vectors (each entry is -a or +a) added to
the measurements; the amplitude is the largest value that provably keeps
``||B w||_2`` within the configured power cap for every message.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (DimensionMismatchError, InvalidConfigError,
                     InvalidMessageError)
from .rng import RngStream
from .sensing import MeasurementEnsemble
from .validation import as_float_vector

# Power iteration slightly underestimates the top singular value; this
# inflation keeps the amplitude bound valid for every message.
_SIGMA_SAFETY = 1.0 + 1e-9


@dataclass(frozen=True)
class CodingKey:
    """Coding matrix plus the amplitude honoring the power constraint."""

    matrix: np.ndarray           # (m, message_len), unit-norm columns
    message_len: int
    amplitude: float
    power_cap: float
    sigma_max: float
    stream: RngStream | None = None

    @property
    def m(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class MessageVector:
    """Antipodal encoding of a bit string: bit 1 -> +a, bit 0 -> -a."""

    values: np.ndarray
    amplitude: float

    @property
    def bits(self) -> str:
        return decode_bits(self.values)


def build_coding_key(m: int, embedding_rate: float, power_cap: float,
                     rng) -> CodingKey:
    """Generate the coding matrix from a seed and size the amplitude.

    ``message_len = round(embedding_rate * m)`` and the amplitude is
    ``power_cap / (sigma_max(B) * sqrt(message_len))``, the tightest
    deterministic choice under ``||B w|| <= sigma_max ||w||``.
    """
    if not 0.0 < embedding_rate < 1.0:
        raise InvalidConfigError(
            f"embedding rate must lie in (0, 1), got {embedding_rate}")
    if not power_cap > 0:
        raise InvalidConfigError(f"power cap must be > 0, got {power_cap}")
    message_len = int(round(embedding_rate * m))
    if message_len < 1:
        raise InvalidConfigError(
            f"embedding rate {embedding_rate} gives an empty message at m={m}")
    if message_len >= m:
        raise InvalidConfigError(
            f"message length {message_len} must stay below m={m}")
    stream = rng if isinstance(rng, RngStream) else None
    b = linalg.gaussian_matrix(m, message_len, rng)
    b = b / np.linalg.norm(b, axis=0)
    sigma = linalg.sigma_max(b) * _SIGMA_SAFETY
    amplitude = power_cap / (sigma * np.sqrt(message_len))
    return CodingKey(matrix=b, message_len=message_len,
                     amplitude=float(amplitude), power_cap=float(power_cap),
                     sigma_max=float(sigma), stream=stream)


def encode_message(bits, amplitude: float) -> MessageVector:
    """Map a bit string (or 0/1 sequence) to an antipodal vector."""
    if isinstance(bits, str):
        values = []
        for ch in bits:
            if ch not in "01":
                raise InvalidMessageError(f"non-binary character {ch!r}")
            values.append(int(ch))
        arr = np.array(values, dtype=float)
    else:
        arr = np.asarray(bits, dtype=float)
        if arr.ndim != 1 or not np.all(np.isin(arr, (0.0, 1.0))):
            raise InvalidMessageError("message bits must be a 1-D 0/1 sequence")
    if arr.size == 0:
        raise InvalidMessageError("message must contain at least one bit")
    return MessageVector(values=amplitude * (2.0 * arr - 1.0),
                         amplitude=float(amplitude))


def decode_bits(values) -> str:
    """Inverse of :func:`encode_message`: +a -> '1', -a -> '0'."""
    arr = as_float_vector(values, "message values")
    return "".join("1" if v > 0 else "0" for v in arr)


def random_message(key: CodingKey, rng) -> MessageVector:
    """Uniformly random message for this key, deterministic per stream."""
    from .rng import as_generator
    bits = as_generator(rng).integers(0, 2, size=key.message_len)
    return encode_message(bits, key.amplitude)


def embed(ensemble: MeasurementEnsemble, s, key: CodingKey | None,
          message: MessageVector | None, z) -> np.ndarray:
    """Watermarked measurement vector: sensing @ s + B w + z.

    With ``key`` (or ``message``) absent the embedding is disabled and the
    output is the plain private measurement ``sensing @ s + z``.
    """
    coeff = as_float_vector(s, "s")
    noise = as_float_vector(z, "z")
    if coeff.shape[0] != ensemble.n:
        raise DimensionMismatchError(
            f"coefficients have dimension {coeff.shape[0]}, expected {ensemble.n}")
    if noise.shape[0] != ensemble.m:
        raise DimensionMismatchError(
            f"noise has dimension {noise.shape[0]}, expected {ensemble.m}")
    out = ensemble.sensing @ coeff + noise
    if key is None or message is None:
        return out
    if key.m != ensemble.m:
        raise DimensionMismatchError(
            f"coding key is sized for m={key.m}, ensemble has m={ensemble.m}")
    w = as_float_vector(message.values, "w")
    if w.shape[0] != key.message_len:
        raise DimensionMismatchError(
            f"message has {w.shape[0]} entries, key expects {key.message_len}")
    return out + key.matrix @ w
