"""Key generation and the versioned text key-file format.

Key files carry seeds and shape parameters, never matrix bytes: holders
regenerate their matrices deterministically.  A level-1 bundle contains
only the measurement key; loading at a level the bundle does not cover
raises an authorization error.
"""

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import sensing
from .embedding import CodingKey, build_coding_key
from .errors import AuthorizationError, DegenerateKeyError, InvalidConfigError
from .reconstruct import AuthorizationLevel
from .rng import CODING, MEASUREMENT, RngStream

FORMAT_LINE = "privsense-key 1"
MEASUREMENT_FILE = "measurement.key"
CODING_FILE = "coding.key"


@dataclass(frozen=True)
class MeasurementKey:
    """Seed and shape of the measurement ensemble."""

    seed: int
    n: int
    m: int
    normalization: str
    basis: str

    def materialize(self) -> sensing.MeasurementEnsemble:
        return sensing.build_ensemble(
            self.n, self.m / self.n, RngStream(self.seed),
            normalization=self.normalization, basis=self.basis)


@dataclass(frozen=True)
class CodingKeySpec:
    """Seed and parameters of the message coding matrix."""

    seed: int
    m: int
    message_len: int
    power_cap: float
    amplitude: float

    def materialize(self) -> CodingKey:
        key = build_coding_key(self.m, self.message_len / self.m,
                               self.power_cap, RngStream(self.seed))
        if key.message_len != self.message_len:
            raise DegenerateKeyError(
                f"coding key regenerated with message length "
                f"{key.message_len}, file says {self.message_len}")
        if abs(key.amplitude - self.amplitude) > 1e-9 * max(1.0, self.amplitude):
            raise DegenerateKeyError(
                "coding key amplitude does not match its file; the file was "
                "edited or written by an incompatible version")
        return key


@dataclass(frozen=True)
class KeySet:
    """Whatever key material one data user holds."""

    measurement: MeasurementKey | None = None
    coding: CodingKeySpec | None = None

    def require(self, level: AuthorizationLevel) -> None:
        if level in (AuthorizationLevel.L1, AuthorizationLevel.L2) \
                and self.measurement is None:
            raise AuthorizationError(
                f"level {level.value} requires the measurement key")
        if level == AuthorizationLevel.L2 and self.coding is None:
            raise AuthorizationError(
                "level l2 requires the coding key")


def _write_fields(path, fields: dict) -> None:
    lines = [FORMAT_LINE] + [f"{k} = {v}" for k, v in fields.items()]
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as handle:
        handle.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def _read_fields(path) -> dict:
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0].strip() != FORMAT_LINE:
        raise InvalidConfigError(
            f"{path}: not a {FORMAT_LINE!r} file")
    fields = {}
    for line in text[1:]:
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidConfigError(f"{path}: malformed line {line!r}")
        fields[key.strip()] = value.strip()
    return fields


def write_measurement_key(key: MeasurementKey, path) -> None:
    _write_fields(path, {
        "kind": "measurement",
        "seed": f"0x{key.seed:016x}",
        "n": key.n,
        "m": key.m,
        "normalization": key.normalization,
        "basis": key.basis,
    })


def write_coding_key(spec: CodingKeySpec, path) -> None:
    _write_fields(path, {
        "kind": "coding",
        "seed": f"0x{spec.seed:016x}",
        "m": spec.m,
        "M": spec.message_len,
        "power_cap": repr(spec.power_cap),
        "amplitude": repr(spec.amplitude),
    })


def read_key_file(path):
    fields = _read_fields(path)
    kind = fields.get("kind")
    if kind == "measurement":
        return MeasurementKey(
            seed=int(fields["seed"], 16),
            n=int(fields["n"]),
            m=int(fields["m"]),
            normalization=fields["normalization"],
            basis=fields["basis"],
        )
    if kind == "coding":
        return CodingKeySpec(
            seed=int(fields["seed"], 16),
            m=int(fields["m"]),
            message_len=int(fields["M"]),
            power_cap=float(fields["power_cap"]),
            amplitude=float(fields["amplitude"]),
        )
    raise InvalidConfigError(f"{path}: unknown key kind {kind!r}")


def keygen(n: int, measurement_rate: float, embedding_rate: float,
           power_cap: float, master: RngStream, out_dir,
           normalization: str = sensing.UNIT_COLUMN,
           basis: str = sensing.DCT,
           bundle: AuthorizationLevel = AuthorizationLevel.L2) -> KeySet:
    """Derive both keys from a master stream and write the bundle.

    ``bundle`` controls which files the output directory receives: an L1
    bundle omits the coding key so its holder cannot decode messages.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meas_seed = master.child(MEASUREMENT).draw_seed()
    code_seed = master.child(CODING).draw_seed()

    ensemble = sensing.build_ensemble(n, measurement_rate,
                                      RngStream(meas_seed),
                                      normalization=normalization, basis=basis)
    measurement = MeasurementKey(seed=meas_seed, n=n, m=ensemble.m,
                                 normalization=normalization, basis=basis)
    write_measurement_key(measurement, out / MEASUREMENT_FILE)

    coding = None
    if bundle == AuthorizationLevel.L2:
        key = build_coding_key(ensemble.m, embedding_rate, power_cap,
                               RngStream(code_seed))
        coding = CodingKeySpec(seed=code_seed, m=ensemble.m,
                               message_len=key.message_len,
                               power_cap=key.power_cap,
                               amplitude=key.amplitude)
        write_coding_key(coding, out / CODING_FILE)
    return KeySet(measurement=measurement, coding=coding)


def load_keyset(keys_dir, level) -> KeySet:
    """Load whatever the directory holds and enforce the claimed level."""
    level = AuthorizationLevel.parse(level)
    keys_dir = Path(keys_dir)
    measurement = None
    coding = None
    meas_path = keys_dir / MEASUREMENT_FILE
    code_path = keys_dir / CODING_FILE
    if meas_path.exists():
        measurement = read_key_file(meas_path)
        if not isinstance(measurement, MeasurementKey):
            raise InvalidConfigError(f"{meas_path}: wrong key kind")
    if code_path.exists():
        coding = read_key_file(code_path)
        if not isinstance(coding, CodingKeySpec):
            raise InvalidConfigError(f"{code_path}: wrong key kind")
    keyset = KeySet(measurement=measurement, coding=coding)
    keyset.require(level)
    return keyset
