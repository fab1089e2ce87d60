"""Tabular ingestion, [0, 1] encoding and synthetic data generation.

Raw CSV columns are declared binary, categorical or continuous through
schema hints.  Binary columns map onto {0, 1}, categorical columns are
one-hot expanded, continuous columns are min-max scaled; the encoded
width becomes the ambient dimension seen by the measurement pipeline.
"""

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import linalg
from .errors import InvalidConfigError, InvalidDimensionError
from .rng import RngStream

BINARY = "binary"
CATEGORICAL = "categorical"
CONTINUOUS = "continuous"
COLUMN_KINDS = (BINARY, CATEGORICAL, CONTINUOUS)


@dataclass(frozen=True)
class SchemaHints:
    """Column kind declarations plus the optional label column."""

    kinds: dict
    label: str | None = None

    def __post_init__(self):
        for name, kind in self.kinds.items():
            if kind not in COLUMN_KINDS:
                raise InvalidConfigError(
                    f"column {name!r}: unknown kind {kind!r}")

    @classmethod
    def parse(cls, spec: str, label: str | None = None) -> "SchemaHints":
        """Parse either a ``col:kind,col:kind`` string or a JSON file path."""
        path = Path(spec)
        if path.suffix == ".json" and path.exists():
            data = json.loads(path.read_text())
            return cls(kinds=dict(data.get("columns", {})),
                       label=label or data.get("label"))
        kinds = {}
        for item in spec.split(","):
            if not item.strip():
                continue
            name, _, kind = item.partition(":")
            kinds[name.strip()] = kind.strip()
        return cls(kinds=kinds, label=label)


@dataclass
class DatasetTable:
    """Encoded records in [0, 1] plus labels and generator metadata."""

    values: np.ndarray
    feature_names: list[str]
    labels: np.ndarray | None = None
    label_name: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_records(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


class TableEncoder(BaseEstimator, TransformerMixin):
    """Learn per-column codecs from raw string cells and emit floats.

    Fitted attributes hold the category levels and min-max ranges, so a
    table encoded at publish time can be decoded (one-hot blocks back to
    category values) and unseen test rows can be transformed consistently;
    an unseen category encodes as an all-zeros block with a warning.
    """

    def __init__(self, hints: SchemaHints | None = None):
        self.hints = hints

    def fit(self, columns: dict, y=None):
        if self.hints is None:
            raise InvalidConfigError("TableEncoder requires schema hints")
        self.codecs_ = {}
        self.feature_names_ = []
        for name, cells in columns.items():
            kind = self.hints.kinds.get(name, CONTINUOUS)
            if kind == BINARY:
                levels = sorted(set(cells))
                if len(levels) > 2:
                    raise InvalidConfigError(
                        f"binary column {name!r} has {len(levels)} levels")
                self.codecs_[name] = (BINARY, levels)
                self.feature_names_.append(name)
            elif kind == CATEGORICAL:
                levels = sorted(set(cells))
                self.codecs_[name] = (CATEGORICAL, levels)
                self.feature_names_.extend(f"{name}={lv}" for lv in levels)
            else:
                vals = np.array([float(c) for c in cells])
                lo, hi = float(vals.min()), float(vals.max())
                self.codecs_[name] = (CONTINUOUS, (lo, hi))
                self.feature_names_.append(name)
        return self

    def transform(self, columns: dict) -> np.ndarray:
        blocks = []
        for name, (kind, spec) in self.codecs_.items():
            cells = columns[name]
            if kind == BINARY:
                levels = spec
                block = np.array([[float(levels.index(c))
                                   if c in levels else 0.0] for c in cells])
                unseen = [c for c in cells if c not in levels]
                if unseen:
                    warnings.warn(
                        f"column {name!r}: unseen binary value "
                        f"{unseen[0]!r} encoded as 0")
            elif kind == CATEGORICAL:
                levels = spec
                block = np.zeros((len(cells), len(levels)))
                for i, c in enumerate(cells):
                    if c in levels:
                        block[i, levels.index(c)] = 1.0
                    else:
                        warnings.warn(
                            f"column {name!r}: unseen category {c!r} "
                            f"encoded as all-zeros")
            else:
                lo, hi = spec
                span = hi - lo if hi > lo else 1.0
                block = np.array([[(float(c) - lo) / span] for c in cells])
                block = np.clip(block, 0.0, 1.0)
            blocks.append(block)
        return np.hstack(blocks)

    def decode_categoricals(self, encoded: np.ndarray) -> dict:
        """Recover category values from one-hot blocks (argmax, ties to
        the first level)."""
        out = {}
        col = 0
        for name, (kind, spec) in self.codecs_.items():
            if kind == CATEGORICAL:
                levels = spec
                block = encoded[:, col:col + len(levels)]
                out[name] = [levels[int(i)] for i in np.argmax(block, axis=1)]
                col += len(levels)
            else:
                col += 1
        return out


def _read_csv_columns(path):
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = list(reader)
    for i, row in enumerate(rows):
        if len(row) != len(header) or any(cell.strip() == "" for cell in row):
            raise InvalidConfigError(
                f"{path}: missing value in data row {i + 1}")
    columns = {name: [row[j] for row in rows] for j, name in enumerate(header)}
    return header, columns


def ingest_csv(path, hints: SchemaHints) -> DatasetTable:
    """Load a headered CSV and encode it to a [0, 1] table.

    Rows with missing values are rejected with their row index.  The
    label column, when named, must be binary and is carried separately.
    """
    header, columns = _read_csv_columns(path)
    label = None
    label_name = hints.label
    if label_name is not None:
        if label_name not in columns:
            raise InvalidConfigError(f"label column {label_name!r} not found")
        cells = columns.pop(label_name)
        levels = sorted(set(cells))
        if len(levels) != 2:
            raise InvalidConfigError(
                f"label column {label_name!r} must be binary, has "
                f"{len(levels)} levels")
        label = np.array([levels.index(c) for c in cells], dtype=int)
    encoder = TableEncoder(hints).fit(columns)
    values = encoder.transform(columns)
    return DatasetTable(values=values, feature_names=encoder.feature_names_,
                        labels=label, label_name=label_name,
                        meta={"encoder": encoder, "source": str(path)})


def synthesize_dataset(n_records: int, n_features: int, sparsity: int,
                       rng: RngStream, labeled: bool = False,
                       label_coeffs: tuple[int, int] | None = None
                       ) -> DatasetTable:
    """Exactly sparse synthetic records rescaled into [0, 1].

    Each record is the cosine synthesis of ``sparsity`` unit spikes with
    random signs planted at distinct non-DC positions; a single affine
    rescale maps the whole table into [0, 1], which adds one shared DC
    coefficient and leaves the planted supports intact.

    With ``labeled`` set, record r gets label ``1`` when its coefficient
    at ``label_coeffs[0]`` is at least the one at ``label_coeffs[1]``, a
    deliberately faint signature: linearly decodable on clean data,
    invisible once measurement noise dominates.
    """
    if not 1 <= sparsity <= n_features - 1:
        raise InvalidConfigError(
            f"sparsity {sparsity} outside [1, {n_features - 1}]")
    gen = rng.generator()
    basis = linalg.dct_basis(n_features)
    coeffs = np.zeros((n_records, n_features))
    supports = []
    for r in range(n_records):
        support = gen.choice(np.arange(1, n_features), size=sparsity,
                             replace=False)
        coeffs[r, support] = gen.choice([-1.0, 1.0], size=sparsity)
        supports.append(np.sort(support))
    raw = coeffs @ basis.T  # records as rows: x_r = basis @ s_r
    lo, hi = float(raw.min()), float(raw.max())
    span = hi - lo if hi > lo else 1.0
    values = (raw - lo) / span

    labels = None
    label_name = None
    if labeled:
        if label_coeffs is None:
            label_coeffs = (n_features // 8 + 1, n_features // 8 + 3)
        k1, k2 = label_coeffs
        labels = (coeffs[:, k1] >= coeffs[:, k2]).astype(int)
        label_name = "label"
    return DatasetTable(
        values=values, feature_names=[f"x_{j}" for j in range(n_features)],
        labels=labels, label_name=label_name,
        meta={"supports": supports, "scale": 1.0 / span, "offset": -lo / span,
              "sparsity": sparsity, "label_coeffs": label_coeffs})


def save_table_csv(table: DatasetTable, path) -> None:
    """Write ``rec_id`` plus feature columns (and the label when present)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        header = ["rec_id"] + list(table.feature_names)
        if table.labels is not None:
            header.append(table.label_name or "label")
        writer.writerow(header)
        for i in range(table.n_records):
            row = [str(i)] + [repr(float(v)) for v in table.values[i]]
            if table.labels is not None:
                row.append(str(int(table.labels[i])))
            writer.writerow(row)


def load_table_csv(path) -> DatasetTable:
    """Inverse of :func:`save_table_csv` for already-numeric tables."""
    header, columns = _read_csv_columns(path)
    if header[0] != "rec_id":
        raise InvalidConfigError(f"{path}: expected a rec_id first column")
    labels = None
    label_name = None
    feature_names = header[1:]
    if feature_names and feature_names[-1] == "label":
        label_name = feature_names.pop()
        labels = np.array([int(v) for v in columns[label_name]], dtype=int)
    values = np.column_stack([
        np.array([float(v) for v in columns[name]]) for name in feature_names
    ]) if feature_names else np.zeros((len(columns["rec_id"]), 0))
    return DatasetTable(values=values, feature_names=feature_names,
                        labels=labels, label_name=label_name)
