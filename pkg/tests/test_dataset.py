import numpy as np
import pytest

from privsense import dataset, sensing
from privsense.errors import InvalidConfigError
from privsense.rng import RngStream


def write_csv(path, text):
    path.write_text(text)
    return str(path)


def test_ingest_binary_csv(tmp_path):
    path = write_csv(tmp_path / "t.csv",
                     "a,b\n0,1\n1,1\n0,0\n")
    hints = dataset.SchemaHints(kinds={"a": "binary", "b": "binary"})
    table = dataset.ingest_csv(path, hints)
    assert table.values.shape == (3, 2)
    assert set(np.unique(table.values)) <= {0.0, 1.0}


def test_ingest_categorical_one_hot(tmp_path):
    path = write_csv(tmp_path / "t.csv",
                     "color\nred\nblue\ngreen\nred\n")
    hints = dataset.SchemaHints(kinds={"color": "categorical"})
    table = dataset.ingest_csv(path, hints)
    assert table.values.shape == (4, 3)
    assert np.allclose(table.values.sum(axis=1), 1.0)
    assert table.feature_names == ["color=blue", "color=green", "color=red"]


def test_ingest_continuous_minmax(tmp_path):
    path = write_csv(tmp_path / "t.csv", "v\n10\n30\n20\n")
    hints = dataset.SchemaHints(kinds={"v": "continuous"})
    table = dataset.ingest_csv(path, hints)
    assert np.allclose(sorted(table.values[:, 0]), [0.0, 0.5, 1.0])


def test_ingest_rejects_missing_value(tmp_path):
    path = write_csv(tmp_path / "t.csv", "a,b\n1,2\n3,\n")
    hints = dataset.SchemaHints(kinds={"a": "continuous", "b": "continuous"})
    with pytest.raises(InvalidConfigError, match="row 2"):
        dataset.ingest_csv(path, hints)


def test_ingest_label_column(tmp_path):
    path = write_csv(tmp_path / "t.csv",
                     "a,salary\n0.1,low\n0.9,high\n0.3,low\n")
    hints = dataset.SchemaHints(kinds={"a": "continuous"}, label="salary")
    table = dataset.ingest_csv(path, hints)
    assert table.label_name == "salary"
    assert np.array_equal(table.labels, [1, 0, 1])
    assert table.values.shape == (3, 1)


def test_unseen_category_encodes_all_zeros():
    hints = dataset.SchemaHints(kinds={"c": "categorical"})
    enc = dataset.TableEncoder(hints).fit({"c": ["x", "y"]})
    with pytest.warns(UserWarning, match="unseen"):
        out = enc.transform({"c": ["x", "z"]})
    assert np.array_equal(out, [[1.0, 0.0], [0.0, 0.0]])


def test_one_hot_decode_roundtrip():
    hints = dataset.SchemaHints(kinds={"c": "categorical", "v": "continuous"})
    cols = {"c": ["a", "b", "c", "b"], "v": ["1", "2", "3", "4"]}
    enc = dataset.TableEncoder(hints).fit(cols)
    encoded = enc.transform(cols)
    decoded = enc.decode_categoricals(encoded)
    assert decoded["c"] == cols["c"]


def test_synthesize_exact_sparsity():
    table = dataset.synthesize_dataset(40, 32, 4, RngStream(1))
    basis = np.linalg.inv(np.eye(32))  # placeholder to keep shape explicit
    from privsense.linalg import dct_basis
    psi = dct_basis(32)
    for i in range(40):
        coeffs = psi.T @ table.values[i]
        # affine rescale adds one shared DC coefficient on top of the
        # planted spikes
        assert np.sum(np.abs(coeffs) > 1e-9) <= 5
        support = np.flatnonzero(np.abs(coeffs[1:]) > 1e-9) + 1
        assert np.array_equal(support, table.meta["supports"][i])


def test_synthesize_range_and_determinism():
    a = dataset.synthesize_dataset(20, 16, 3, RngStream(2))
    b = dataset.synthesize_dataset(20, 16, 3, RngStream(2))
    assert np.array_equal(a.values, b.values)
    assert a.values.min() >= 0.0 and a.values.max() <= 1.0


def test_synthesize_labeled_is_imbalanced_but_nondegenerate():
    table = dataset.synthesize_dataset(400, 64, 5, RngStream(3), labeled=True)
    ones = int(table.labels.sum())
    assert 0 < ones < 400
    assert ones > 300  # ties resolve to label 1, so class 1 dominates


def test_table_csv_roundtrip(tmp_path):
    table = dataset.synthesize_dataset(10, 8, 2, RngStream(4), labeled=True)
    path = tmp_path / "synth.csv"
    dataset.save_table_csv(table, path)
    loaded = dataset.load_table_csv(path)
    assert np.array_equal(loaded.values, table.values)
    assert np.array_equal(loaded.labels, table.labels)


def test_schema_hints_parse_inline_and_json(tmp_path):
    hints = dataset.SchemaHints.parse("a:binary, b:categorical,c:continuous")
    assert hints.kinds == {"a": "binary", "b": "categorical",
                           "c": "continuous"}
    spec = tmp_path / "hints.json"
    spec.write_text('{"columns": {"a": "binary"}, "label": "y"}')
    hints = dataset.SchemaHints.parse(str(spec))
    assert hints.kinds == {"a": "binary"}
    assert hints.label == "y"
    with pytest.raises(InvalidConfigError):
        dataset.SchemaHints(kinds={"a": "nope"})
