import numpy as np
import pytest
from sklearn.base import clone

from privsense import dataset
from privsense.errors import AuthorizationError, InvalidConfigError
from privsense.estimators import CompressivePublisher, TieredReconstructor
from privsense.rng import RngStream


def make_table(n=64, records=25, seed=0):
    return dataset.synthesize_dataset(records, n, 3, RngStream(seed).child(5))


def test_get_set_params_and_clone():
    pub = CompressivePublisher(epsilon=0.7, measurement_rate=0.5, seed=9)
    params = pub.get_params()
    assert params["epsilon"] == 0.7
    assert params["seed"] == 9
    twin = clone(pub)
    assert twin.get_params() == params
    pub.set_params(epsilon=1.3)
    assert pub.epsilon == 1.3


def test_fit_transform_shapes_and_determinism():
    table = make_table()
    pub = CompressivePublisher(epsilon=1.0, seed=3)
    out_a = pub.fit(table.values).transform(table.values)
    out_b = clone(pub).fit(table.values).transform(table.values)
    assert out_a.shape == (25, 32)
    assert np.array_equal(out_a, out_b)
    assert pub.provenance_["epsilon"] == 1.0


def test_publisher_requires_fit_before_transform():
    pub = CompressivePublisher()
    with pytest.raises(InvalidConfigError):
        pub.transform(np.zeros((3, 64)))


def test_roundtrip_through_reconstructor_near_noiseless():
    table = make_table()
    pub = CompressivePublisher(epsilon=1e9, seed=4).fit(table.values)
    published = pub.transform(table.values)
    rec = TieredReconstructor(level="l2", keys=pub).fit()
    recovered = rec.transform(published)
    assert recovered.shape == table.values.shape
    err = np.mean(np.linalg.norm(recovered - table.values, axis=1))
    assert err < 1e-3
    assert rec.last_result_.bits == pub.message_bits_


def test_level0_needs_no_keys():
    table = make_table()
    pub = CompressivePublisher(epsilon=1.0, seed=5).fit(table.values)
    published = pub.transform(table.values)
    rec = TieredReconstructor(level="l0")
    assert np.array_equal(rec.fit().transform(published), published)


def test_l2_without_coding_key_is_rejected():
    table = make_table()
    pub = CompressivePublisher(epsilon=1.0, embed=False, seed=6)
    pub.fit(table.values)
    with pytest.raises(AuthorizationError):
        TieredReconstructor(level="l2", keys=pub).fit()
    with pytest.raises(AuthorizationError):
        TieredReconstructor(level="l1").fit()


def test_reconstructor_from_key_directory(tmp_path):
    from privsense import keys as keymod
    table = make_table()
    keyset = keymod.keygen(64, 0.5, 0.2, 0.5, RngStream(7), tmp_path)
    ens = keyset.measurement.materialize()
    coding = keyset.coding.materialize()
    from privsense import pipeline
    published = pipeline.publish_table(table.values, ens, coding, 1e9,
                                       "calibrated", RngStream(8))
    rec = TieredReconstructor(level="l2", keys=str(tmp_path),
                              provenance=published.provenance)
    recovered = rec.fit().transform(published.measurements)
    err = np.mean(np.linalg.norm(recovered - table.values, axis=1))
    assert err < 1e-3


def test_sklearn_pipeline_composition():
    from sklearn.pipeline import Pipeline
    table = make_table()
    pipe = Pipeline([
        ("publish", CompressivePublisher(epsilon=1e9, seed=10)),
    ])
    out = pipe.fit_transform(table.values)
    assert out.shape == (25, 32)
