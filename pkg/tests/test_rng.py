import numpy as np

from privsense.rng import RngStream, as_generator


def test_same_stream_replays_identically():
    a = RngStream(123, (4, 5)).generator().standard_normal(100)
    b = RngStream(123, (4, 5)).generator().standard_normal(100)
    assert np.array_equal(a, b)


def test_distinct_keys_give_distinct_output():
    a = RngStream(123, (0,)).generator().standard_normal(100)
    b = RngStream(123, (1,)).generator().standard_normal(100)
    assert not np.array_equal(a, b)


def test_child_streams_are_statistically_independent():
    root = RngStream(7)
    draws = np.vstack([root.child(i).generator().standard_normal(4000)
                       for i in range(6)])
    corr = np.corrcoef(draws)
    off_diag = corr[~np.eye(6, dtype=bool)]
    assert np.max(np.abs(off_diag)) < 0.05


def test_child_of_child_extends_key():
    stream = RngStream(9).child(1).child(2, 3)
    assert stream.key == (1, 2, 3)


def test_draw_seed_is_deterministic():
    assert RngStream(5).draw_seed() == RngStream(5).draw_seed()
    assert RngStream(5).draw_seed() != RngStream(6).draw_seed()


def test_as_generator_accepts_both():
    stream = RngStream(1)
    gen = stream.generator()
    assert isinstance(as_generator(stream), np.random.Generator)
    assert as_generator(gen) is gen
