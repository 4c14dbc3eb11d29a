import numpy as np

from flair.reshape import reshape
from flair.synthetic import LSR1GenSpec, generate_corpus, generate_series, make_shape


def test_noiseless_series_is_rank1():
    for kind in ("RandomWalk", "QuadraticDrift", "Flat"):
        spec = LSR1GenSpec(P=24, n_c=30, sigma=0.0, level_kind=kind, seed=1)
        train, _, truth = generate_series(spec, np.random.default_rng(1))
        sv = reshape(train, 24).singular_values
        assert sv[1] <= 1e-10 * sv[0]


def test_peaked_shape_norm():
    s = make_shape("Peaked2to1", 24)
    # 12 phases at 2, 12 at 1: ||S||^2 = (12*4 + 12) / 36^2 = 1/21.6
    assert abs(1 / np.sum(s**2) - 21.6) < 1e-9


def test_solar_night_zeros():
    s = make_shape("SolarNightZeros", 24)
    assert np.sum(s < 1e-6) == 12


def test_corpus_is_deterministic():
    a = generate_corpus(LSR1GenSpec(n_series=3, seed=9))
    b = generate_corpus(LSR1GenSpec(n_series=3, seed=9))
    for x, y in zip(a, b):
        assert np.array_equal(x["train"], y["train"]) and x["family"] == y["family"]


def test_horizon_defaults_to_one_cycle():
    e = generate_corpus(LSR1GenSpec(P=12, n_c=10, freq="M"))[0]
    assert len(e["test"]) == 12 and len(e["train"]) == 120
