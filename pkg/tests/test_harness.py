import numpy as np
import pytest

from flair.cascade import CascadeConfig
from flair.evaluation.harness import evaluate, misspec_periods, sweep
from flair.evaluation import metrics as mt
from flair.synthetic import LSR1GenSpec, generate_corpus


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus(LSR1GenSpec(P=24, n_c=60, n_series=20, seed=4))


def test_report_geomean(corpus):
    rep = evaluate(corpus)
    ratios = [r["mase_ratio"] for r in rep.per_config.values()]
    assert rep.rel_mase == pytest.approx(np.exp(np.mean(np.log(ratios))), rel=1e-12)
    assert rep.n_configs == 20 and not rep.excluded
    for r in rep.per_config.values():
        assert r["mase"] >= 0 and r["crps"] >= 0 and r["wql"] >= 0


def test_relmase_below_one_across_seeds():
    wins = 0
    for seed in range(10):
        c = generate_corpus(LSR1GenSpec(P=24, n_c=100, n_series=10, seed=100 + seed))
        wins += evaluate(c).rel_mase < 1.0
    assert wins >= 10 * 0.95


def test_degenerate_configs_are_excluded(corpus):
    flat = {"series_id": "flat", "family": "x", "freq": "H",
            "train": np.full(100, 3.0), "test": np.full(5, 3.0)}
    rep = evaluate([*corpus[:3], flat])
    assert "flat" in rep.excluded and rep.n_configs == 3


def test_parallel_matches_serial(corpus):
    a = evaluate(corpus[:6], jobs=1).to_dict()
    b = evaluate(corpus[:6], jobs=2).to_dict()
    assert a == b


@pytest.mark.xfail(strict=True, reason="stationary LSR1 Shape: pooling more cycles is strictly "
                   "more efficient, so K=5 beats K=2 significantly")
def test_k_sweep_k2_vs_k5_ci_crosses_zero():
    c = generate_corpus(LSR1GenSpec(P=24, n_c=100, n_series=50, seed=21))
    rows = {r["arm"]: r for r in sweep("k", c, arms=(2, 5), B=2000)["rows"]}
    assert rows["K=5"]["ci_lo_pct"] <= 0.0 <= rows["K=5"]["ci_hi_pct"]


def test_sweep_records_failures(corpus):
    bad = {"series_id": "bad", "family": "x", "freq": "H",
           "train": np.full(100, 3.0), "test": np.full(5, 3.0)}
    res = sweep("k", [*corpus[:4], bad], arms=(1, 2), B=200)
    assert all(r["n_failed"] == 1 for r in res["rows"])


def test_period_misspec_direction(corpus):
    res = sweep("period-misspec", corpus[:10], offsets=(-1, 0))
    rows = {r["offset"]: r for r in res["rows"]}
    assert rows[0]["median_mase_ratio"] == pytest.approx(1.0)
    assert rows[-1]["median_mase_ratio"] >= 2.0


def test_misspec_periods_default():
    assert misspec_periods(24) == [12, 22, 23, 24, 25, 26, 48]


def test_shape_variant_null_on_pure_noise():
    # no periodic structure: BIC picks P=1 and the Shape never enters the forecast
    ok = 0
    for seed in range(5):
        c = generate_corpus(LSR1GenSpec(P=24, n_c=100, n_series=30, level_kind="Flat",
                                        shape_kind="Uniform", seed=seed))
        rows = sweep("shape-variant", c, B=1000, seed=seed)["rows"]
        ok += all(r.get("p_holm", 1.0) >= 0.05 or r["delta_pct"] >= 0 for r in rows)
    assert ok >= 5 * 0.95


def test_coverage_sweep(corpus):
    res = sweep("coverage", corpus[:8], B=100)
    row = res["rows"][0]
    for lvl in mt.COVERAGE_LEVELS:
        assert 0.0 <= row[f"coverage_{lvl}"] <= 1.0


def test_non_canonical_config_runs(corpus):
    rep = evaluate(corpus[:3], CascadeConfig(shape_k=5))
    assert rep.n_configs == 3
