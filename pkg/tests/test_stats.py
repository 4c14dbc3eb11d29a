import itertools

import numpy as np
import pytest

from flair.evaluation.stats import grouped_paired_bootstrap, holm_adjust, sign_flip_test


def _holm_definition(p):
    p = np.asarray(p, dtype=float)
    m = p.size
    order = np.argsort(p, kind="stable")
    out = np.empty(m)
    running = 0.0
    for rank, i in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p[i]))
        out[i] = running
    return out


def test_holm_examples():
    np.testing.assert_allclose(holm_adjust([0.01, 0.04]), [0.02, 0.04])
    np.testing.assert_allclose(holm_adjust([0.03]), [0.03])
    np.testing.assert_allclose(holm_adjust([1.0, 1.0, 1.0]), [1.0, 1.0, 1.0])


def test_holm_matches_definition():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = rng.uniform(0, 1, int(rng.integers(1, 12))) ** 3
        np.testing.assert_allclose(holm_adjust(p), _holm_definition(p), rtol=0, atol=1e-15)


def test_holm_monotone_after_sorting():
    p = np.random.default_rng(1).uniform(size=20)
    adj = holm_adjust(p)
    assert np.all(np.diff(adj[np.argsort(p)]) >= 0)
    assert np.all(adj >= p)


def test_bootstrap_zero_ratios():
    ci = grouped_paired_bootstrap(np.zeros(12), np.repeat(["a", "b", "c"], 4), B=500)
    assert ci.lo == ci.hi == ci.point == 1.0


def test_bootstrap_two_families_exact():
    eps = 0.05
    x = np.r_[np.full(3, eps), np.full(3, -eps)]
    fam = ["a"] * 3 + ["b"] * 3
    ci = grouped_paired_bootstrap(x, fam, B=20000, seed=1)
    # resample distribution: {aa: e^eps, ab/ba: 1, bb: e^-eps} w.p. 1/4, 1/2, 1/4
    assert ci.lo == pytest.approx(np.exp(-eps)) and ci.hi == pytest.approx(np.exp(eps))
    assert ci.crosses(1.0)


def test_bootstrap_single_family_degenerate():
    ci = grouped_paired_bootstrap([0.1, 0.2], ["a", "a"], B=100)
    assert ci.degenerate


def test_bootstrap_seeded():
    rng = np.random.default_rng(2)
    x, fam = rng.normal(size=30), rng.integers(0, 6, 30)
    assert grouped_paired_bootstrap(x, fam, seed=4, B=2000) == \
        grouped_paired_bootstrap(x, fam, seed=4, B=2000)


def test_bootstrap_keeps_families_together():
    # one family with a huge effect: every replicate's mean is a family-count-weighted mean
    x = np.r_[np.full(10, 1.0), np.zeros(10)]
    fam = ["big"] * 10 + [f"s{i}" for i in range(10)]
    ci = grouped_paired_bootstrap(x, fam, B=5000, seed=0)
    assert ci.n_groups == 11
    assert ci.lo >= 1.0


def test_sign_flip():
    rng = np.random.default_rng(3)
    assert sign_flip_test(np.zeros(10)) == 1.0
    assert sign_flip_test(rng.normal(1.0, 0.1, 30), 2000) < 0.01
    p = [sign_flip_test(rng.normal(size=20), 500, seed=s) for s in range(200)]
    assert 0.02 < np.mean(np.array(p) < 0.05) < 0.1


def test_sign_flip_exact_small():
    d = np.array([1.0, 2.0, 3.0])
    # all 8 sign patterns: only (+,+,+) and (-,-,-) reach |mean| = 2
    exact = 2 / 8
    assert sign_flip_test(d, 40000, seed=0) == pytest.approx(exact, abs=0.01)
