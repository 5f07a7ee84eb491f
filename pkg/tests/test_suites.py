import numpy as np
import pytest

from brake_index.core import N
from brake_index.suites import (DEFAULT_DIMS, DEFAULT_TRIALS, SUITES, SuiteConfig,
                                convex_generator, convex_path, run_suite)


def test_config_defaults_and_validation():
    for s in SUITES:
        c = SuiteConfig(s)
        assert c.trials == DEFAULT_TRIALS[s] and c.dims == DEFAULT_DIMS[s]
    with pytest.raises(ValueError):
        SuiteConfig("nosuch")
    with pytest.raises(ValueError):
        SuiteConfig("prop41", trials=0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_convex_generator_is_brake_symmetric_and_positive(n):
    rng = np.random.default_rng(n)
    params = convex_generator(rng, n)
    path = convex_path(params, n_steps=64)
    Nn = N(n)
    for t in np.linspace(0, path.tau, 9):
        B, Bm = path.generator(t), path.generator(path.tau - t)
        assert np.allclose(Nn @ Bm @ Nn, B)
        assert np.linalg.eigvalsh(B)[0] > 0


@pytest.mark.parametrize("suite,trials", [("prop41", 4), ("thm41", 4), ("bott", 3),
                                          ("lemma36", 20), ("lemma37", 10), ("lemma38", 10),
                                          ("splitting", 3), ("claim41", 4)])
def test_small_runs_pass(suite, trials):
    rep, _ = run_suite(SuiteConfig(suite, trials=trials, seed=11))
    assert rep["all_pass"], [r for r in rep["records"] if r["status"] != "pass"]
    assert rep["counts"]["pass"] == trials


def test_parallel_matches_serial():
    cfg = SuiteConfig("lemma38", trials=8, seed=3)
    a, _ = run_suite(cfg, jobs=1)
    b, _ = run_suite(cfg, jobs=2)
    assert a == b
