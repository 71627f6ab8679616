"""Convergence metrics, figure dataset, experiment runner."""

import json

import numpy as np
import pytest
from scipy import stats as spstats

import frozenwalk as fw
from frozenwalk import analysis as an
from frozenwalk.errors import ConfigError, ResourceCapError


# ---------------------------------------------------------------------------
# llt_error
# ---------------------------------------------------------------------------

def test_llt_error_smoke_n1():
    env = fw.generate(fw.Constant("1/2"), length=2)
    params = fw.limit_params(fw.Constant("1/2"))
    value, site = an.llt_error(env, params, 1)
    assert np.isfinite(value) and value >= 0
    assert site in (0, 1)


def test_llt_error_constant_decreasing():
    env = fw.generate(fw.Constant("1/2"), length=2**14 + 1)
    params = fw.limit_params(fw.Constant("1/2"))
    e_small, _ = an.llt_error(env, params, 2**10)
    e_large, _ = an.llt_error(env, params, 2**14)
    assert e_large < e_small


# ---------------------------------------------------------------------------
# hitting_llt_error
# ---------------------------------------------------------------------------

def test_hitting_llt_error_smoke_k1():
    env = fw.generate(fw.Constant("1/2"), length=2)
    assert np.isfinite(an.hitting_llt_error(env, 1))


def test_hitting_llt_error_negative_binomial_oracle():
    # Constant(1/2): T_k - k is NegativeBinomial(k, 1/2); rebuild the metric
    # from scipy's closed form and compare.
    k = 2**10
    env = fw.generate(fw.Constant("1/2"), length=k + 1)
    stats = fw.prefix_stats(env)
    n_max = int(np.ceil(stats.mu[k] + 12.0 * np.sqrt(stats.sigma2[k])))
    ns = np.arange(k, n_max + 1)
    exact = spstats.nbinom.pmf(ns - k, k, 0.5)
    gauss = np.exp(-0.5 * np.log(2 * np.pi * stats.sigma2[k])
                   - (ns - stats.mu[k]) ** 2 / (2 * stats.sigma2[k]))
    tail = spstats.nbinom.sf(n_max - k, k, 0.5)
    oracle = k * max(np.max(np.abs(exact - gauss)), max(tail, gauss[-1]))
    assert an.hitting_llt_error(env, k) == pytest.approx(oracle, rel=1e-9)


def test_hitting_llt_error_nonnegative_and_finite(markov_env):
    for k in (4, 64):
        v = an.hitting_llt_error(markov_env, k)
        assert np.isfinite(v) and v >= 0


# ---------------------------------------------------------------------------
# clt_error
# ---------------------------------------------------------------------------

def test_clt_error_constant_decreasing():
    env = fw.generate(fw.Constant("1/2"), length=2**13 + 1)
    params = fw.limit_params(fw.Constant("1/2"))
    ks = [an.clt_error(env, params, n) for n in (2**9, 2**11, 2**13)]
    assert ks[0] > ks[1] > ks[2]
    assert all(0.0 <= v <= 1.0 for v in ks)


def test_clt_error_ks_in_unit_interval(markov_env, markov_params):
    v = an.clt_error(markov_env, markov_params, 256)
    assert 0.0 <= v <= 1.0


# ---------------------------------------------------------------------------
# lln_check
# ---------------------------------------------------------------------------

def test_lln_check_n1_bounded():
    env = fw.generate(fw.Constant("1/2"), length=2)
    params = fw.limit_params(fw.Constant("1/2"))
    v = an.lln_check(env, params, 1, seeds=50)
    assert v <= max(1 / params.mu, 1 - 1 / params.mu) + 1e-12


def test_lln_check_concentrates():
    env = fw.generate(fw.Constant("1/2"), length=2**12 + 1)
    params = fw.limit_params(fw.Constant("1/2"))
    assert an.lln_check(env, params, 2**12, seeds=100) < 0.05


# ---------------------------------------------------------------------------
# figure2
# ---------------------------------------------------------------------------

def test_figure2_constant_env_columns_coincide():
    ds = an.figure2(fw.Constant("1/2"), 512)
    assert np.array_equal(ds.gaussian, ds.modulated)
    assert ds.exact_mass.shape == ds.sites.shape


def test_figure2_window_restriction(markov_env, markov_params):
    ds = an.figure2(fw.FIGURE_MARKOV, 512, env=markov_env, params=markov_params)
    assert ds.sites.size < 513  # far tails dropped
    assert np.all(ds.gaussian > 1e-12 * ds.gaussian.max())


def test_figure2_csv_header():
    ds = an.figure2(fw.Constant("1/2"), 128)
    lines = ds.to_csv().strip().split("\n")
    assert lines[0] == "site,exact_mass,gaussian,modulated_prediction"
    assert len(lines) == ds.sites.size + 1
    # every field must round-trip as a plain decimal (no numpy scalar reprs)
    for line in lines[1:]:
        for field in line.split(","):
            float(field)


# ---------------------------------------------------------------------------
# run_experiment
# ---------------------------------------------------------------------------

MARKOV_CFG = {
    "variant": "two_state_markov", "values": ["1/4", "3/4"], "stay": "4/5",
    "length": 257, "seed": 43,
}


def test_run_experiment_deterministic_outputs(tmp_path):
    config = {"experiment": "llt", "env": dict(MARKOV_CFG), "n_grid": [64, 256]}
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    ra = an.run_experiment(config, out_dir=str(out_a))
    rb = an.run_experiment(config, out_dir=str(out_b))
    assert ra.metrics == rb.metrics
    for name in ("llt_metrics.csv", "llt_report.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_run_experiment_figure2_emits_csv(tmp_path):
    config = {"experiment": "figure2", "env": dict(MARKOV_CFG), "n_grid": [256]}
    report = an.run_experiment(config, out_dir=str(tmp_path))
    path = tmp_path / "figure2_n256.csv"
    assert path.exists()
    assert path.read_text().startswith("site,exact_mass,gaussian,modulated_prediction")
    assert report.emitted == (path.name,)


def test_run_experiment_cross_engine_agreement():
    # Everything small enough for the exact engine must agree with the float
    # engine to 1e-9.
    for experiment in ("llt", "clt"):
        base = {"experiment": experiment, "env": dict(MARKOV_CFG), "n_grid": [128, 256]}
        flt = an.run_experiment({**base, "engine": "float"})
        exact = an.run_experiment({**base, "engine": "exact"})
        assert np.max(np.abs(np.array(flt.metrics) - np.array(exact.metrics))) < 1e-9


def test_run_experiment_metric_sanity(tmp_path):
    for experiment in ("llt", "clt", "lln", "hitting"):
        config = {"experiment": experiment, "env": dict(MARKOV_CFG),
                  "n_grid": [64, 128], "seeds": 20}
        report = an.run_experiment(config)
        assert all(np.isfinite(m) and m >= 0 for m in report.metrics)
        if experiment == "clt":
            assert all(m <= 1.0 for m in report.metrics)


def test_validate_config_reports_json_path():
    with pytest.raises(ConfigError, match=r"\$\.experiment"):
        an.validate_config({"experiment": "nope", "env": dict(MARKOV_CFG), "n_grid": [8]})
    with pytest.raises(ConfigError, match=r"\$"):
        an.validate_config({"env": dict(MARKOV_CFG), "n_grid": [8]})


def test_run_experiment_config_errors():
    with pytest.raises(ConfigError, match="strictly increasing"):
        an.run_experiment({"experiment": "llt", "env": dict(MARKOV_CFG), "n_grid": [64, 64]})
    short = {**MARKOV_CFG, "length": 10}
    with pytest.raises(ConfigError, match="length"):
        an.run_experiment({"experiment": "llt", "env": short, "n_grid": [64]})
    table = {"variant": "table", "path": "none.txt", "length": 10}
    with pytest.raises(ConfigError, match="params"):
        an.run_experiment({"experiment": "llt", "env": table, "n_grid": [8]})


def test_run_experiment_resource_caps():
    big_n = {"experiment": "llt", "env": {**MARKOV_CFG, "length": 2**17 + 2},
             "n_grid": [2**17]}
    with pytest.raises(ResourceCapError):
        an.run_experiment(big_n)
    many = {"experiment": "lln", "env": dict(MARKOV_CFG), "n_grid": [64],
            "seeds": 10_000_000}
    with pytest.raises(ResourceCapError):
        an.run_experiment(many)


def test_report_json_shape():
    config = {"experiment": "lln", "env": dict(MARKOV_CFG), "n_grid": [64], "seeds": 10}
    report = an.run_experiment(config)
    payload = json.loads(report.to_json())
    assert payload["experiment"] == "lln"
    assert payload["n_grid"] == [64]
    assert "wall_clock_seconds" in payload
    assert "wall_clock_seconds" not in json.loads(report.to_json(include_timing=False))


def test_explicit_params_override():
    config = {"experiment": "clt", "env": dict(MARKOV_CFG), "n_grid": [128],
              "params": {"mu": 8 / 3, "sigma2": 56 / 9}}
    report = an.run_experiment(config)
    assert np.isfinite(report.metrics[0])
