"""Experiment harness: convergence metrics, figure datasets, report emission.

All asymptotic statements under test carry no explicit constants, so the
metrics here feed trend-based checks (monotone decrease across a geometric
n grid) plus loosely documented caps, never paper-derived absolute tolerances.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import jsonschema

from . import environment as envmod
from . import limits as limmod
from . import walk as walkmod
from .environment import Environment, LimitParams
from .errors import ConfigError, NumericQualityError, ResourceCapError

# Mass-conservation threshold for the float pmf engine: exceeding it is a
# numeric-quality failure (CLI exit code 4).
MASS_DEVIATION_CAP = 1e-9

# Harness resource caps (refusal, CLI exit code 3).
MAX_N = 1 << 16
MAX_SEEDS = 1_000_000


def _checked_pmf(env: Environment, n: int, engine: str = "float") -> walkmod.Pmf:
    pmf = walkmod.walk_pmf(env, n, engine=engine)
    if pmf.mass_deviation() > MASS_DEVIATION_CAP:
        raise NumericQualityError(
            f"pmf mass deviation {pmf.mass_deviation():.3e} exceeds {MASS_DEVIATION_CAP}")
    return pmf


def llt_error(env: Environment, params: LimitParams, n: int,
              engine: str = "float") -> tuple[float, int]:
    """sqrt(n) * sup_k |pmf(k) - prediction(k)| over the full support, with argmax site."""
    pmf = _checked_pmf(env, n, engine=engine)
    pred = limmod.llt_prediction(env, params, n)
    diff = np.abs(pmf.dense(n + 1) - pred.q)
    arg = int(np.argmax(diff))
    return float(np.sqrt(n) * diff[arg]), arg


def hitting_llt_error(env: Environment, k: int,
                      n_max: Optional[int] = None) -> float:
    """k * sup_n |P(T_k = n) - f_k(n)|, truncation tail folded in as a bound term.

    Beyond the truncation horizon every per-point walk probability is at most
    the tail mass and the Gaussian is below its value at the horizon, so both
    enter the sup as explicit bound contributions.
    """
    dist = walkmod.hitting_dist(env, k, n_max=n_max)
    stats = envmod.prefix_stats(env)
    ns = np.arange(k, dist.n_max + 1)
    f_vals = limmod.f_density_array(stats, k, ns)
    sup = float(np.max(np.abs(np.asarray(dist.probs) - f_vals)))
    beyond = max(float(dist.tail), float(limmod.f_density(stats, k, dist.n_max)))
    return k * max(sup, beyond)


def clt_error(env: Environment, params: LimitParams, n: int,
              engine: str = "float") -> float:
    """Kolmogorov-Smirnov distance between the standardized walk CDF and the normal CDF.

    The walk CDF is a step function, so the sup is evaluated at every jump
    point from both sides.
    """
    pmf = _checked_pmf(env, n, engine=engine)
    k_n = limmod.centering(env, n)
    scale = np.sqrt(params.sigma_tilde2 * n)
    masses = np.asarray([float(m) for m in pmf.masses]) if pmf.exact else pmf.masses
    sites = pmf.origin + np.arange(len(masses))
    x = (sites - k_n) / scale
    cdf_right = np.cumsum(masses)
    cdf_left = cdf_right - masses
    phi = limmod.clt_normal_cdf(x)
    return float(np.max(np.maximum(np.abs(cdf_right - phi), np.abs(cdf_left - phi))))


def lln_check(env: Environment, params: LimitParams, n: int,
              seeds: int, seed: int = 0) -> float:
    """Monte Carlo max_s |X_n^{(s)}/n - 1/mu| over ``seeds`` independent samples."""
    pos = walkmod.sample_positions(env, n, seed=seed, count=seeds)
    return float(np.max(np.abs(pos / n - 1.0 / params.mu)))


@dataclass(frozen=True)
class FigureDataset:
    """Per-site columns for the modulated-Gaussian overlay figure."""

    n: int
    sites: np.ndarray
    exact_mass: np.ndarray
    gaussian: np.ndarray
    modulated: np.ndarray

    def to_csv(self) -> str:
        lines = ["site,exact_mass,gaussian,modulated_prediction"]
        for i, k in enumerate(self.sites):
            lines.append(f"{int(k)},{float(self.exact_mass[i])!r},"
                         f"{float(self.gaussian[i])!r},{float(self.modulated[i])!r}")
        return "\n".join(lines) + "\n"


def figure2(spec: envmod.EnvSpec, n: int, seed: int = 0,
            params: Optional[LimitParams] = None,
            env: Optional[Environment] = None) -> FigureDataset:
    """Exact pmf vs plain and modulated Gaussian, restricted to the central window.

    Rows are kept where the Gaussian exceeds 1e-12 of its peak (about +-7
    standard deviations), which keeps emitted files small.
    """
    if env is None:
        env = envmod.generate(spec, length=n + 1, seed=seed)
    if params is None:
        params = envmod.limit_params(spec)
    pmf = _checked_pmf(env, n)
    pred = limmod.llt_prediction(env, params, n)
    keep = pred.gaussian > 1e-12 * float(np.max(pred.gaussian))
    sites = np.nonzero(keep)[0]
    return FigureDataset(n=n, sites=sites,
                         exact_mass=pmf.dense(n + 1)[sites],
                         gaussian=pred.gaussian[sites],
                         modulated=pred.q[sites])


# ---------------------------------------------------------------------------
# Experiment runner
# ---------------------------------------------------------------------------

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["experiment", "env", "n_grid"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": ["llt", "clt", "lln", "hitting", "figure2"]},
        "env": {
            "type": "object",
            "required": ["variant", "length"],
            "properties": {
                "variant": {"enum": ["constant", "two_state_markov", "sinusoid",
                                     "iid_discrete", "table"]},
                "length": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
        },
        "params": {
            "type": "object",
            "required": ["mu", "sigma2"],
            "properties": {
                "mu": {"type": "number"},
                "sigma2": {"type": "number"},
                "lambda": {"type": "number"},
            },
        },
        "n_grid": {"type": "array", "items": {"type": "integer", "minimum": 1},
                   "minItems": 1},
        "seeds": {"type": "integer", "minimum": 1},
        "engine": {"enum": ["float", "exact"]},
        "emit": {
            "type": "object",
            "properties": {"csv": {"type": "boolean"}, "json": {"type": "boolean"}},
            "additionalProperties": False,
        },
    },
}


@dataclass(frozen=True)
class ExperimentReport:
    """Metric trajectories of one experiment run plus emission metadata."""

    experiment: str
    env_spec: dict
    env_seed: int
    n_grid: tuple
    metrics: tuple
    wall_clock: tuple
    # File names relative to the output directory, so identical configs give
    # byte-identical reports regardless of where they are written.
    emitted: tuple = ()

    def to_json(self, include_timing: bool = True) -> str:
        payload = {
            "experiment": self.experiment,
            "env": {"spec": self.env_spec, "seed": self.env_seed},
            "n_grid": list(self.n_grid),
            "metrics": list(self.metrics),
            "emitted": list(self.emitted),
        }
        if include_timing:
            payload["wall_clock_seconds"] = list(self.wall_clock)
        return json.dumps(payload, indent=2, sort_keys=True)


def validate_config(config: dict) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: e.json_path)
    if errors:
        e = errors[0]
        raise ConfigError(f"{e.json_path}: {e.message}")


def run_experiment(config: dict, out_dir: Optional[str] = None) -> ExperimentReport:
    """Execute one named experiment over its n grid; deterministic given config."""
    validate_config(config)
    env_cfg = dict(config["env"])
    length = int(env_cfg.pop("length"))
    env_seed = int(env_cfg.pop("seed", 0))
    spec = envmod.spec_from_dict(env_cfg)
    n_grid = tuple(int(n) for n in config["n_grid"])
    if any(np.diff(n_grid) <= 0):
        raise ConfigError("$.n_grid: must be strictly increasing")
    if max(n_grid) > MAX_N:
        raise ResourceCapError(f"n = {max(n_grid)} exceeds harness cap {MAX_N}")
    seeds = int(config.get("seeds", 100))
    if seeds > MAX_SEEDS:
        raise ResourceCapError(f"seeds = {seeds} exceeds harness cap {MAX_SEEDS}")
    engine = config.get("engine", "float")
    experiment = config["experiment"]

    if "params" in config:
        p = config["params"]
        params = LimitParams(mu=float(p["mu"]), sigma2=float(p["sigma2"]),
                             lam=float(p.get("lambda", 0.0)))
    else:
        try:
            params = envmod.limit_params(spec)
        except Exception as exc:
            raise ConfigError(f"$.params: required for this env variant ({exc})") from exc

    needed = max(n_grid) + 1
    if length < needed:
        raise ConfigError(f"$.env.length: must be >= {needed} for the n grid")
    env = envmod.generate(spec, length=length, seed=env_seed)

    metrics = []
    clocks = []
    emitted = []
    out = Path(out_dir) if out_dir else None
    emit = config.get("emit", {"csv": True, "json": True})
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    for n in n_grid:
        t0 = time.perf_counter()
        if experiment == "llt":
            value, _ = llt_error(env, params, n, engine=engine)
        elif experiment == "clt":
            value = clt_error(env, params, n, engine=engine)
        elif experiment == "lln":
            value = lln_check(env, params, n, seeds=seeds, seed=env_seed)
        elif experiment == "hitting":
            value = hitting_llt_error(env, n)
        else:  # figure2
            dataset = figure2(spec, n, seed=env_seed, params=params, env=env)
            value = float(np.max(np.abs(dataset.exact_mass - dataset.modulated)))
            if out is not None and emit.get("csv", True):
                path = out / f"figure2_n{n}.csv"
                path.write_text(dataset.to_csv())
                emitted.append(path.name)
        clocks.append(time.perf_counter() - t0)
        metrics.append(float(value))
        if not np.isfinite(value):
            raise NumericQualityError(f"metric for n={n} is not finite")

    if experiment != "figure2" and out is not None and emit.get("csv", True):
        path = out / f"{experiment}_metrics.csv"
        rows = ["n,metric"] + [f"{n},{m!r}" for n, m in zip(n_grid, metrics)]
        path.write_text("\n".join(rows) + "\n")
        emitted.append(path.name)

    report = ExperimentReport(
        experiment=experiment, env_spec=envmod.spec_to_dict(spec), env_seed=env_seed,
        n_grid=n_grid, metrics=tuple(metrics), wall_clock=tuple(clocks),
        emitted=tuple(emitted))

    if out is not None and emit.get("json", True):
        # Timing is dropped from emitted files so identical configs produce
        # byte-identical outputs.
        path = out / f"{experiment}_report.json"
        path.write_text(report.to_json(include_timing=False))
    return report
