"""Command-line interface for the simulation and verification harness.

Exit codes: 0 success, 2 configuration error, 3 resource-cap refusal,
4 numeric-quality failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, chaosmap, environment as envmod, limits as limmod, walk as walkmod
from .errors import (
    ConfigError,
    FrozenwalkError,
    NumericQualityError,
    ResourceCapError,
)

EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_NUMERIC = 4


def _load_env_cfg(args) -> dict:
    if args.config:
        cfg = json.loads(Path(args.config).read_text())
        return cfg["env"] if "env" in cfg else cfg
    if args.env:
        return json.loads(args.env)
    raise ConfigError("provide --env '<json>' or --config <file>")


def _make_env(args, length: int) -> envmod.Environment:
    cfg = dict(_load_env_cfg(args))
    cfg.pop("length", None)
    seed = int(cfg.pop("seed", args.seed))
    spec = envmod.spec_from_dict(cfg)
    return envmod.generate(spec, length=length, seed=seed)


def _out_path(args, name: str) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def cmd_env_gen(args) -> int:
    env = _make_env(args, args.length)
    path = _out_path(args, "env.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# one omega per line, index = line number - 1\n")
        if env.omega_exact is not None:
            for w in env.omega_exact:
                fh.write(f"{w.numerator}/{w.denominator}\n")
        else:
            for w in env.omega:
                fh.write(f"{float(w)!r}\n")
    meta = {"spec": envmod.spec_to_dict(env.spec), "seed": env.seed,
            "length": env.length}
    _out_path(args, "env.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    print(f"wrote {path}")
    return 0


def cmd_env_diag(args) -> int:
    k_grid = [int(x) for x in args.k_grid.split(",")]
    u_values = [float(x) for x in args.u.split(",")]
    length = args.length
    env = _make_env(args, length)
    params = envmod.limit_params(env.spec)
    report = envmod.diagnostics(env, params, k_grid, u_values)
    path = _out_path(args, "diagnostics.json")
    path.write_text(report.to_json())
    print(f"wrote {path}")
    return 0


def cmd_walk_pmf(args) -> int:
    env = _make_env(args, args.n + 1)
    pmf = walkmod.walk_pmf(env, args.n, engine=args.engine)
    if pmf.mass_deviation() > analysis.MASS_DEVIATION_CAP:
        raise NumericQualityError(
            f"mass deviation {pmf.mass_deviation():.3e} exceeds "
            f"{analysis.MASS_DEVIATION_CAP}")
    path = _out_path(args, f"pmf_n{args.n}.csv")
    path.write_text(pmf.to_csv())
    print(f"wrote {path} (mass deviation {pmf.mass_deviation():.3e})")
    return 0


def cmd_walk_sample(args) -> int:
    env = _make_env(args, args.n + 1)
    pos = walkmod.sample_positions(env, args.n, seed=args.seed, count=args.count)
    path = _out_path(args, f"samples_n{args.n}.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sample,final_position\n")
        for i, x in enumerate(pos):
            fh.write(f"{i},{int(x)}\n")
    print(f"wrote {path}")
    return 0


def cmd_map_push(args) -> int:
    env = _make_env(args, args.n + 1)
    measure = chaosmap.pushforward(env, args.n, cap=args.cap)
    law = chaosmap.cell_law(measure)
    payload = {
        "n": args.n,
        "pieces": measure.to_json_obj(),
        "cell_masses": {str(k): f"{m.numerator}/{m.denominator}"
                        for k, m in law.masses.items()},
        "uniform_cells": {str(k): bool(u) for k, u in law.uniform.items()},
    }
    path = _out_path(args, f"pushforward_n{args.n}.json")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    print(f"wrote {path}")
    return 0


def cmd_map_sample(args) -> int:
    env = _make_env(args, args.n + 1)
    path = _out_path(args, f"map_cells_n{args.n}.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sample,cell\n")
        for i in range(args.count):
            cell = chaosmap.sample_trajectory(env, args.n, seed=args.seed + i,
                                              precision_bits=args.bits)
            fh.write(f"{i},{cell}\n")
    print(f"wrote {path}")
    return 0


def cmd_limits_center(args) -> int:
    env = _make_env(args, args.length)
    print(limmod.centering(env, args.n))
    return 0


def cmd_analyze(args) -> int:
    if args.config:
        config = json.loads(Path(args.config).read_text())
    else:
        env_cfg = dict(_load_env_cfg(args))
        n_grid = [int(x) for x in args.n_grid.split(",")]
        env_cfg.setdefault("length", max(n_grid) + 1)
        env_cfg.setdefault("seed", args.seed)
        config = {"experiment": args.metric, "env": env_cfg, "n_grid": n_grid,
                  "seeds": args.seeds, "engine": args.engine}
    config.setdefault("experiment", args.metric)
    report = analysis.run_experiment(config, out_dir=args.out or ".")
    print(report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frozenwalk",
        description="Unidirectional walk in a frozen environment: simulation and verification")
    sub = parser.add_subparsers(dest="group", required=True)

    def common(p, n_flag=True):
        p.add_argument("--env", help="inline env spec JSON")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--engine", choices=["float", "exact"], default="float")

    env_p = sub.add_parser("env", help="environment construction and diagnostics")
    env_sub = env_p.add_subparsers(dest="cmd", required=True)
    p = env_sub.add_parser("gen")
    common(p)
    p.add_argument("--length", type=int, required=True)
    p.set_defaults(func=cmd_env_gen)
    p = env_sub.add_parser("diag")
    common(p)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--k-grid", default="1024,4096,16384,65536")
    p.add_argument("--u", default="1.0")
    p.set_defaults(func=cmd_env_diag)

    walk_p = sub.add_parser("walk", help="pmf propagation and Monte Carlo sampling")
    walk_sub = walk_p.add_subparsers(dest="cmd", required=True)
    p = walk_sub.add_parser("pmf")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_walk_pmf)
    p = walk_sub.add_parser("sample")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1000)
    p.set_defaults(func=cmd_walk_sample)

    map_p = sub.add_parser("map", help="exact interval-map operations")
    map_sub = map_p.add_subparsers(dest="cmd", required=True)
    p = map_sub.add_parser("push")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=chaosmap.DEFAULT_PUSHFORWARD_CAP)
    p.set_defaults(func=cmd_map_push)
    p = map_sub.add_parser("sample")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bits", type=int, default=40)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_map_sample)

    lim_p = sub.add_parser("limits", help="centering factors")
    lim_sub = lim_p.add_subparsers(dest="cmd", required=True)
    p = lim_sub.add_parser("center")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.set_defaults(func=cmd_limits_center)

    ana_p = sub.add_parser("analyze", help="convergence experiments")
    ana_sub = ana_p.add_subparsers(dest="cmd", required=True)
    for metric in ("llt", "clt", "lln", "hitting", "figure2"):
        p = ana_sub.add_parser(metric)
        common(p)
        p.add_argument("--n-grid", default="512,2048,8192")
        p.add_argument("--seeds", type=int, default=100)
        p.set_defaults(func=cmd_analyze, metric=metric)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, json.JSONDecodeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NumericQualityError as exc:
        print(f"numeric quality: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FrozenwalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
