"""TOML experiment configuration with a validating loader.

Layout::

    [experiment]
    name = "pandora"
    horizons = [256, 512]        # ascending
    seeds = 50                   # a count (0..49) or an explicit list
    algorithms = ["online", "etc", "clairvoyant"]
    delta = 0.01                 # optional; default schedule otherwise
    out_dir = "results"
    rows = "horizon_end"         # or "every_round"
    state_budget = 1000000
    mc_samples = 4000

    [instance]
    kind = "pandora"
    costs = [0.5, 1.0]

    [[instance.items]]
    support = [0, 2, 5]
    probs = [0.5, 0.3, 0.2]

Items accept ``support``/``probs``, ``uniform = [lo, hi]`` or
``piecewise_cdf``; SRM items may give ``probs`` alone (support 0..C) and
series-testing items may give ``work_prob``.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..distributions import DiscreteDist, DiscreteSpec, DistributionError, TrueDistSpec, spec_from_config
from ..learner import ALGORITHMS
from ..problems import Problem, make_problem

ROW_MODES = ("every_round", "horizon_end")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class Instance:
    problem: Problem
    true_specs: list[TrueDistSpec]


@dataclass
class ExperimentConfig:
    name: str
    instance: Instance
    horizons: list[int]
    seeds: list[int]
    algorithms: list[str]
    delta: float | None = None
    out_dir: Path = Path("results")
    rows: str = "every_round"
    state_budget: int | None = None
    mc_samples: int = 4000
    explore_rounds: int | None = None
    source: Path | None = field(default=None, compare=False)


def _item_spec(kind: str, params: dict, idx: int, block: Any) -> tuple[tuple[float, ...], TrueDistSpec]:
    where = f"instance.items[{idx}]"
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected a table")
    block = dict(block)
    if kind == "series_testing" and "work_prob" in block:
        p = float(block.pop("work_prob"))
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"{where}.work_prob: must lie in [0, 1]")
        block = {"support": [0.0, 1.0], "probs": [p, 1.0 - p]}
    elif kind == "srm" and "probs" in block and "support" not in block:
        block["support"] = list(range(int(params.get("capacity", 0)) + 1))
    try:
        spec = spec_from_config(block)
    except (DistributionError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    if isinstance(spec, DiscreteSpec):
        return spec.dist.support, spec
    return (spec.lower, spec.upper), spec


def parse_instance(block: Any) -> Instance:
    if not isinstance(block, dict):
        raise ConfigError("instance: missing table")
    block = dict(block)
    kind = block.pop("kind", None)
    if kind is None:
        raise ConfigError("instance.kind: missing")
    items = block.pop("items", None)
    if not items:
        raise ConfigError("instance.items: at least one item is required")
    parsed = [_item_spec(kind, block, i, b) for i, b in enumerate(items)]
    supports = [s for s, _ in parsed]
    try:
        problem = make_problem(kind, block, supports)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"instance: {exc}") from None
    if problem.n != len(parsed):
        raise ConfigError(f"instance.items: {len(parsed)} items but parameters describe {problem.n}")
    specs = []
    for i, ((_, spec), declared) in enumerate(zip(parsed, problem.supports)):
        if isinstance(spec, DiscreteSpec) and spec.dist.support != declared:
            raise ConfigError(f"instance.items[{i}].support: must be {list(declared)}")
        specs.append(spec)
    return Instance(problem, specs)


def _int_list(value: Any, key: str) -> list[int]:
    if isinstance(value, int) and not isinstance(value, bool):
        return [value]
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"{key}: expected an integer or a list of integers")
    return list(value)


def parse_config(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    exp = data.get("experiment")
    if not isinstance(exp, dict):
        raise ConfigError("experiment: missing table")
    exp = dict(exp)
    known = {"name", "horizons", "seeds", "algorithms", "delta", "out_dir", "rows",
             "state_budget", "mc_samples", "explore_rounds"}
    unknown = sorted(set(exp) - known)
    if unknown:
        raise ConfigError(f"experiment.{unknown[0]}: unknown key")
    if "horizons" not in exp:
        raise ConfigError("experiment.horizons: missing")
    horizons = _int_list(exp["horizons"], "experiment.horizons")
    if any(t < 1 for t in horizons) or horizons != sorted(set(horizons)):
        raise ConfigError("experiment.horizons: must be positive and strictly ascending")
    seeds_raw = exp.get("seeds", 1)
    if isinstance(seeds_raw, int) and not isinstance(seeds_raw, bool):
        if seeds_raw < 1:
            raise ConfigError("experiment.seeds: need at least one seed")
        seeds = list(range(seeds_raw))
    else:
        seeds = _int_list(seeds_raw, "experiment.seeds")
        if not seeds or any(s < 0 for s in seeds):
            raise ConfigError("experiment.seeds: need at least one non-negative seed")
    algorithms = exp.get("algorithms", ["online"])
    if not isinstance(algorithms, list) or not algorithms:
        raise ConfigError("experiment.algorithms: expected a non-empty list")
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ConfigError(f"experiment.algorithms: unknown algorithm {a!r}")
    delta = exp.get("delta")
    if delta is not None and not (isinstance(delta, (int, float)) and 0.0 < delta < 1.0):
        raise ConfigError("experiment.delta: must lie in (0, 1)")
    rows = exp.get("rows", "every_round" if len(horizons) == 1 else "horizon_end")
    if rows not in ROW_MODES:
        raise ConfigError(f"experiment.rows: expected one of {ROW_MODES}")
    out_dir = Path(exp.get("out_dir", "results"))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    for key in ("state_budget", "mc_samples", "explore_rounds"):
        v = exp.get(key)
        if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 0):
            raise ConfigError(f"experiment.{key}: expected a non-negative integer")
    return ExperimentConfig(
        name=str(exp.get("name", "experiment")),
        instance=parse_instance(data.get("instance")),
        horizons=horizons,
        seeds=seeds,
        algorithms=list(algorithms),
        delta=None if delta is None else float(delta),
        out_dir=out_dir,
        rows=rows,
        state_budget=exp.get("state_budget"),
        mc_samples=exp.get("mc_samples", 4000),
        explore_rounds=exp.get("explore_rounds"),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate an experiment file; relative ``out_dir`` is kept relative to the CWD."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    cfg = parse_config(data)
    cfg.source = path
    return cfg


def load_toml(path: str | Path) -> dict:
    with Path(path).open("rb") as fh:
        return tomllib.load(fh)


def truth_dists(instance: Instance) -> list[DiscreteDist]:
    return [s.dist for s in instance.true_specs if isinstance(s, DiscreteSpec)]
