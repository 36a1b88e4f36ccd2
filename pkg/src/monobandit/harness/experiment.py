"""Execute (algorithm, seed, horizon) cells and persist regret CSVs."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import accumulate
from pathlib import Path

from ..learner import ALGORITHMS, LearnerConfig
from ..policy import PolicyError, StateBudgetExceeded
from .config import ConfigError, ExperimentConfig
from .csvio import SUMMARY_HEADER, RegretCsvRow, sort_rows, write_rows, write_table
from .stats import fit_loglog_slope, summarize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cell:
    algorithm: str
    seed: int
    horizon: int


@dataclass
class CellResult:
    cell: Cell
    rows: list[RegretCsvRow] = field(default_factory=list)
    error: str | None = None


@dataclass
class ExperimentResult:
    rows: list[RegretCsvRow]
    paths: dict[str, Path]
    failures: list[CellResult]

    def final_points(self, algorithm: str) -> list[tuple[int, float]]:
        """(T, seed-mean cumulative regret at T) for horizon-end rows."""
        return [(t, m) for alg, t, _, m, *_ in summarize(self.rows) if alg == algorithm]


def cells(cfg: ExperimentConfig) -> list[Cell]:
    return [Cell(a, s, t) for a in cfg.algorithms for s in cfg.seeds for t in cfg.horizons]


def run_cell(cfg: ExperimentConfig, cell: Cell, timing: bool = False) -> CellResult:
    """One independent run; horizon-end mode keeps only the row at t = T."""
    inst = cfg.instance
    learner_cfg = LearnerConfig(delta=cfg.delta, state_budget=cfg.state_budget, mc_samples=cfg.mc_samples)
    kwargs = {}
    if cell.algorithm == "etc" and cfg.explore_rounds is not None:
        kwargs["explore_rounds_per_item"] = cfg.explore_rounds
    start = time.perf_counter()
    try:
        records = ALGORITHMS[cell.algorithm](
            inst.problem, inst.true_specs, cell.horizon, cell.seed, learner_cfg, **kwargs
        )
    except (StateBudgetExceeded, PolicyError, ValueError) as exc:
        return CellResult(cell, error=f"{type(exc).__name__}: {exc}")
    elapsed = (time.perf_counter() - start) * 1000.0 if timing else 0.0
    exp = list(accumulate(r.regret_increment for r in records))
    real = list(accumulate(r.realized_regret_increment for r in records))
    if cfg.rows == "horizon_end":
        idx = [len(records) - 1]
    else:
        idx = range(len(records))
    rows = [RegretCsvRow(cell.algorithm, cell.seed, records[i].t, exp[i], real[i], elapsed) for i in idx]
    return CellResult(cell, rows)


def _run_cell_args(args):
    return run_cell(*args)


def run_experiment(
    cfg: ExperimentConfig, *, threads: int = 1, timing: bool = False, write: bool = True
) -> ExperimentResult:
    """Run every cell, then write one CSV per algorithm plus a seed summary.

    Cells are independent; with ``threads > 1`` they run in worker processes
    and are merged in (algorithm, seed, t) order, so output does not depend on
    scheduling.  A failing cell is logged and skipped.
    """
    if cfg.rows == "every_round" and len(cfg.horizons) > 1:
        raise ConfigError("experiment.rows: 'every_round' needs a single horizon")
    todo = cells(cfg)
    if threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell_args, [(cfg, c, timing) for c in todo], chunksize=1))
    else:
        results = [run_cell(cfg, c, timing) for c in todo]
    failures = [r for r in results if r.error]
    for r in failures:
        log.warning("cell %s seed=%d T=%d failed: %s", r.cell.algorithm, r.cell.seed, r.cell.horizon, r.error)
    rows = sort_rows(row for r in results for row in r.rows)
    paths: dict[str, Path] = {}
    if write:
        out = Path(cfg.out_dir)
        for alg in cfg.algorithms:
            p = out / f"{cfg.name}_{alg}.csv"
            write_rows(p, [r for r in rows if r.algorithm == alg])
            paths[alg] = p
        paths["summary"] = out / f"{cfg.name}_summary.csv"
        write_table(paths["summary"], SUMMARY_HEADER, summarize(rows))
        if failures:
            paths["failures"] = out / f"{cfg.name}_failures.csv"
            write_table(
                paths["failures"], ("algorithm", "seed", "horizon", "error"),
                [(f.cell.algorithm, f.cell.seed, f.cell.horizon, f.error) for f in failures],
            )
    return ExperimentResult(rows, paths, failures)


def slopes(result: ExperimentResult, algorithms) -> dict[str, float]:
    """Log-log slope of seed-mean final regret against T, where it can be fitted."""
    out = {}
    for alg in algorithms:
        pts = result.final_points(alg)
        if all(m <= 0 for _, m in pts):
            continue  # zero regret (the clairvoyant floor) has no slope
        try:
            out[alg] = fit_loglog_slope(pts)
        except ValueError:
            continue
    return out


def with_overrides(cfg: ExperimentConfig, *, seed=None, out_dir=None, delta=None) -> ExperimentConfig:
    changes = {}
    if seed is not None:
        changes["seeds"] = [seed]
    if out_dir is not None:
        changes["out_dir"] = Path(out_dir)
    if delta is not None:
        if not 0.0 < delta < 1.0:
            raise ConfigError("--delta: must lie in (0, 1)")
        changes["delta"] = delta
    return replace(cfg, **changes)
