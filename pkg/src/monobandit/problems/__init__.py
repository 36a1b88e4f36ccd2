"""Exact offline solvers for five monotone stochastic problems."""
from __future__ import annotations

from typing import Sequence

from .base import Direction, Optimism, Problem, ProblemMeta
from .fspm import Fspm, PostedPricePolicy, fspm_table, solve_fspm
from .pandora import Pandora, WeitzmanPolicy, reservation_value, solve_pandora
from .prophet import Prophet, ThresholdPolicy, prophet_thresholds, solve_prophet
from .series_testing import SeriesTesting, SeriesOrderPolicy, series_cost, series_order, solve_series_testing
from .srm import ProtectionPolicy, Srm, SrmTables, solve_srm, srm_tables

KINDS = ("series_testing", "pandora", "prophet", "srm", "fspm")


def make_problem(kind: str, params: dict, supports: Sequence[Sequence[float]] | None) -> Problem:
    """Build a problem from its kind name, scalar parameters and declared supports."""
    p = dict(params)
    try:
        if kind == "series_testing":
            return SeriesTesting(tuple(p.pop("costs")))
        if kind == "pandora":
            return Pandora(tuple(p.pop("costs")), tuple(supports))
        if kind == "prophet":
            return Prophet(tuple(supports))
        if kind == "srm":
            return Srm(tuple(p.pop("prices")), int(p.pop("capacity")))
        if kind == "fspm":
            return Fspm(tuple(supports), int(p.pop("kappa", 1)))
    except KeyError as exc:
        raise ValueError(f"instance of kind {kind!r} is missing {exc.args[0]!r}") from None
    finally:
        if kind in KINDS and p:
            raise ValueError(f"unknown instance keys for {kind!r}: {sorted(p)}")
    raise ValueError(f"unknown instance kind {kind!r}; expected one of {', '.join(KINDS)}")


def with_supports(problem: Problem, supports: Sequence[Sequence[float]]) -> Problem:
    """Same problem parameters over new declared supports (continuous mode)."""
    return make_problem(problem.kind, problem.params(), supports)


__all__ = [
    "KINDS", "Direction", "Optimism", "Problem", "ProblemMeta", "make_problem", "with_supports",
    "SeriesTesting", "SeriesOrderPolicy", "series_cost", "series_order", "solve_series_testing",
    "Pandora", "WeitzmanPolicy", "reservation_value", "solve_pandora",
    "Prophet", "ThresholdPolicy", "prophet_thresholds", "solve_prophet",
    "Srm", "SrmTables", "ProtectionPolicy", "srm_tables", "solve_srm",
    "Fspm", "PostedPricePolicy", "fspm_table", "solve_fspm",
]
