"""Command line entry point: run, sweep, verify, plot, sampletest."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

from ..distributions import DistributionError, spec_from_config
from .config import ConfigError, load_config, load_toml
from .csvio import SchemaError, read_rows
from .experiment import run_experiment, slopes, with_overrides
from .sampletest import SAMPLERS, sampling_guarantee_test
from .svgplot import write_svg
from .verify import monotonicity_suite, oracle_suite, stability_suite

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2


def _add_run_flags(p: argparse.ArgumentParser, threads: int) -> None:
    p.add_argument("config", type=Path)
    p.add_argument("--seed", type=int, help="run this single seed instead of the configured ones")
    p.add_argument("--out-dir", type=Path)
    p.add_argument("--delta", type=float, help="override the confidence parameter")
    p.add_argument("--threads", type=int, default=threads)
    p.add_argument("--timing", action="store_true", help="record wall time (CSVs stop being reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monobandit", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(sub.add_parser("run", help="run an experiment config"), threads=1)
    _add_run_flags(sub.add_parser("sweep", help="run an experiment config in parallel over cells"),
                   threads=os.cpu_count() or 1)

    v = sub.add_parser("verify", help="oracle, monotonicity and stability self-checks")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--instances", type=int, default=100, help="oracle instances per problem")
    v.add_argument("--pairs", type=int, default=200, help="monotonicity pairs per problem")
    v.add_argument("--stability", type=int, default=500, help="stability instances in total")

    p = sub.add_parser("plot", help="plot regret CSVs to SVG")
    p.add_argument("csv", type=Path, nargs="+")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--loglog", action="store_true")

    s = sub.add_parser("sampletest", help="statistical test of the estimator guarantees")
    s.add_argument("config", type=Path)
    s.add_argument("--seed", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--out-dir", type=Path)
    return parser


def _cmd_run(args) -> int:
    cfg = with_overrides(load_config(args.config), seed=args.seed, out_dir=args.out_dir, delta=args.delta)
    result = run_experiment(cfg, threads=max(1, args.threads), timing=args.timing)
    for name, path in result.paths.items():
        print(f"wrote {name}: {path}")
    if len(cfg.horizons) >= 3 and cfg.rows == "horizon_end":
        for alg, s in slopes(result, cfg.algorithms).items():
            print(f"{alg}: log-log slope {s:.3f}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    ok = True
    for rep in (oracle_suite(args.instances, args.seed), monotonicity_suite(args.pairs, args.seed),
                stability_suite(args.stability, args.seed)):
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.name}: {rep.checked} checks, {len(rep.failures)} failures")
        for f in rep.failures[:5]:
            print(f"  {f}")
        ok &= rep.passed
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_plot(args) -> int:
    rows = []
    for path in args.csv:
        rows.extend(read_rows(path))
    if not rows:
        warnings.warn("no data rows; writing empty axes", stacklevel=1)
    write_svg(args.output, rows, loglog=args.loglog)
    print(f"wrote {args.output}")
    return EXIT_OK


def _cmd_sampletest(args) -> int:
    data = load_toml(args.config)
    block = data.get("sampletest")
    if not isinstance(block, dict):
        raise ConfigError("sampletest: missing table")
    samplers = block.get("samplers", list(SAMPLERS))
    for s in samplers:
        if s not in SAMPLERS:
            raise ConfigError(f"sampletest.samplers: unknown sampler {s!r}")
    try:
        truth = spec_from_config(block.get("truth", {}))
        cts_truth = spec_from_config(block["continuous_truth"]) if "continuous_truth" in block else truth
    except DistributionError as exc:
        raise ConfigError(f"sampletest.truth: {exc}") from None
    m_values = block.get("m_values", [16, 64, 256])
    delta = args.delta if args.delta is not None else block.get("delta", 0.1)
    trials = int(block.get("trials", 2000))
    seed = args.seed if args.seed is not None else int(block.get("seed", 0))
    if not 0 < delta < 1:
        raise ConfigError("sampletest.delta: must lie in (0, 1)")
    lines = []
    ok = True
    for s in samplers:
        res = sampling_guarantee_test(cts_truth if s == "emp_stoc_dom_cts" else truth,
                                      m_values, delta, trials, sampler=s, seed=seed)
        ok &= res.passed
        for m, rate in res.rates.items():
            lines.append((s, m, rate, res.threshold, "PASS" if rate <= res.threshold else "FAIL"))
        print(f"{'PASS' if res.passed else 'FAIL'} {s}: " +
              ", ".join(f"m={m} rate={r:.4f}" for m, r in res.rates.items()) + f" (limit {res.threshold:.3f})")
    if args.out_dir is not None:
        from .csvio import write_table

        write_table(args.out_dir / "sampletest.csv", ("sampler", "m", "failure_rate", "limit", "status"), lines)
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {"run": _cmd_run, "sweep": _cmd_run, "verify": _cmd_verify, "plot": _cmd_plot,
            "sampletest": _cmd_sampletest}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
