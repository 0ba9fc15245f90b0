"""
Command-line entry point: ``qpv threshold|optimize|simulate|locate|budget``.

Every command reads one configuration file, delegates to the library and
emits a report. Exit codes: 0 success, 1 verification failed, 2 configuration
error, 3 internal error.
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .boolean_function import boolean_fn_create
from .config import OUTPUT_FORMATS, RunConfig, RunConfigParser
from .exceptions import ConfigError, QPVError
from .planner import (
    ExpectedTally,
    attack_resource_rate,
    honest_expected_tally,
    optimize_mu,
    session_duration,
    summarize_trials,
)
from .protocol import (
    AdversaryStrategy,
    adversary_expected_tally,
    run_session,
    score_std,
    score_tally,
    verify,
)
from .report import Report, write_report
from .security_bounds import threshold
from .spacetime import latency_budget, locate, range_from_excess, region_contains

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

COMMANDS = ("threshold", "optimize", "simulate", "locate", "budget")


def _report(
    command: str,
    cfg: RunConfig,
    results: Dict[str, Any],
    seeds: Sequence[int] = (),
    trials: Optional[List[Dict[str, Any]]] = None,
    verified: bool = True,
    theory: Optional[Dict[str, Any]] = None,
) -> Report:
    return Report(
        command=command,
        config=cfg.to_dict(),
        results=results,
        tool_version=__version__,
        seeds=tuple(seeds),
        trials=trials or [],
        verified=verified,
        theory=theory,
    )


def _threshold(cfg: RunConfig, seeds: Sequence[int]) -> Report:
    cfg.require("protocol")
    params = cfg.params
    report = threshold(params.rounds, params.mu, cfg.coefficients, params.security)
    return _report("threshold", cfg, report.to_dict())


def _optimize(cfg: RunConfig, seeds: Sequence[int]) -> Report:
    cfg.require("protocol")
    params = cfg.params
    plan = optimize_mu(params, cfg.coefficients, cfg.run.interval, cfg.run.tolerance)
    results = plan.to_dict()
    results["session_duration_s"] = session_duration(params.rounds, params.rep_rate)
    results["attack_pairs_per_s"] = attack_resource_rate(
        params.input_bits, params.rep_rate
    )
    return _report("optimize", cfg, results, verified=plan.feasible)


def _theory(cfg: RunConfig) -> Tuple[ExpectedTally, float]:
    """Expected tally of the configured role and the threshold it is held to."""
    params = cfg.params
    if isinstance(cfg.role, AdversaryStrategy):
        tally = adversary_expected_tally(cfg.role, params)
    else:
        tally = honest_expected_tally(params)
    report = threshold(params.rounds, params.mu, cfg.coefficients, params.security)
    return tally, report.gamma0


def _expected(cfg: RunConfig) -> Report:
    role = cfg.role
    tally, gamma0 = _theory(cfg)
    score = score_tally(tally, cfg.coefficients)
    passed = verify(score, gamma0)
    results = {
        "mode": "expected",
        "role": role.name if isinstance(role, AdversaryStrategy) else role,
        "tally": tally.to_dict(),
        "score": score,
        "score_std": score_std(tally, cfg.coefficients),
        "threshold": gamma0,
        "passed": passed,
    }
    theory = {"tally": tally.to_dict(), "threshold": gamma0}
    return _report("simulate", cfg, results, verified=passed, theory=theory)


def _simulate(cfg: RunConfig, seeds: Sequence[int]) -> Report:
    cfg.require("protocol")
    if cfg.run.expected:
        return _expected(cfg)
    if not seeds:
        raise ConfigError("simulate needs at least one seed", key="run.seeds")

    params = cfg.params
    function = boolean_fn_create(
        params.input_bits, cfg.run.function_seed, cfg.run.backend
    )
    records = []
    for seed in seeds:
        record = run_session(params, cfg.coefficients, cfg.role, seed, function)
        logger.info("seed %d: score %.3f passed=%s", seed, record.score, record.passed)
        records.append(record)

    expected, gamma0 = _theory(cfg)
    trials = [record.to_dict() for record in records]
    summary = summarize_trials(records)
    results = {"mode": "monte-carlo", "trials": trials, "summary": summary.to_dict()}
    return _report(
        "simulate",
        cfg,
        results,
        seeds=seeds,
        trials=trials,
        verified=all(record.passed for record in records),
        theory={"tally": expected.to_dict(), "threshold": gamma0},
    )


def _locate(cfg: RunConfig, seeds: Sequence[int]) -> Report:
    cfg.require("geometry", "timing")
    region = locate(cfg.geometry, cfg.timing)
    results = {"region": region.to_dict()}
    verified = not region.is_empty
    if cfg.claimed is not None:
        inside = region_contains(region, cfg.claimed)
        results["claimed_inside"] = inside
        verified = verified and inside
    return _report("locate", cfg, results, verified=verified)


def _budget(cfg: RunConfig, seeds: Sequence[int]) -> Report:
    total, breakdown = latency_budget(cfg.latency)
    results = {
        "total_ns": total,
        "breakdown_ns": [[name, value] for name, value in breakdown],
        "range_m": range_from_excess(total),
    }
    return _report("budget", cfg, results)


HANDLERS: Dict[str, Callable[[RunConfig, Sequence[int]], Report]] = {
    "threshold": _threshold,
    "optimize": _optimize,
    "simulate": _simulate,
    "locate": _locate,
    "budget": _budget,
}


def run_command(
    cmd: str, cfg: RunConfig, seeds: Optional[Sequence[int]] = None
) -> Report:
    """
    Run one subcommand against a validated configuration.

    Args:
        cmd: One of ``threshold``, ``optimize``, ``simulate``, ``locate``, ``budget``
        cfg: Resolved configuration
        seeds: Seeds overriding ``[run] seeds``

    Returns:
        Report embedding the resolved configuration
    """
    if cmd not in HANDLERS:
        raise ConfigError(
            f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}"
        )
    return HANDLERS[cmd](cfg, tuple(seeds) if seeds else cfg.run.seeds)


def _seed(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed < 1 << 64:
        raise argparse.ArgumentTypeError(
            f"seed must be a 64-bit unsigned integer: {value}"
        )
    return seed


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH")
    common.add_argument("--seed", type=_seed, nargs="+", default=None, metavar="U64")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=None)
    common.add_argument("--out", default=None, metavar="PATH")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="qpv", description="Coherent-state position-verification lab"
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("threshold", parents=[common], help="Secure score threshold")
    subparsers.add_parser("optimize", parents=[common], help="Best source intensity")
    subparsers.add_parser("simulate", parents=[common], help="Simulate sessions")
    subparsers.add_parser("locate", parents=[common], help="Region from timing")
    subparsers.add_parser("budget", parents=[common], help="Prover latency budget")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = RunConfigParser().parse_file(args.config)
        report = run_command(args.command, cfg, args.seed)
        write_report(report, args.format or cfg.run.format, args.out or cfg.run.out)
    except QPVError as err:
        logger.error("%s", err)
        return EXIT_CONFIG
    except Exception as err:
        logger.exception("internal error: %s", err)
        return EXIT_INTERNAL

    if not report.verified:
        logger.warning("%s: verification failed", args.command)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
