"""
Planning tools: honest-prover expectations, source-intensity optimization and
resource accounting.

The honest prover detects a pulse with probability ``q = 1 - exp(-eta * mu)``
and reports the wrong eigenvalue with probability ``p_e`` after a detection, so
its expected score per round is

    gamma_c * q * (1 - p_e) - gamma_perp * (1 - q) - gamma_i * q * p_e

The intensity is chosen to maximize the margin between this expectation and
the secure threshold.
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Iterable, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DomainError
from .photon_stats import ChannelModel, Intensity
from .security_bounds import (
    ScoreCoefficients,
    SecurityParams,
    ThresholdReport,
    threshold,
)

logger = logging.getLogger(__name__)

DEFAULT_INTERVAL = (0.05, 2.0)
GRID_STEP = 0.01
MAX_MU = 5.0
# Boolean input width below which the attack resource figure is not meaningful
MIN_ATTACK_WIDTH = 24


@dataclass(frozen=True)
class ProtocolParams:
    """
    Protocol-level scalars shared by planning and simulation.

    Args:
        rounds: Total number of rounds N
        input_bits: Width n of the Boolean function input (even)
        mu: Mean photon number of the source
        channel: Transmittance and misalignment error
        security: Failure probability and mismatch bound
        rep_rate: Round repetition rate in Hz
    """

    rounds: int
    mu: float
    channel: ChannelModel
    security: SecurityParams = SecurityParams()
    input_bits: int = 40
    rep_rate: float = 2e6

    def __post_init__(self):
        if int(self.rounds) != self.rounds or self.rounds < 0:
            raise DomainError(
                f"rounds must be a non-negative integer, got {self.rounds}"
            )
        object.__setattr__(self, "rounds", int(self.rounds))
        object.__setattr__(self, "mu", Intensity(self.mu).mu)
        if (
            int(self.input_bits) != self.input_bits
            or self.input_bits < 2
            or self.input_bits % 2
        ):
            raise DomainError(
                f"input_bits must be an even integer >= 2, got {self.input_bits}"
            )
        object.__setattr__(self, "input_bits", int(self.input_bits))
        if not self.rep_rate > 0:
            raise DomainError(f"rep_rate must be positive, got {self.rep_rate}")

    def with_mu(self, mu: float) -> "ProtocolParams":
        return replace(self, mu=mu)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rounds": self.rounds,
            "mu": self.mu,
            "input_bits": self.input_bits,
            "rep_rate": self.rep_rate,
            "channel": asdict(self.channel),
            "security": self.security.to_dict(),
        }


@dataclass(frozen=True)
class ExpectedTally:
    """Expected numbers of correct, incorrect and no-response rounds."""

    n_c: float
    n_i: float
    n_perp: float

    @property
    def total(self) -> float:
        return self.n_c + self.n_i + self.n_perp

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class PlanResult:
    """Outcome of the intensity optimization."""

    mu_star: float
    honest_score: float
    threshold: float
    margin: float
    feasible: bool
    interval: Tuple[float, float]
    report: ThresholdReport

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mu_star": self.mu_star,
            "honest_score": self.honest_score,
            "threshold": self.threshold,
            "margin": self.margin,
            "feasible": self.feasible,
            "interval": list(self.interval),
            "threshold_report": self.report.to_dict(),
        }


@dataclass(frozen=True)
class ChannelFit:
    """Effective channel parameters recovered from a tally."""

    eta_mu: float
    eta: float
    p_e: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class TrialSummary:
    """Mean and sample standard deviation of repeated session scores."""

    count: int
    mean: float
    std: float
    passed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _detection(params: ProtocolParams) -> float:
    return -math.expm1(-params.channel.eta * params.mu)


def honest_expected_tally(params: ProtocolParams) -> ExpectedTally:
    """Expected (n_c, n_I, n_perp) of an honest prover over ``params.rounds``."""
    rounds = float(params.rounds)
    detected = _detection(params)
    p_e = params.channel.p_e
    return ExpectedTally(
        n_c=rounds * detected * (1.0 - p_e),
        n_i=rounds * detected * p_e,
        n_perp=rounds * math.exp(-params.channel.eta * params.mu),
    )


def honest_expected_score(params: ProtocolParams, coeffs: ScoreCoefficients) -> float:
    """Expected score of an honest prover."""
    detected = _detection(params)
    p_e = params.channel.p_e
    per_round = (
        coeffs.gamma_c * detected * (1.0 - p_e)
        - coeffs.gamma_perp * math.exp(-params.channel.eta * params.mu)
        - coeffs.gamma_i * detected * p_e
    )
    return params.rounds * per_round


def _margin(params: ProtocolParams, coeffs: ScoreCoefficients, mu: float) -> float:
    candidate = params.with_mu(mu)
    gamma0 = threshold(candidate.rounds, mu, coeffs, candidate.security).gamma0
    return honest_expected_score(candidate, coeffs) - gamma0


def optimize_mu(
    params: ProtocolParams,
    coeffs: ScoreCoefficients,
    interval: Tuple[float, float] = DEFAULT_INTERVAL,
    tolerance: float = 1e-4,
) -> PlanResult:
    """
    Find the intensity that maximizes ``honest_expected_score - gamma0``.

    A coarse grid at 0.01 steps locates the best point (ties go to the smallest
    mu); golden-section search then refines it inside the neighbouring grid
    cells. ``params.mu`` is ignored.

    Returns:
        PlanResult; ``feasible`` is False when even the best margin is negative
    """
    low, high = (float(v) for v in interval)
    if not 0.0 < low < high <= MAX_MU:
        raise DomainError(
            f"search interval must satisfy 0 < low < high <= {MAX_MU}, got {interval}"
        )
    if not tolerance > 0:
        raise DomainError(f"tolerance must be positive, got {tolerance}")

    steps = max(1, int(round((high - low) / GRID_STEP)))
    grid = np.linspace(low, high, steps + 1)
    values = np.array([_margin(params, coeffs, mu) for mu in grid])
    best = int(np.argmax(values))
    mu_star = float(grid[best])
    logger.debug("grid optimum mu=%.4f margin=%.3f", mu_star, values[best])

    interior = 0 < best < len(grid) - 1
    if interior and values[best] > values[best - 1] and values[best] > values[best + 1]:
        result = minimize_scalar(
            lambda mu: -_margin(params, coeffs, mu),
            bracket=(grid[best - 1], grid[best], grid[best + 1]),
            method="golden",
            options={"xtol": tolerance},
        )
        refined = float(np.clip(result.x, grid[best - 1], grid[best + 1]))
        if _margin(params, coeffs, refined) >= values[best]:
            mu_star = refined

    chosen = params.with_mu(mu_star)
    report = threshold(chosen.rounds, mu_star, coeffs, chosen.security)
    honest = honest_expected_score(chosen, coeffs)
    margin = honest - report.gamma0
    if margin < 0:
        logger.warning(
            "no intensity in [%g, %g] lets an honest prover pass (best margin %.1f)",
            low,
            high,
            margin,
        )
    return PlanResult(
        mu_star=mu_star,
        honest_score=honest,
        threshold=report.gamma0,
        margin=margin,
        feasible=margin >= 0,
        interval=(low, high),
        report=report,
    )


def attack_resource_rate(n: int, rep_rate: float) -> float:
    """
    Entangled pairs per second an attacker needs, ``rep_rate * (n/4 - 5)``.

    Widths below 24 bits are accepted with a warning; a non-positive
    requirement is reported as 0.
    """
    if not rep_rate > 0:
        raise DomainError(f"rep_rate must be positive, got {rep_rate}")
    rate = float(rep_rate) * (n / 4.0 - 5.0)
    if n < MIN_ATTACK_WIDTH:
        logger.warning(
            "input width n=%d is below %d bits; attack resource threshold %.3g",
            n,
            MIN_ATTACK_WIDTH,
            max(0.0, rate),
        )
    return max(0.0, rate)


def transmittance_from_losses(
    insertion_loss_db: float, detector_efficiency: float
) -> float:
    """Lumped transmittance of an insertion loss in dB followed by a detector."""
    if insertion_loss_db < 0:
        raise DomainError(f"insertion loss must be >= 0 dB, got {insertion_loss_db}")
    if not 0.0 <= detector_efficiency <= 1.0:
        raise DomainError(
            f"detector efficiency must lie in [0, 1], got {detector_efficiency}"
        )
    return detector_efficiency * 10.0 ** (-insertion_loss_db / 10.0)


def session_duration(rounds: int, rep_rate: float) -> float:
    """Seconds needed to run ``rounds`` rounds at ``rep_rate``."""
    if not rep_rate > 0:
        raise DomainError(f"rep_rate must be positive, got {rep_rate}")
    return rounds / float(rep_rate)


def fit_channel_from_tally(tally: Any, mu: float) -> ChannelFit:
    """
    Recover the effective ``eta * mu`` and ``p_e`` that reproduce a tally.

    ``tally`` is anything with ``n_c``, ``n_i`` and ``n_perp`` attributes.
    """
    mu = Intensity(mu).mu
    rounds = tally.n_c + tally.n_i + tally.n_perp
    if rounds <= 0 or tally.n_perp <= 0:
        raise DomainError("tally needs at least one no-response round to fit a channel")
    if mu == 0:
        raise DomainError("cannot fit a transmittance at mu = 0")
    eta_mu = -math.log(tally.n_perp / rounds)
    responses = tally.n_c + tally.n_i
    p_e = tally.n_i / responses if responses else 0.0
    return ChannelFit(eta_mu=eta_mu, eta=eta_mu / mu, p_e=p_e)


def summarize_trials(trials: Iterable[Union[float, Any]]) -> TrialSummary:
    """
    Mean and sample standard deviation of session scores.

    Accepts plain scores or records with ``score`` and ``passed`` attributes.
    """
    items = list(trials)
    if not items:
        raise DomainError("cannot summarize an empty list of trials")
    scores = np.array([getattr(t, "score", t) for t in items], dtype=float)
    passed = None
    if all(hasattr(t, "passed") for t in items):
        passed = sum(1 for t in items if t.passed)
    std = float(np.std(scores, ddof=1)) if len(scores) > 1 else 0.0
    return TrialSummary(
        count=len(items), mean=float(np.mean(scores)), std=std, passed=passed
    )
