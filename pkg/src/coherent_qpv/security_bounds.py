"""
Finite-size secure score threshold for coherent-state position verification.

The threshold a dishonest prover can exceed only with probability ``5 * eps``
is assembled per photon-number class:

    gamma0 = S0_upper(N0_lower) + S1_upper(N1_upper) + S2plus_upper(N2plus_upper)

Vacuum rounds carry no information, so the attacker can only choose how many of
them (``x``) to answer with a coin flip; the vacuum term is the maximum of a
Chernoff-bounded score over ``x``. Single-photon rounds are bounded by a
perfect-attack allowance of ``N_xi`` rounds plus an Azuma fluctuation term, and
multi-photon rounds are assumed to be attacked perfectly. The class counts
themselves are replaced by their Chernoff bounds.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

from .exceptions import DomainError
from .photon_stats import MuLike, as_mu, poisson_class_probs

logger = logging.getLogger(__name__)

# Number of probabilistic inequalities that each spend one epsilon
FAILURE_TERMS = 5


@dataclass(frozen=True)
class ScoreCoefficients:
    """Weights of correct, no-response and incorrect events in the score."""

    gamma_c: float
    gamma_perp: float
    gamma_i: float

    def __post_init__(self):
        values = []
        for name in ("gamma_c", "gamma_perp", "gamma_i"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
            values.append(value)
        # Azuma's inequality needs bounded per-round increments
        if max(abs(v) for v in values) > 1.0:
            raise DomainError(
                f"score coefficients must satisfy |gamma| <= 1, got {values}"
            )

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


# Default weights for xi = 0.001
DEFAULT_COEFFICIENTS = ScoreCoefficients(
    gamma_c=0.04275, gamma_perp=0.05019, gamma_i=1.0
)


@dataclass(frozen=True)
class SecurityParams:
    """Per-inequality failure probability and response-mismatch bound."""

    epsilon: float = 1e-10
    xi: float = 0.001

    def __post_init__(self):
        for name in ("epsilon", "xi"):
            value = float(getattr(self, name))
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {value}")
            object.__setattr__(self, name, value)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ClassBounds:
    """Chernoff bounds on the vacuum, single-photon and multi-photon round counts."""

    n0_lower: float
    n1_upper: float
    n2plus_upper: float

    def __post_init__(self):
        for name in ("n0_lower", "n1_upper", "n2plus_upper"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0, got {getattr(self, name)}")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ThresholdReport:
    """Per-class score bounds and the resulting threshold."""

    s0_upper: float
    s1_upper: float
    s2plus_upper: float
    gamma0: float
    x_star: float
    n_xi: int
    total_failure_prob: float
    bounds: ClassBounds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma0": self.gamma0,
            "s0_upper": self.s0_upper,
            "s1_upper": self.s1_upper,
            "s2plus_upper": self.s2plus_upper,
            "x_star": self.x_star,
            "n_xi": self.n_xi,
            "total_failure_prob": self.total_failure_prob,
            "bounds": self.bounds.to_dict(),
        }


def _log_inv(eps: float) -> float:
    """ln(1/eps); eps = 1 is admitted as the no-fluctuation limit."""
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"failure probability must lie in (0, 1], got {eps}")
    return -math.log(eps)


def _non_negative(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be finite and >= 0, got {value}")
    return value


def vacuum_score_upper_at(
    x: float, n0: float, coeffs: ScoreCoefficients, eps: float
) -> float:
    """
    Chernoff upper bound on the vacuum-class score when ``x`` of ``n0`` vacuum
    rounds are answered and the rest are declared no-response.
    """
    n0 = _non_negative("n0", n0)
    x = float(x)
    if not 0.0 <= x <= n0:
        raise DomainError(f"x must lie in [0, n0={n0}], got {x}")
    log_inv = _log_inv(eps)
    g_c, g_p, g_i = coeffs.gamma_c, coeffs.gamma_perp, coeffs.gamma_i

    fluctuation = log_inv + math.sqrt(log_inv * log_inv + 4.0 * log_inv * x)
    return (g_c - g_i) / 2.0 * x + (g_c + g_i) / 2.0 * fluctuation - (n0 - x) * g_p


def vacuum_response_optimum(coeffs: ScoreCoefficients, eps: float) -> Optional[float]:
    """
    Unclamped number of answered vacuum rounds at which the vacuum bound peaks.

    Returns None when the bound has no interior maximum (it then grows with x).
    """
    log_inv = _log_inv(eps)
    g_c, g_p, g_i = coeffs.gamma_c, coeffs.gamma_perp, coeffs.gamma_i
    slope = g_c - g_i + 2.0 * g_p
    if slope >= 0.0:
        return None
    return -0.25 * log_inv + (g_c + g_i) ** 2 / slope**2 * log_inv


def vacuum_score_upper(
    n0: float, coeffs: ScoreCoefficients, eps: float
) -> Tuple[float, float]:
    """
    Maximize the vacuum-class bound over the number of answered rounds.

    The bound is concave in ``x``; its stationary point is clamped to
    ``[0, n0]`` and compared with both endpoints. Ties go to the smallest ``x``.

    Returns:
        Tuple of (S0 upper bound, maximizing x)
    """
    n0 = _non_negative("n0", n0)
    candidates = [0.0, n0]
    stationary = vacuum_response_optimum(coeffs, eps)
    if stationary is not None:
        candidates.append(min(max(stationary, 0.0), n0))

    best_x = 0.0
    best = vacuum_score_upper_at(0.0, n0, coeffs, eps)
    for x in sorted(candidates):
        value = vacuum_score_upper_at(x, n0, coeffs, eps)
        if value > best:
            best, best_x = value, x
    return best, best_x


def mismatch_round_cap(eps: float, xi: float) -> int:
    """
    Number of rounds in which attackers may answer the two verifiers
    differently without being caught, ``ceil(ln eps / ln(1 - xi))``.
    """
    eps = float(eps)
    xi = float(xi)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if not 0.0 < xi < 1.0:
        raise DomainError(f"xi must lie in (0, 1), got {xi}")
    ratio = math.log(eps) / math.log1p(-xi)
    # rounding strips float noise so that exact ratios do not ceil upwards
    return max(1, math.ceil(round(ratio, 9)))


def single_photon_score_upper(
    n1: float, coeffs: ScoreCoefficients, eps: float, xi: float
) -> float:
    """
    Upper bound on the single-photon score: ``C`` perfectly attacked rounds,
    ``C = min(N_xi, n1)``, plus an Azuma term over the remaining rounds.
    """
    n1 = _non_negative("n1", n1)
    capped = min(float(mismatch_round_cap(eps, xi)), n1)
    log_inv = _log_inv(eps)
    return coeffs.gamma_c * capped + math.sqrt(2.0 * log_inv * max(0.0, n1 - capped))


def multi_photon_score_upper(n2plus: float, coeffs: ScoreCoefficients) -> float:
    """Multi-photon rounds are assumed to always yield correct responses."""
    return _non_negative("n2plus", n2plus) * coeffs.gamma_c


def _chernoff_upper(mean: float, log_inv: float, cap: float) -> float:
    spread = 0.5 * (log_inv + math.sqrt(log_inv * log_inv + 8.0 * log_inv * mean))
    return min(cap, mean + spread)


def photon_class_bounds(n_rounds: int, mu: MuLike, eps: float) -> ClassBounds:
    """
    Chernoff bounds on the photon-class counts of ``n_rounds`` Poisson pulses.

    Upper bounds are clamped to ``n_rounds`` and the vacuum lower bound to 0.
    ``n_rounds = 0`` is accepted and yields all-zero bounds.
    """
    if int(n_rounds) != n_rounds or n_rounds < 0:
        raise DomainError(
            f"number of rounds must be a non-negative integer, got {n_rounds}"
        )
    total = float(n_rounds)
    mu = as_mu(mu)
    log_inv = _log_inv(eps)
    probs = poisson_class_probs(mu)

    n1_upper = _chernoff_upper(total * probs.p1, log_inv, total)
    n2plus_upper = _chernoff_upper(total * probs.p2plus, log_inv, total)
    n0_lower = max(0.0, total - n1_upper - n2plus_upper)
    return ClassBounds(n0_lower, n1_upper, n2plus_upper)


def threshold(
    n_rounds: int, mu: MuLike, coeffs: ScoreCoefficients, security: SecurityParams
) -> ThresholdReport:
    """
    Secure score threshold gamma0 for ``n_rounds`` rounds at intensity ``mu``.

    The overall failure probability is ``5 * epsilon``.
    """
    eps = security.epsilon
    bounds = photon_class_bounds(n_rounds, mu, eps)

    s0, x_star = vacuum_score_upper(bounds.n0_lower, coeffs, eps)
    s1 = single_photon_score_upper(bounds.n1_upper, coeffs, eps, security.xi)
    s2 = multi_photon_score_upper(bounds.n2plus_upper, coeffs)
    gamma0 = s0 + s1 + s2

    logger.debug(
        "threshold N=%s mu=%.6g: S0=%.3f S1=%.3f S2+=%.3f gamma0=%.3f",
        n_rounds,
        as_mu(mu),
        s0,
        s1,
        s2,
        gamma0,
    )
    return ThresholdReport(
        s0_upper=s0,
        s1_upper=s1,
        s2plus_upper=s2,
        gamma0=gamma0,
        x_star=x_star,
        n_xi=mismatch_round_cap(eps, security.xi),
        total_failure_prob=FAILURE_TERMS * eps,
        bounds=bounds,
    )
