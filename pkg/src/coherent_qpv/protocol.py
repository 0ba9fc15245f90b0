"""
Protocol sessions: challenges, prover responses, tallies and the decision.

Each round the verifiers send two n/2-bit strings whose concatenation selects
the basis ``b = f(s1 || s2)``, and V1 sends a weak coherent pulse encoding the
eigenvalue ``c`` in that basis. The prover answers 0, 1 or no-response. After
N rounds the verifiers score the tally

    score = gamma_c * n_c - gamma_perp * n_perp - gamma_i * n_i

and accept when ``score >= gamma0``.

Quantum states are abstracted to (basis bit, eigenvalue bit); measuring in the
preparation basis returns ``c`` and measuring in the other basis returns a
uniform bit. Sessions are simulated in blocks of ``ROUNDS_PER_STREAM`` rounds,
each driven by its own random substream keyed by the block index, so results
depend only on the seed.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from numpy.random import Generator

from .boolean_function import (
    Backend,
    BooleanFunction,
    boolean_fn_create,
    boolean_fn_eval,
)
from .exceptions import DomainError
from .photon_stats import (
    ChannelModel,
    MuLike,
    poisson_class_probs,
    sample_photon_number,
    sample_threshold_detection,
    substream,
)
from .planner import ExpectedTally, ProtocolParams
from .security_bounds import ScoreCoefficients, threshold, vacuum_response_optimum

logger = logging.getLogger(__name__)

ROUNDS_PER_STREAM = 1 << 16
NO_RESPONSE_CODE = -1
PHOTON_CLASSES = ("vacuum", "single", "multi")
# Probability that intercept-resend returns the right eigenvalue
INTERCEPT_CORRECT = 0.75


class Response(enum.Enum):
    """The prover's credential c'."""

    ZERO = 0
    ONE = 1
    NO_RESPONSE = NO_RESPONSE_CODE

    @classmethod
    def from_bit(cls, bit: int) -> "Response":
        return cls.ONE if bit else cls.ZERO


@dataclass(frozen=True)
class Challenge:
    """One round's classical strings, basis bit and eigenvalue bit."""

    s1: int
    s2: int
    b: int
    c: int
    half_bits: int

    @property
    def address(self) -> int:
        return (self.s1 << self.half_bits) | self.s2


@dataclass(frozen=True)
class RoundTally:
    """Counts of correct, incorrect and no-response rounds."""

    n_c: int = 0
    n_i: int = 0
    n_perp: int = 0

    def __post_init__(self):
        for name in ("n_c", "n_i", "n_perp"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {value}")
            object.__setattr__(self, name, int(value))

    def __add__(self, other: "RoundTally") -> "RoundTally":
        return RoundTally(
            self.n_c + other.n_c, self.n_i + other.n_i, self.n_perp + other.n_perp
        )

    @property
    def total(self) -> int:
        return self.n_c + self.n_i + self.n_perp

    @property
    def responses(self) -> int:
        return self.n_c + self.n_i

    def to_dict(self) -> Dict[str, int]:
        return {"n_c": self.n_c, "n_i": self.n_i, "n_perp": self.n_perp}


class Variant(enum.Enum):
    VACUUM_RESPONDER = "vacuum-responder"
    INTERCEPT_RESEND = "intercept-resend"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class AdversaryStrategy:
    """
    A modeled dishonest prover.

    - ``vacuum-responder``: answers a uniform bit on its first ``responses``
      vacuum rounds and no-response everywhere else.
    - ``intercept-resend``: detects a k-photon pulse with probability
      ``1 - (1 - det_eff)^k``, measures in a uniformly guessed basis and
      returns the outcome.
    - ``composite``: knows the photon number; perfect on multi-photon rounds,
      intercept-resend on single photons, vacuum-responder on vacuum.

    The adversary answers both verifiers identically.
    """

    variant: Variant
    responses: int = 0
    det_eff: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if int(self.responses) != self.responses or self.responses < 0:
            raise DomainError(
                f"responses must be a non-negative integer, got {self.responses}"
            )
        object.__setattr__(self, "responses", int(self.responses))
        if not 0.0 <= self.det_eff <= 1.0:
            raise DomainError(f"det_eff must lie in [0, 1], got {self.det_eff}")

    @property
    def name(self) -> str:
        return self.variant.value

    @classmethod
    def vacuum_responder(cls, responses: int) -> "AdversaryStrategy":
        return cls(Variant.VACUUM_RESPONDER, responses=responses)

    @classmethod
    def intercept_resend(cls, det_eff: float = 1.0) -> "AdversaryStrategy":
        return cls(Variant.INTERCEPT_RESEND, det_eff=det_eff)

    @classmethod
    def composite(cls, det_eff: float = 1.0, responses: int = 0) -> "AdversaryStrategy":
        return cls(Variant.COMPOSITE, responses=responses, det_eff=det_eff)

    @classmethod
    def composite_optimal(
        cls, coeffs: ScoreCoefficients, eps: float, det_eff: float = 1.0
    ) -> "AdversaryStrategy":
        """Composite attack answering as many vacuum rounds as the bound's optimum."""
        optimum = vacuum_response_optimum(coeffs, eps) or 0.0
        responses = int(math.floor(max(optimum, 0.0)))
        return cls.composite(det_eff=det_eff, responses=responses)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.name,
            "responses": self.responses,
            "det_eff": self.det_eff,
        }


Role = Union[str, AdversaryStrategy]


@dataclass
class AdversaryState:
    """Mutable per-session bookkeeping of a single-round adversary."""

    vacuum_answered: int = 0


@dataclass(frozen=True)
class TrialRecord:
    """Result of one simulated session."""

    tally: RoundTally
    score: float
    threshold: float
    passed: bool
    role: str
    seed: int
    diagnostics: Dict[str, RoundTally] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "role": self.role,
            "seed": self.seed,
            "tally": self.tally.to_dict(),
            "score": self.score,
            "threshold": self.threshold,
            "passed": self.passed,
            "diagnostics": {k: v.to_dict() for k, v in self.diagnostics.items()},
        }


def score_tally(tally: Any, coeffs: ScoreCoefficients) -> float:
    """Score of any object carrying ``n_c``, ``n_i`` and ``n_perp``."""
    return (
        coeffs.gamma_c * tally.n_c
        - coeffs.gamma_perp * tally.n_perp
        - coeffs.gamma_i * tally.n_i
    )


def verify(score: float, gamma0: float) -> bool:
    """Accept the prover when ``score >= gamma0`` (boundary inclusive)."""
    if not (math.isfinite(score) and math.isfinite(gamma0)):
        raise DomainError(f"score and threshold must be finite, got {score}, {gamma0}")
    return score >= gamma0


def make_challenge(f: BooleanFunction, rng: Generator) -> Challenge:
    """Draw uniform strings and eigenvalue bit; the basis bit is ``f(s1 || s2)``."""
    half = f.n // 2
    s1 = int(rng.integers(0, 1 << half, dtype=np.uint64))
    s2 = int(rng.integers(0, 1 << half, dtype=np.uint64))
    c = int(rng.integers(0, 2))
    b = boolean_fn_eval(f, (s1 << half) | s2)
    return Challenge(s1=s1, s2=s2, b=b, c=c, half_bits=half)


def _honest_replies(
    c: np.ndarray, photons: np.ndarray, channel: ChannelModel, rng: Generator
) -> np.ndarray:
    """Honest answers for a batch of rounds, coded 0, 1 or ``NO_RESPONSE_CODE``."""
    detected = sample_threshold_detection(photons, channel.eta, rng)
    flipped = (rng.random(len(c)) < channel.p_e).astype(np.int8)
    return np.where(detected, c ^ flipped, NO_RESPONSE_CODE).astype(np.int8)


def _adversary_replies(
    strategy: AdversaryStrategy,
    b: np.ndarray,
    c: np.ndarray,
    photons: np.ndarray,
    rng: Generator,
    vacuum_budget: int,
) -> Tuple[np.ndarray, int]:
    """
    Adversary answers for a batch of rounds.

    Intercepted pulses are measured in a guessed basis; vacuum rounds are
    answered with a coin flip in order until ``vacuum_budget`` is spent.

    Returns:
        Coded answers and the number of vacuum rounds answered
    """
    size = len(c)
    silent = np.full(size, NO_RESPONSE_CODE, dtype=np.int8)
    intercepted = sample_threshold_detection(photons, strategy.det_eff, rng)
    guess = rng.integers(0, 2, size=size, dtype=np.int8)
    coin = rng.integers(0, 2, size=size, dtype=np.int8)
    intercept = np.where(intercepted, np.where(guess == b, c, coin), silent)
    if strategy.variant is Variant.INTERCEPT_RESEND:
        return intercept, 0

    vacuum = photons == 0
    answered = vacuum & (np.cumsum(vacuum) <= vacuum_budget)
    vacuum_coin = rng.integers(0, 2, size=size, dtype=np.int8)
    vacuum_reply = np.where(answered, vacuum_coin, silent)
    used = int(np.count_nonzero(answered))
    if strategy.variant is Variant.VACUUM_RESPONDER:
        return vacuum_reply, used

    reply = np.where(photons >= 2, c, np.where(photons == 1, intercept, vacuum_reply))
    return reply.astype(np.int8), used


def honest_prover_respond(
    ch: Challenge, mu: MuLike, channel: ChannelModel, rng: Generator
) -> Response:
    """
    Measure the pulse in basis ``b``: detection needs a surviving photon, and a
    detection reports ``c`` except with the misalignment probability.
    """
    photons = sample_photon_number(mu, rng, size=1)
    reply = _honest_replies(np.array([ch.c], dtype=np.int8), photons, channel, rng)
    return Response(int(reply[0]))


def adversary_respond(
    strategy: AdversaryStrategy,
    ch: Challenge,
    photons: int,
    rng: Generator,
    state: Optional[AdversaryState] = None,
) -> Response:
    """
    Answer one round as ``strategy`` given the pulse's true photon number.

    ``state`` carries the vacuum-answer count across rounds of a session; a
    fresh state is used when omitted.
    """
    state = state if state is not None else AdversaryState()
    reply, used = _adversary_replies(
        strategy,
        np.array([ch.b], dtype=np.int8),
        np.array([ch.c], dtype=np.int8),
        np.array([photons]),
        rng,
        max(0, strategy.responses - state.vacuum_answered),
    )
    state.vacuum_answered += used
    return Response(int(reply[0]))


def _tally(
    responses: np.ndarray, c: np.ndarray, mask: Optional[np.ndarray] = None
) -> RoundTally:
    if mask is not None:
        responses, c = responses[mask], c[mask]
    answered = responses != NO_RESPONSE_CODE
    correct = int(np.count_nonzero(answered & (responses == c)))
    return RoundTally(
        n_c=correct,
        n_i=int(np.count_nonzero(answered)) - correct,
        n_perp=int(np.count_nonzero(~answered)),
    )


def _role_name(role: Role) -> str:
    if isinstance(role, AdversaryStrategy):
        return role.name
    if role != "honest":
        raise DomainError(
            f"role must be 'honest' or an AdversaryStrategy, got {role!r}"
        )
    return role


def _simulate_block(
    params: ProtocolParams,
    f: BooleanFunction,
    role: Role,
    rng: Generator,
    size: int,
    vacuum_budget: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    half = f.n // 2
    photons = sample_photon_number(params.mu, rng, size=size)
    s1 = rng.integers(0, 1 << half, size=size, dtype=np.uint64)
    s2 = rng.integers(0, 1 << half, size=size, dtype=np.uint64)
    c = rng.integers(0, 2, size=size, dtype=np.int8)
    b = f.evaluate((s1 << np.uint64(half)) | s2).astype(np.int8)

    if not isinstance(role, AdversaryStrategy):
        return photons, c, _honest_replies(c, photons, params.channel, rng), 0
    replies, used = _adversary_replies(role, b, c, photons, rng, vacuum_budget)
    return photons, c, replies, used


def run_session(
    params: ProtocolParams,
    coeffs: ScoreCoefficients,
    role: Role,
    seed: int,
    function: Optional[BooleanFunction] = None,
) -> TrialRecord:
    """
    Simulate ``params.rounds`` rounds for an honest prover or an adversary.

    Args:
        params: Protocol parameters; the threshold uses the same N, mu, eps, xi
        coeffs: Score weights
        role: ``"honest"`` or an AdversaryStrategy
        seed: Session seed; identical inputs give identical records
        function: Boolean function (defaults to the keyed backend seeded with 0)

    Returns:
        TrialRecord with per-photon-class diagnostics
    """
    name = _role_name(role)
    if function is None:
        function = boolean_fn_create(params.input_bits, 0, Backend.KEYED)
    elif function.n != params.input_bits:
        raise DomainError(
            f"Boolean function width {function.n} does not match input_bits "
            f"{params.input_bits}"
        )

    tally = RoundTally()
    diagnostics = {label: RoundTally() for label in PHOTON_CLASSES}
    budget = role.responses if isinstance(role, AdversaryStrategy) else 0

    for block, start in enumerate(range(0, params.rounds, ROUNDS_PER_STREAM)):
        size = min(ROUNDS_PER_STREAM, params.rounds - start)
        rng = substream(seed, block)
        photons, c, responses, used = _simulate_block(
            params, function, role, rng, size, budget
        )
        budget -= used
        tally = tally + _tally(responses, c)
        masks = (photons == 0, photons == 1, photons >= 2)
        for label, mask in zip(PHOTON_CLASSES, masks):
            diagnostics[label] = diagnostics[label] + _tally(responses, c, mask)

    report = threshold(params.rounds, params.mu, coeffs, params.security)
    score = score_tally(tally, coeffs)
    passed = verify(score, report.gamma0)
    logger.debug(
        "session role=%s seed=%d N=%d score=%.2f gamma0=%.2f passed=%s",
        name,
        seed,
        params.rounds,
        score,
        report.gamma0,
        passed,
    )
    return TrialRecord(
        tally=tally,
        score=score,
        threshold=report.gamma0,
        passed=passed,
        role=name,
        seed=int(seed),
        diagnostics=diagnostics,
    )


def adversary_expected_tally(
    strategy: AdversaryStrategy, params: ProtocolParams
) -> ExpectedTally:
    """Analytic expectation of an adversary's tally over ``params.rounds``."""
    rounds = float(params.rounds)
    probs = poisson_class_probs(params.mu)

    if strategy.variant is Variant.INTERCEPT_RESEND:
        detected = -math.expm1(-strategy.det_eff * params.mu)
        return ExpectedTally(
            n_c=rounds * detected * INTERCEPT_CORRECT,
            n_i=rounds * detected * (1.0 - INTERCEPT_CORRECT),
            n_perp=rounds * (1.0 - detected),
        )

    answered = min(float(strategy.responses), rounds * probs.p0)
    if strategy.variant is Variant.VACUUM_RESPONDER:
        return ExpectedTally(
            n_c=answered / 2.0, n_i=answered / 2.0, n_perp=rounds - answered
        )

    single = rounds * probs.p1
    multi = rounds * probs.p2plus
    return ExpectedTally(
        n_c=multi + single * strategy.det_eff * INTERCEPT_CORRECT + answered / 2.0,
        n_i=single * strategy.det_eff * (1.0 - INTERCEPT_CORRECT) + answered / 2.0,
        n_perp=single * (1.0 - strategy.det_eff) + rounds * probs.p0 - answered,
    )


def score_std(tally: ExpectedTally, coeffs: ScoreCoefficients) -> float:
    """
    Standard deviation of the score of i.i.d. rounds whose outcome frequencies
    are given by an expected tally.
    """
    rounds = tally.total
    if rounds <= 0:
        return 0.0
    probs = np.array([tally.n_c, tally.n_i, tally.n_perp]) / rounds
    values = np.array([coeffs.gamma_c, -coeffs.gamma_i, -coeffs.gamma_perp])
    mean = float(probs @ values)
    variance = float(probs @ values**2) - mean**2
    return math.sqrt(max(variance, 0.0) * rounds)
