"""
Photon-number statistics of phase-randomized weak coherent states.

A phase-randomized coherent state with mean photon number ``mu`` is exactly a
Poisson mixture of Fock states, so the simulator never tracks the optical
phase and works directly with photon-number classes: vacuum (k = 0), single
photon (k = 1) and multi photon (k >= 2).

Detection is modeled as a non-photon-number-resolving threshold detector behind
a lossy channel in which every photon survives independently with probability
``eta``. Averaged over the Poisson source this gives ``1 - exp(-eta * mu)``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.random import Generator, SeedSequence
from scipy.stats import poisson

from .exceptions import DomainError

logger = logging.getLogger(__name__)

CLASS_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Intensity:
    """Mean photon number of the source (``mu = |alpha|^2``)."""

    mu: float

    def __post_init__(self):
        mu = float(self.mu)
        if not math.isfinite(mu) or mu < 0:
            raise DomainError(f"mean photon number must be finite and >= 0, got {mu}")
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True)
class ClassProbs:
    """Probabilities of the vacuum, single-photon and multi-photon classes."""

    p0: float
    p1: float
    p2plus: float

    def __post_init__(self):
        for name in ("p0", "p1", "p2plus"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")
        total = self.p0 + self.p1 + self.p2plus
        if abs(total - 1.0) > CLASS_SUM_TOL:
            raise DomainError(f"class probabilities sum to {total!r}, expected 1")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.p0, self.p1, self.p2plus)


@dataclass(frozen=True)
class ChannelModel:
    """
    Lumped end-to-end channel seen by the prover.

    Args:
        eta: Per-photon transmittance (channel, switch and detector)
        p_e: Probability that a detection yields the wrong eigenvalue
    """

    eta: float
    p_e: float

    def __post_init__(self):
        eta = float(self.eta)
        p_e = float(self.p_e)
        if not 0.0 <= eta <= 1.0:
            raise DomainError(f"transmittance eta must lie in [0, 1], got {eta}")
        if not 0.0 <= p_e <= 0.5:
            raise DomainError(f"misalignment error p_e must lie in [0, 1/2], got {p_e}")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "p_e", p_e)


MuLike = Union[float, Intensity]


def as_mu(mu: MuLike) -> float:
    """Validate a mean photon number given as a float or an Intensity."""
    if isinstance(mu, Intensity):
        return mu.mu
    return Intensity(mu).mu


def _eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmittance eta must lie in [0, 1], got {eta}")
    return eta


def substream(seed: int, *key: int) -> Generator:
    """
    Return an independent random stream derived from ``seed`` and ``key``.

    Streams with different keys are statistically independent and do not
    depend on the order in which they are created, which lets round batches
    run in any order or on any worker.
    """
    return np.random.default_rng(SeedSequence(int(seed), spawn_key=tuple(key)))


def poisson_class_probs(mu: MuLike) -> ClassProbs:
    """
    Split a Poisson source into vacuum, single-photon and multi-photon classes.

    Returns:
        ``ClassProbs(e^-mu, mu e^-mu, 1 - e^-mu - mu e^-mu)``
    """
    mu = as_mu(mu)
    if mu == 0.0:
        return ClassProbs(1.0, 0.0, 0.0)

    p0, p1 = (float(p) for p in poisson.pmf([0, 1], mu))
    p2plus = float(poisson.sf(1, mu))
    return ClassProbs(p0, p1, p2plus)


def sample_photon_number(
    mu: MuLike, rng: Generator, size: Optional[int] = None
) -> Union[int, np.ndarray]:
    """
    Draw photon numbers from Poisson(mu).

    NumPy's Poisson sampler is exact (inversion for small means, PTRS
    rejection above), which matters at ``mu`` around 0.5.
    """
    mu = as_mu(mu)
    if size is None:
        return int(rng.poisson(mu))
    return rng.poisson(mu, size=size)


def detection_prob(mu: MuLike, eta: float) -> float:
    """Probability that at least one photon of a Poisson pulse is detected."""
    mu = as_mu(mu)
    eta = _eta(eta)
    return float(-math.expm1(-eta * mu))


def sample_threshold_detection(
    k: Union[int, Sequence[int], np.ndarray], eta: float, rng: Generator
) -> Union[bool, np.ndarray]:
    """
    Decide whether a threshold detector clicks on a ``k``-photon pulse.

    Each photon survives independently with probability ``eta``; the detector
    clicks when at least one survives, i.e. with probability ``1 - (1-eta)^k``.
    Accepts a scalar photon number or an array of them.
    """
    eta = _eta(eta)
    counts = np.asarray(k)
    if np.any(counts < 0):
        raise DomainError("photon numbers must be non-negative")
    survivors = rng.binomial(counts, eta)
    if counts.ndim == 0:
        return bool(survivors > 0)
    return survivors > 0
