"""
Boolean functions f: {0,1}^n -> {0,1} that map the verifiers' concatenated
classical challenge to the measurement basis.

Three backends are provided:

- ``explicit``: a seeded random bit table of 2^n entries, packed eight bits per
  byte and addressed by the input, as a lookup-table circuit would do. Limited
  to n <= 30.
- ``keyed``: one output bit of a keyed 64-bit mixing function. It needs no
  storage and scales to n = 64, but it is a pseudorandom stand-in, not a
  uniform draw from all 2^(2^n) functions.
- ``constant``: f = 0 everywhere, for tests.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import CapacityError, DomainError

logger = logging.getLogger(__name__)

MAX_EXPLICIT_BITS = 30
MAX_INPUT_BITS = 64

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SHIFTS = (np.uint64(30), np.uint64(27), np.uint64(31))
_TOP_BIT = np.uint64(63)

InputLike = Union[int, str, Sequence[int], np.ndarray]


class Backend(enum.Enum):
    EXPLICIT = "explicit"
    KEYED = "keyed"
    CONSTANT = "constant"


def _mix64(values: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on a uint64 array (wraps modulo 2^64)."""
    z = values ^ (values >> _SHIFTS[0])
    z = z * _MIX1
    z = z ^ (z >> _SHIFTS[1])
    z = z * _MIX2
    return z ^ (z >> _SHIFTS[2])


def table_capacity_bits(n: int) -> int:
    """Storage needed by a full lookup table for an n-bit input."""
    return 1 << int(n)


@dataclass(frozen=True)
class BooleanFunction:
    """
    A deterministic Boolean function of ``n`` input bits.

    Construct with :func:`boolean_fn_create`.
    """

    n: int
    backend: Backend
    seed: int
    table: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def evaluate(self, inputs: np.ndarray) -> np.ndarray:
        """Evaluate on a uint64 array of n-bit inputs; returns uint8 bits."""
        inputs = np.asarray(inputs, dtype=np.uint64)
        if self.backend is Backend.CONSTANT:
            return np.zeros(inputs.shape, dtype=np.uint8)
        if self.backend is Backend.EXPLICIT:
            packed = self.table[inputs >> np.uint64(3)]
            offsets = (inputs & np.uint64(7)).astype(np.uint8)
            return (packed >> offsets) & np.uint8(1)
        key = _mix64(np.asarray([self.seed], dtype=np.uint64) + _GOLDEN)
        return (_mix64(inputs ^ key) >> _TOP_BIT).astype(np.uint8)

    def ones_fraction(self) -> float:
        """Fraction of inputs mapped to 1 (explicit and constant backends)."""
        if self.backend is Backend.CONSTANT:
            return 0.0
        if self.backend is Backend.KEYED:
            raise CapacityError("the keyed backend has no table to count")
        bits = np.unpackbits(self.table, bitorder="little")
        return float(bits[: table_capacity_bits(self.n)].mean())


def boolean_fn_create(
    n: int, seed: int, backend: Union[Backend, str] = Backend.KEYED
) -> BooleanFunction:
    """
    Create a Boolean function of ``n`` input bits.

    Args:
        n: Even input width, 2 <= n <= 64
        seed: 64-bit seed selecting the function
        backend: ``explicit``, ``keyed`` or ``constant``

    Raises:
        CapacityError: explicit backend requested for n > 30
    """
    backend = Backend(backend)
    if int(n) != n or n < 2 or n > MAX_INPUT_BITS or n % 2:
        raise DomainError(
            f"input width must be even and in [2, {MAX_INPUT_BITS}], got {n}"
        )
    n = int(n)
    seed = int(seed)
    if not 0 <= seed < 1 << 64:
        raise DomainError(f"seed must be a 64-bit unsigned value, got {seed}")

    table = None
    if backend is Backend.EXPLICIT:
        if n > MAX_EXPLICIT_BITS:
            raise CapacityError(
                f"an explicit table for n={n} needs 2^{n} bits; "
                f"use the keyed backend for n > {MAX_EXPLICIT_BITS}"
            )
        n_bytes = max(1, table_capacity_bits(n) // 8)
        raw = np.random.default_rng(seed).bytes(n_bytes)
        table = np.frombuffer(raw, dtype=np.uint8)
        logger.debug("filled %d-byte table for n=%d seed=%d", n_bytes, n, seed)

    return BooleanFunction(n=n, backend=backend, seed=seed, table=table)


def _as_address(f: BooleanFunction, s: InputLike) -> int:
    if isinstance(s, str):
        if len(s) != f.n or set(s) - {"0", "1"}:
            raise DomainError(f"expected a {f.n}-character bit string, got {s!r}")
        return int(s, 2)
    if isinstance(s, (int, np.integer)):
        if not 0 <= int(s) < 1 << f.n:
            raise DomainError(f"input {s} does not fit in {f.n} bits")
        return int(s)
    bits = list(s)
    if len(bits) != f.n or any(b not in (0, 1) for b in bits):
        raise DomainError(f"expected {f.n} bits, got {len(bits)}")
    address = 0
    for bit in bits:
        address = (address << 1) | int(bit)
    return address


def boolean_fn_eval(f: BooleanFunction, s: InputLike) -> int:
    """
    Evaluate ``f`` on one n-bit input.

    ``s`` may be an integer address, a string of '0'/'1' characters or a
    sequence of bits (most significant first).
    """
    address = _as_address(f, s)
    return int(f.evaluate(np.asarray([address], dtype=np.uint64))[0])
