#!/usr/bin/env python3
"""
Test the Boolean function backends

Explicit tables are checked against an independent regeneration of the seeded
byte stream; the keyed backend is checked for determinism and balance.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the src directory to sys.path to import the module
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from coherent_qpv import CapacityError, DomainError  # noqa: E402
from coherent_qpv.boolean_function import (  # noqa: E402
    Backend,
    boolean_fn_create,
    boolean_fn_eval,
    table_capacity_bits,
)


def test_constant_function():
    """The constant backend maps everything to 0."""
    f = boolean_fn_create(2, 0, Backend.CONSTANT)
    for s in range(4):
        assert boolean_fn_eval(f, s) == 0
    assert f.ones_fraction() == 0.0

    print("✅ Constant function test passed")


def test_keyed_backend_scales_to_wide_inputs():
    """n = 40 keyed needs no table."""
    f = boolean_fn_create(40, 7, "keyed")
    assert f.table is None
    assert boolean_fn_eval(f, (1 << 40) - 1) in (0, 1)
    assert table_capacity_bits(40) == 1 << 40

    with pytest.raises(CapacityError):
        f.ones_fraction()

    print("✅ Keyed backend capacity test passed")


def test_explicit_capacity_limit():
    """Explicit tables above 30 bits are refused with a pointer to keyed."""
    with pytest.raises(CapacityError, match="keyed"):
        boolean_fn_create(32, 1, Backend.EXPLICIT)

    print("✅ Explicit capacity test passed")


def test_creation_validation():
    """Odd, too small or too wide inputs and bad seeds are rejected."""
    for n in (0, 3, 66):
        with pytest.raises(DomainError):
            boolean_fn_create(n, 1)
    with pytest.raises(DomainError):
        boolean_fn_create(8, -1)
    with pytest.raises(DomainError):
        boolean_fn_create(8, 1 << 64)
    with pytest.raises(ValueError):
        boolean_fn_create(8, 1, "quantum")

    print("✅ Creation validation test passed")


def test_explicit_table_is_balanced():
    """A 20-bit random table holds close to half ones."""
    f = boolean_fn_create(20, 42, Backend.EXPLICIT)
    tolerance = 5 * 2**-10 * 0.5
    assert abs(f.ones_fraction() - 0.5) <= tolerance

    print("✅ Explicit table balance test passed")


def test_explicit_matches_regenerated_table():
    """Evaluation agrees with a table rebuilt from the same seeded stream."""
    n, seed = 16, 1
    f = boolean_fn_create(n, seed, Backend.EXPLICIT)
    stream = np.random.default_rng(seed).bytes(2**n // 8)
    bits = np.unpackbits(np.frombuffer(stream, dtype=np.uint8), bitorder="little")

    samples = np.random.default_rng(5).integers(0, 2**n, size=1000)
    for s in samples:
        assert boolean_fn_eval(f, int(s)) == bits[s]
    assert np.array_equal(f.evaluate(samples.astype(np.uint64)), bits[samples])

    print("✅ Regeneration oracle test passed")


def test_keyed_is_deterministic_and_balanced():
    """Same seed gives the same function; outputs are close to balanced."""
    rng = np.random.default_rng(9)
    inputs = rng.integers(0, 1 << 40, size=100_000, dtype=np.uint64)
    first = boolean_fn_create(40, 3).evaluate(inputs)
    again = boolean_fn_create(40, 3).evaluate(inputs)
    other = boolean_fn_create(40, 4).evaluate(inputs)

    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)
    sigma = 0.5 / np.sqrt(len(inputs))
    assert abs(first.mean() - 0.5) <= 5 * sigma

    print("✅ Keyed determinism test passed")


def test_input_forms_agree():
    """Integers, bit strings and bit sequences address the same entry."""
    f = boolean_fn_create(8, 11, Backend.EXPLICIT)
    for s in (0, 5, 200, 255):
        text = format(s, "08b")
        bits = [int(c) for c in text]
        expected = boolean_fn_eval(f, s)
        assert boolean_fn_eval(f, text) == boolean_fn_eval(f, bits) == expected

    print("✅ Input forms test passed")


def test_wrong_input_width():
    """Inputs of the wrong width raise a domain error."""
    f = boolean_fn_create(4, 1, Backend.EXPLICIT)
    for bad in ("101", "10102", [1, 0, 1], 16, -1):
        with pytest.raises(DomainError):
            boolean_fn_eval(f, bad)

    print("✅ Input width test passed")


if __name__ == "__main__":
    print("🧪 Testing Boolean functions...")
    print("=" * 50)

    test_constant_function()
    test_keyed_backend_scales_to_wide_inputs()
    test_explicit_capacity_limit()
    test_creation_validation()
    test_explicit_table_is_balanced()
    test_explicit_matches_regenerated_table()
    test_keyed_is_deterministic_and_balanced()
    test_input_forms_agree()
    test_wrong_input_width()

    print("=" * 50)
    print("🎉 All Boolean function tests passed!")
