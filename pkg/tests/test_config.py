#!/usr/bin/env python3
"""
Test the run configuration reader

Tests section/key parsing, value conversion, documented defaults and the
errors raised for malformed or out-of-range entries.
"""

import json
import sys
from pathlib import Path

import pytest

# Add the src directory to sys.path to import the module
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from coherent_qpv import ConfigError  # noqa: E402
from coherent_qpv.boolean_function import Backend  # noqa: E402
from coherent_qpv.config import RunConfigParser, main, parse_config  # noqa: E402
from coherent_qpv.protocol import AdversaryStrategy, Variant  # noqa: E402

MINIMAL = """
[protocol]
rounds = 1e7
mu = 0.52

[channel]
eta = 0.70
p_e = 0.003
"""


def _expect_error(text, key=None, line=None):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    if key is not None:
        assert info.value.key == key
    if line is not None:
        assert info.value.line == line
    return info.value


def test_minimal_config_gets_defaults():
    """Missing security and coefficient sections fall back to default values."""
    cfg = parse_config(MINIMAL)

    assert cfg.params.rounds == 10_000_000
    assert cfg.params.mu == 0.52
    assert cfg.params.channel.eta == 0.70
    assert cfg.security.epsilon == 1e-10
    assert cfg.security.xi == 0.001
    assert (
        cfg.coefficients.gamma_c,
        cfg.coefficients.gamma_perp,
        cfg.coefficients.gamma_i,
    ) == (0.04275, 0.05019, 1.0)
    assert cfg.params.input_bits == 40
    assert cfg.role == "honest"
    assert cfg.run.backend is Backend.KEYED
    assert cfg.run.format == "obj"
    assert cfg.geometry is None

    print("✅ Minimal config test passed")


def test_value_conversion():
    """Comments, colons, lists and booleans are understood."""
    cfg = parse_config(
        MINIMAL
        + """
[run]
seeds: 1, 2, 3   # five for a full run
expected = yes
backend = explicit
format = table
out = "results/out.csv"

[geometry]
v1 = 0, 0
v2 = 2000, 0
claimed = 1000, 0
"""
    )
    assert cfg.run.seeds == (1, 2, 3)
    assert cfg.run.expected is True
    assert cfg.run.backend is Backend.EXPLICIT
    assert cfg.run.format == "table"
    assert cfg.run.out == "results/out.csv"
    assert cfg.geometry.v2 == (2000.0, 0.0)
    assert cfg.claimed == (1000.0, 0.0)

    print("✅ Value conversion test passed")


def test_trailing_comment_after_quoted_value():
    """A comment after a quoted value is dropped; quoted # and ; survive."""
    cfg = parse_config(
        MINIMAL
        + """
[run]
out = "r.json"  # report
format = "table"  ; tabular
"""
    )
    assert cfg.run.out == "r.json"
    assert cfg.run.format == "table"

    cfg = parse_config(MINIMAL + '\n[run]\nout = "runs/#3;a.json"   # third\n')
    assert cfg.run.out == "runs/#3;a.json"

    print("✅ Quoted value comment test passed")


def test_eta_mu_channel():
    """eta_mu stands in for eta as the fitted effective product."""
    cfg = parse_config(MINIMAL.replace("eta = 0.70", "eta_mu = 0.36096"))
    assert cfg.params.channel.eta == pytest.approx(0.36096 / 0.52)
    assert cfg.eta_mu == 0.36096

    _expect_error(
        MINIMAL.replace("eta = 0.70", "eta = 0.7\neta_mu = 0.36"), key="channel.eta"
    )
    _expect_error(MINIMAL.replace("eta = 0.70", ""), key="channel.eta")
    _expect_error(MINIMAL.replace("eta = 0.70", "eta_mu = 0.9"), key="channel.eta_mu")

    print("✅ eta_mu channel test passed")


def test_constraint_violations():
    """Out-of-range values name their key."""
    _expect_error(
        MINIMAL.replace("p_e = 0.003", "p_e = 0.7"), key="channel.p_e", line=8
    )
    _expect_error(MINIMAL.replace("rounds = 1e7", "rounds = 0"), key="protocol.rounds")
    _expect_error(
        MINIMAL.replace("rounds = 1e7", "rounds = 10.5"), key="protocol.rounds"
    )
    _expect_error(MINIMAL.replace("mu = 0.52", "mu = -1"), key="protocol.mu")
    _expect_error(MINIMAL + "[security]\nepsilon = 2\n", key="security.epsilon")
    _expect_error(MINIMAL + "[coefficients]\ngamma_i = 3\n", key="coefficients.gamma_c")
    _expect_error(MINIMAL + "[run]\nexpected = 1\n", key="run.expected")
    _expect_error(MINIMAL + "[run]\nseeds = -4\n", key="run.seeds")
    _expect_error(MINIMAL + "[run]\nmu_min = 1.5\nmu_max = 1.0\n", key="run.mu_max")
    _expect_error(
        MINIMAL + "[adversary]\nstrategy = wizard\n", key="adversary.strategy"
    )

    print("✅ Constraint violation test passed")


def test_structural_errors():
    """Duplicates, unknown names and stray lines are reported with their line."""
    error = _expect_error(MINIMAL + "[run]\nseeds = 1\nseeds = 2\n", key="run.seeds")
    assert error.line == 11
    assert "line 10" in str(error)

    _expect_error(MINIMAL + "[protocol]\n", key="protocol")
    _expect_error(MINIMAL + "[network]\n", key="network")
    _expect_error(MINIMAL + "[run]\ncolour = blue\n", key="run.colour")
    _expect_error("rounds = 5\n", line=1)
    _expect_error(MINIMAL + "[run]\nthis is not an entry\n", line=10)
    _expect_error(MINIMAL.replace("rounds = 1e7", ""), key="protocol.rounds")

    print("✅ Structural error test passed")


def test_adversary_section():
    """Strategies are built from the adversary section."""
    cfg = parse_config(MINIMAL + "[adversary]\nstrategy = composite-optimal\n")
    assert isinstance(cfg.role, AdversaryStrategy)
    assert cfg.role.variant is Variant.COMPOSITE
    assert cfg.role.responses == 28

    section = "[adversary]\nstrategy = vacuum-responder\nresponses = 12\n"
    cfg = parse_config(MINIMAL + section)
    assert cfg.role.responses == 12

    _expect_error(
        MINIMAL + "[adversary]\nstrategy = intercept-resend\ndet_eff = 2\n",
        key="adversary.strategy",
    )

    print("✅ Adversary section test passed")


def test_geometry_and_timing_sections():
    """Geometry, timing and latency sections are validated."""
    text = """
[geometry]
v1 = 0
v2 = 2000

[timing]
t1_send = 0
t1_recv = 6919082
t2_send = 0
t2_recv = 6919082

[latency]
boolean_function = 117.3
"""
    cfg = parse_config(text)
    assert cfg.params is None
    assert cfg.timing.t1_recv == 6_919_082
    assert cfg.latency.boolean_function == 117.3
    assert cfg.latency.detector == 0.0

    cfg.require("geometry", "timing")
    with pytest.raises(ConfigError):
        cfg.require("protocol")

    _expect_error(
        text.replace("t1_recv = 6919082", "t1_recv = -5"), key="timing.t1_recv"
    )
    _expect_error(text.replace("v2 = 2000", "v2 = 0"), key="geometry.v2")
    _expect_error(text.replace("v2 = 2000", ""), key="geometry.v2")
    _expect_error(
        text.replace("v2 = 2000", "v2 = 2000\nclaimed = 1, 2"), key="geometry.claimed"
    )
    _expect_error(text.replace("= 117.3", "= -1"), key="latency.boolean_function")

    print("✅ Geometry and timing test passed")


def test_resolved_config_round_trips_to_json():
    """The resolved configuration serializes to plain JSON."""
    cfg = parse_config(MINIMAL + "[adversary]\nstrategy = composite\n")
    data = json.loads(json.dumps(cfg.to_dict(), sort_keys=True))

    assert data["protocol"]["rounds"] == 10_000_000
    assert data["security"] == {"epsilon": 1e-10, "xi": 0.001}
    assert data["adversary"]["strategy"] == "composite"
    assert data["run"]["seeds"] == []

    print("✅ Resolved config JSON test passed")


def test_parse_file_and_check_command(tmp_path, capsys):
    """Files are read from disk; the checker reports bad files with exit code 2."""
    good = tmp_path / "good.cfg"
    good.write_text(MINIMAL, encoding="utf-8")
    bad = tmp_path / "bad.cfg"
    bad.write_text(MINIMAL.replace("p_e = 0.003", "p_e = 0.7"), encoding="utf-8")

    assert RunConfigParser().parse_file(good).params.rounds == 10_000_000
    with pytest.raises(ConfigError):
        RunConfigParser().parse_file(tmp_path / "missing.cfg")

    assert main([str(good)]) == 0
    assert '"rounds": 10000000' in capsys.readouterr().out
    assert main([str(good), str(bad)]) == 2
    assert "channel.p_e" in capsys.readouterr().err

    print("✅ File parsing test passed")


def test_sample_configs_parse():
    """Every shipped sample configuration is valid."""
    samples = sorted((Path(__file__).parent.parent / "configs").glob("*.cfg"))
    assert samples

    parser = RunConfigParser()
    for path in samples:
        cfg = parser.parse_file(path)
        assert cfg.to_dict()["coefficients"]["gamma_i"] == 1.0

    print("✅ Sample configuration test passed")


if __name__ == "__main__":
    print("🧪 Testing configuration reader...")
    print("=" * 50)

    test_minimal_config_gets_defaults()
    test_value_conversion()
    test_trailing_comment_after_quoted_value()
    test_eta_mu_channel()
    test_constraint_violations()
    test_structural_errors()
    test_adversary_section()
    test_geometry_and_timing_sections()
    test_resolved_config_round_trips_to_json()
    test_sample_configs_parse()

    print("=" * 50)
    print("🎉 All configuration tests passed!")
