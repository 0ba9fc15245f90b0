#!/usr/bin/env python3
"""
Demo of the Coherent QPV Lab

Walks through the reference operating point:
- Finite-size threshold and its per-class terms
- Intensity optimization and resource accounting
- Honest and adversarial sessions
- Channel fitting from a measured tally
- Position region and latency budget
"""

import json
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from coherent_qpv import (  # noqa: E402
    DEFAULT_COEFFICIENTS,
    AdversaryStrategy,
    ChannelModel,
    ProtocolParams,
    RoundTally,
    TimingRecord,
    VerifierGeometry,
    attack_resource_rate,
    honest_expected_score,
    latency_budget,
    optimize_mu,
    range_from_excess,
    run_session,
    threshold,
)
from coherent_qpv.planner import fit_channel_from_tally  # noqa: E402
from coherent_qpv.spacetime import MEASURED_LATENCY, locate  # noqa: E402

PARAMS = ProtocolParams(rounds=10_000_000, mu=0.52, channel=ChannelModel(0.70, 0.003))


def print_banner(title: str, width: int = 70, char: str = "="):
    """Print a formatted banner."""
    print(char * width)
    print(f"{title:^{width}}")
    print(char * width)


def print_section(title: str, width: int = 50, char: str = "-"):
    """Print a section separator."""
    print(f"\n{char * width}")
    print(f"{title}")
    print(f"{char * width}")


def demonstrate_threshold():
    print_section("1. Finite-size threshold")
    report = threshold(PARAMS.rounds, PARAMS.mu, DEFAULT_COEFFICIENTS, PARAMS.security)
    print(json.dumps(report.to_dict(), indent=2))
    honest = honest_expected_score(PARAMS, DEFAULT_COEFFICIENTS)
    print(f"\n📈 Honest expectation {honest:,.1f} vs threshold {report.gamma0:,.1f}")


def demonstrate_optimization():
    print_section("2. Intensity optimization")
    plan = optimize_mu(PARAMS, DEFAULT_COEFFICIENTS)
    print(f"   mu*     = {plan.mu_star:.4f}")
    print(f"   margin  = {plan.margin:,.1f}")
    print(f"   feasible: {plan.feasible}")
    pairs = attack_resource_rate(PARAMS.input_bits, PARAMS.rep_rate)
    print(f"   attacker needs {pairs:.3g} entangled pairs per second")

    short = optimize_mu(replace(PARAMS, rounds=1_000_000), DEFAULT_COEFFICIENTS)
    print(f"   N = 1e6 feasible: {short.feasible} (margin {short.margin:,.1f})")


def demonstrate_sessions():
    print_section("3. Sessions")
    attack = AdversaryStrategy.composite_optimal(DEFAULT_COEFFICIENTS, 1e-10)
    for role in ("honest", attack):
        record = run_session(PARAMS, DEFAULT_COEFFICIENTS, role, seed=1)
        status = "✅ accepted" if record.passed else "❌ rejected"
        print(f"   {record.role:<12} score {record.score:>14,.3f}  {status}")


def demonstrate_channel_fit():
    print_section("4. Channel fit from a measured tally")
    fit = fit_channel_from_tally(RoundTally(3_020_530, 9_090, 6_970_380), PARAMS.mu)
    print(f"   eta*mu = {fit.eta_mu:.6f}  eta = {fit.eta:.4f}  p_e = {fit.p_e:.7f}")


def demonstrate_localization():
    print_section("5. Position region and latency budget")
    timing = TimingRecord(0, 6_919_082, 0, 6_919_082)
    region = locate(VerifierGeometry(0.0, 2000.0), timing)
    print(f"   region {region.bounds} m, diameter {region.diameter:.2f} m")

    total, breakdown = latency_budget(MEASURED_LATENCY)
    for name, value in breakdown:
        print(f"   {name:<20} {value:>7.2f} ns")
    print(f"   total {total:.2f} ns -> {range_from_excess(total):.2f} m")


def main():
    print_banner("COHERENT QPV LAB DEMO")
    demonstrate_threshold()
    demonstrate_optimization()
    demonstrate_sessions()
    demonstrate_channel_fit()
    demonstrate_localization()
    print("\n🎉 Demo complete")


if __name__ == "__main__":
    main()
