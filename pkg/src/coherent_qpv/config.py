"""
Run Configuration Reader

Reads the flat, sectioned ``key = value`` documents that drive the ``qpv``
commands and turns them into a fully validated RunConfig.

Example::

    [protocol]
    rounds = 10000000
    mu = 0.52

    [channel]
    eta = 0.70
    p_e = 0.003
"""

import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .boolean_function import Backend
from .exceptions import ConfigError, QPVError
from .photon_stats import ChannelModel
from .planner import DEFAULT_INTERVAL, ProtocolParams
from .protocol import AdversaryStrategy, Role
from .security_bounds import DEFAULT_COEFFICIENTS, ScoreCoefficients, SecurityParams
from .spacetime import Coordinate, LatencyBudget, TimingRecord, VerifierGeometry

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("obj", "table")
ROLES = (
    "honest",
    "vacuum-responder",
    "intercept-resend",
    "composite",
    "composite-optimal",
)

# Every accepted key per section; None marks a key without a default
SCHEMA: Dict[str, Dict[str, Any]] = {
    "protocol": {"rounds": None, "mu": None, "input_bits": 40, "rep_rate": 2e6},
    "coefficients": {
        "gamma_c": DEFAULT_COEFFICIENTS.gamma_c,
        "gamma_perp": DEFAULT_COEFFICIENTS.gamma_perp,
        "gamma_i": DEFAULT_COEFFICIENTS.gamma_i,
    },
    "channel": {"eta": None, "eta_mu": None, "p_e": None, "measured_qber": None},
    "security": {"epsilon": 1e-10, "xi": 0.001},
    "adversary": {"strategy": "honest", "responses": 0, "det_eff": 1.0},
    "geometry": {"v1": None, "v2": None, "claimed": None},
    "timing": {"t1_send": None, "t1_recv": None, "t2_send": None, "t2_recv": None},
    "latency": {name: 0.0 for name in LatencyBudget().components()},
    "run": {
        "seeds": None,
        "backend": Backend.KEYED.value,
        "function_seed": 0,
        "expected": False,
        "mu_min": DEFAULT_INTERVAL[0],
        "mu_max": DEFAULT_INTERVAL[1],
        "tolerance": 1e-4,
        "format": "obj",
        "out": None,
    },
}

Entry = Tuple[Any, int]
RawConfig = Dict[str, Dict[str, Entry]]


@dataclass(frozen=True)
class RunOptions:
    """Options of the ``[run]`` section."""

    seeds: Tuple[int, ...] = ()
    backend: Backend = Backend.KEYED
    function_seed: int = 0
    expected: bool = False
    interval: Tuple[float, float] = DEFAULT_INTERVAL
    tolerance: float = 1e-4
    format: str = "obj"
    out: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seeds": list(self.seeds),
            "backend": self.backend.value,
            "function_seed": self.function_seed,
            "expected": self.expected,
            "mu_min": self.interval[0],
            "mu_max": self.interval[1],
            "tolerance": self.tolerance,
            "format": self.format,
            "out": self.out,
        }


@dataclass(frozen=True)
class RunConfig:
    """
    Validated inputs of one ``qpv`` invocation.

    Sections a command does not need may be absent; ``require`` reports the
    missing section as a configuration error.
    """

    coefficients: ScoreCoefficients = DEFAULT_COEFFICIENTS
    security: SecurityParams = SecurityParams()
    params: Optional[ProtocolParams] = None
    role: Role = "honest"
    geometry: Optional[VerifierGeometry] = None
    claimed: Optional[Coordinate] = None
    timing: Optional[TimingRecord] = None
    latency: LatencyBudget = LatencyBudget()
    run: RunOptions = RunOptions()
    measured_qber: Optional[float] = None
    eta_mu: Optional[float] = None
    sections: Tuple[str, ...] = field(default=(), compare=False)

    def require(self, *sections: str) -> None:
        present = {
            "protocol": self.params is not None,
            "geometry": self.geometry is not None,
            "timing": self.timing is not None,
        }
        for section in sections:
            if not present.get(section, section in self.sections):
                raise ConfigError("section is required by this command", key=section)

    def to_dict(self) -> Dict[str, Any]:
        role = self.role.to_dict() if isinstance(self.role, AdversaryStrategy) else {
            "strategy": self.role
        }
        return {
            "protocol": self.params.to_dict() if self.params is not None else None,
            "coefficients": self.coefficients.to_dict(),
            "security": self.security.to_dict(),
            "eta_mu": self.eta_mu,
            "measured_qber": self.measured_qber,
            "adversary": role,
            "geometry": {
                "v1": list(self.geometry.v1),
                "v2": list(self.geometry.v2),
                "claimed": list(self.claimed) if self.claimed is not None else None,
            }
            if self.geometry is not None
            else None,
            "timing": {
                "t1_send": self.timing.t1_send,
                "t1_recv": self.timing.t1_recv,
                "t2_send": self.timing.t2_send,
                "t2_recv": self.timing.t2_recv,
            }
            if self.timing is not None
            else None,
            "latency": self.latency.components(),
            "run": self.run.to_dict(),
        }


class RunConfigParser:
    """
    Parses sectioned configuration documents.

    Supports:
    - ``[section]`` headers
    - ``key = value`` and ``key: value`` entries
    - ``#`` and ``;`` comments, on their own line or trailing a value
    """

    def __init__(self):
        self.section_pattern = re.compile(r"^\[\s*(\w+)\s*\]$")
        self.entry_pattern = re.compile(r"^(\w+)\s*[:=]\s*(.*)$")
        # Everything before the first # or ; that sits outside a quoted string.
        self.code_pattern = re.compile(r"""^(?:"[^"]*"|'[^']*'|["']|[^#;"'])*""")

    def parse_file(self, file_path: Union[str, Path]) -> RunConfig:
        """
        Parse a configuration file.

        Args:
            file_path: Path to the configuration document

        Returns:
            Validated RunConfig
        """
        file_path = Path(file_path)

        if not file_path.exists():
            raise ConfigError(f"configuration file not found: {file_path}")

        with open(file_path, "r", encoding="utf-8") as file:
            content = file.read()

        return self.parse_content(content)

    def parse_content(self, content: str) -> RunConfig:
        """Parse and validate a configuration document given as a string."""
        return build_config(self.read_sections(content))

    def read_sections(self, content: str) -> RawConfig:
        """Split a document into sections of values tagged with line numbers."""
        sections: RawConfig = {}
        current: Optional[str] = None

        for number, raw_line in enumerate(content.splitlines(), start=1):
            line = self._strip_comment(raw_line).strip()
            if not line:
                continue

            header = self.section_pattern.match(line)
            if header:
                current = header.group(1).lower()
                if current not in SCHEMA:
                    raise ConfigError("unknown section", key=current, line=number)
                if current in sections:
                    raise ConfigError("duplicate section", key=current, line=number)
                sections[current] = {}
                continue

            entry = self.entry_pattern.match(line)
            if not entry:
                raise ConfigError(f"cannot parse {raw_line.strip()!r}", line=number)
            if current is None:
                raise ConfigError("entry outside of any section", line=number)

            key = entry.group(1).lower()
            dotted = f"{current}.{key}"
            if key not in SCHEMA[current]:
                raise ConfigError("unknown key", key=dotted, line=number)
            if key in sections[current]:
                first = sections[current][key][1]
                raise ConfigError(
                    f"duplicate key (first set on line {first})",
                    key=dotted,
                    line=number,
                )
            sections[current][key] = (self._convert_value(entry.group(2)), number)

        return sections

    def _strip_comment(self, line: str) -> str:
        return self.code_pattern.match(line).group(0).rstrip()

    def _convert_value(self, value: str) -> Any:
        """
        Convert string value to appropriate Python type.

        Attempts to convert to:
        1. Boolean (true/false, yes/no, on/off)
        2. Integer
        3. Float
        4. List (comma-separated values)
        5. String (default)
        """
        value = value.strip()

        if value.lower() in ["true", "yes", "on"]:
            return True
        elif value.lower() in ["false", "no", "off"]:
            return False

        try:
            if "." not in value and "e" not in value.lower():
                return int(value)
            else:
                return float(value)
        except ValueError:
            pass

        if "," in value:
            return [self._convert_value(item) for item in value.split(",")]

        if (value.startswith('"') and value.endswith('"')) or (
            value.startswith("'") and value.endswith("'")
        ):
            return value[1:-1]

        return value


class _Section:
    """Typed accessors over one raw section, raising ConfigError with key and line."""

    def __init__(self, name: str, entries: Dict[str, Entry]):
        self.name = name
        self.entries = entries

    def line(self, key: str) -> Optional[int]:
        return self.entries[key][1] if key in self.entries else None

    def has(self, key: str) -> bool:
        return key in self.entries

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, key=f"{self.name}.{key}", line=self.line(key))

    def raw(self, key: str, required: bool = False) -> Any:
        if key in self.entries:
            return self.entries[key][0]
        if required:
            raise self.error(key, "missing required key")
        return SCHEMA[self.name][key]

    def number(self, key: str, required: bool = False) -> Optional[float]:
        value = self.raw(key, required)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(key, f"expected a number, got {value!r}")
        return float(value)

    def integer(self, key: str, required: bool = False) -> Optional[int]:
        value = self.raw(key, required)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(key, f"expected an integer, got {value!r}")
        if int(value) != value:
            raise self.error(key, f"expected an integer, got {value!r}")
        return int(value)

    def boolean(self, key: str) -> bool:
        value = self.raw(key)
        if not isinstance(value, bool):
            raise self.error(key, f"expected true or false, got {value!r}")
        return value

    def choice(self, key: str, options: Tuple[str, ...]) -> str:
        value = self.raw(key)
        if not isinstance(value, str) or value.lower() not in options:
            raise self.error(
                key, f"expected one of {', '.join(options)}, got {value!r}"
            )
        return value.lower()

    def point(self, key: str, required: bool = False) -> Optional[Tuple[float, ...]]:
        value = self.raw(key, required)
        if value is None:
            return None
        coords = value if isinstance(value, list) else [value]
        if len(coords) not in (1, 2) or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in coords
        ):
            raise self.error(
                key, f"expected a coordinate or an 'x, y' pair, got {value!r}"
            )
        return tuple(float(x) for x in coords)

    def check(self, key: str, build):
        """Run a constructor, reporting its DomainError against ``key``."""
        try:
            return build()
        except QPVError as err:
            raise self.error(key, str(err)) from err


def _section(raw: RawConfig, name: str) -> _Section:
    return _Section(name, raw.get(name, {}))


def _channel(
    protocol: _Section, channel: _Section, mu: float
) -> Tuple[ChannelModel, Optional[float]]:
    if channel.has("eta") == channel.has("eta_mu"):
        raise channel.error("eta", "exactly one of eta and eta_mu is required")
    p_e = channel.number("p_e", required=True)

    eta_mu = None
    if channel.has("eta"):
        eta = channel.number("eta")
    else:
        eta_mu = channel.number("eta_mu")
        if mu <= 0:
            raise protocol.error("mu", "eta_mu needs mu > 0")
        eta = eta_mu / mu

    key = "eta" if eta_mu is None else "eta_mu"
    model = channel.check(key, lambda: ChannelModel(eta, 0.0))
    model = channel.check("p_e", lambda: ChannelModel(model.eta, p_e))
    return model, eta_mu


def _params(
    raw: RawConfig, security: SecurityParams
) -> Tuple[Optional[ProtocolParams], Optional[float]]:
    if "protocol" not in raw and "channel" not in raw:
        return None, None
    protocol = _section(raw, "protocol")
    channel = _section(raw, "channel")

    rounds = protocol.integer("rounds", required=True)
    if rounds < 1:
        raise protocol.error("rounds", f"must be >= 1, got {rounds}")
    mu = protocol.number("mu", required=True)
    protocol.check("mu", lambda: ProtocolParams(rounds, mu, ChannelModel(0.0, 0.0)))
    model, eta_mu = _channel(protocol, channel, mu)

    input_bits = protocol.integer("input_bits")
    rep_rate = protocol.number("rep_rate")
    if not rep_rate > 0:
        raise protocol.error("rep_rate", f"must be positive, got {rep_rate}")
    params = protocol.check(
        "input_bits",
        lambda: ProtocolParams(rounds, mu, model, security, input_bits, rep_rate),
    )
    return params, eta_mu


def _role(raw: RawConfig, coeffs: ScoreCoefficients, security: SecurityParams) -> Role:
    section = _section(raw, "adversary")
    strategy = section.choice("strategy", ROLES)
    responses = section.integer("responses")
    det_eff = section.number("det_eff")

    def build() -> Role:
        if strategy == "honest":
            return "honest"
        if strategy == "vacuum-responder":
            return AdversaryStrategy.vacuum_responder(responses)
        if strategy == "intercept-resend":
            return AdversaryStrategy.intercept_resend(det_eff)
        if strategy == "composite":
            return AdversaryStrategy.composite(det_eff=det_eff, responses=responses)
        return AdversaryStrategy.composite_optimal(coeffs, security.epsilon, det_eff)

    return section.check("strategy", build)


def _seeds(section: _Section) -> Tuple[int, ...]:
    value = section.raw("seeds")
    if value is None:
        return ()
    items = value if isinstance(value, list) else [value]
    seeds = []
    for item in items:
        valid = isinstance(item, int) and not isinstance(item, bool)
        if not valid or not 0 <= item < 1 << 64:
            raise section.error(
                "seeds", f"seeds must be 64-bit unsigned integers, got {item!r}"
            )
        seeds.append(item)
    return tuple(seeds)


def _run(raw: RawConfig) -> RunOptions:
    section = _section(raw, "run")
    mu_min = section.number("mu_min")
    mu_max = section.number("mu_max")
    if not 0 < mu_min < mu_max:
        raise section.error(
            "mu_max", f"need 0 < mu_min < mu_max, got [{mu_min}, {mu_max}]"
        )
    tolerance = section.number("tolerance")
    if not tolerance > 0:
        raise section.error("tolerance", f"must be positive, got {tolerance}")
    function_seed = section.integer("function_seed")
    if not 0 <= function_seed < 1 << 64:
        raise section.error("function_seed", "must be a 64-bit unsigned integer")
    out = section.raw("out")
    return RunOptions(
        seeds=_seeds(section),
        backend=Backend(section.choice("backend", tuple(b.value for b in Backend))),
        function_seed=function_seed,
        expected=section.boolean("expected"),
        interval=(mu_min, mu_max),
        tolerance=tolerance,
        format=section.choice("format", OUTPUT_FORMATS),
        out=str(out) if out is not None else None,
    )


def build_config(raw: RawConfig) -> RunConfig:
    """Validate raw sections and apply documented defaults."""
    coefficients = _section(raw, "coefficients")
    coeffs = coefficients.check(
        "gamma_c",
        lambda: ScoreCoefficients(
            coefficients.number("gamma_c"),
            coefficients.number("gamma_perp"),
            coefficients.number("gamma_i"),
        ),
    )
    security_section = _section(raw, "security")
    security = security_section.check(
        "epsilon",
        lambda: SecurityParams(
            security_section.number("epsilon"), security_section.number("xi")
        ),
    )
    params, eta_mu = _params(raw, security)

    measured_qber = _section(raw, "channel").number("measured_qber")

    geometry = claimed = None
    if "geometry" in raw:
        section = _section(raw, "geometry")
        v1 = section.point("v1", required=True)
        v2 = section.point("v2", required=True)
        geometry = section.check("v2", lambda: VerifierGeometry(v1, v2))
        claimed = section.point("claimed")
        if claimed is not None and len(claimed) != geometry.dimension:
            raise section.error(
                "claimed", "claimed position must match verifier dimension"
            )

    timing = None
    if "timing" in raw:
        section = _section(raw, "timing")
        values = [section.integer(key, required=True) for key in SCHEMA["timing"]]
        timing = section.check("t1_recv", lambda: TimingRecord(*values))

    latency_section = _section(raw, "latency")
    latency = latency_section.check(
        "boolean_function",
        lambda: LatencyBudget(
            **{key: latency_section.number(key) for key in SCHEMA["latency"]}
        ),
    )

    config = RunConfig(
        coefficients=coeffs,
        security=security,
        params=params,
        role=_role(raw, coeffs, security),
        geometry=geometry,
        claimed=claimed,
        timing=timing,
        latency=latency,
        run=_run(raw),
        measured_qber=measured_qber,
        eta_mu=eta_mu,
        sections=tuple(sorted(raw)),
    )
    logger.debug("resolved configuration sections: %s", ", ".join(config.sections))
    return config


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    return RunConfigParser().parse_content(text)


def main(argv: Optional[List[str]] = None) -> int:
    """Validate configuration files and print each resolved configuration."""
    parser = argparse.ArgumentParser(
        prog="qpv-check-config", description="Validate qpv run configurations"
    )
    parser.add_argument("configs", nargs="+", help="Configuration files to check")
    args = parser.parse_args(argv)

    status = 0
    for path in args.configs:
        try:
            config = RunConfigParser().parse_file(path)
        except ConfigError as err:
            print(f"❌ {path}: {err}", file=sys.stderr)
            status = 2
            continue
        resolved = {"config": path, "resolved": config.to_dict()}
        print(json.dumps(resolved, indent=2, sort_keys=True))
    return status


if __name__ == "__main__":
    sys.exit(main())
