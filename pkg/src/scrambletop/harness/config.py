"""Line-oriented ``key = value`` configuration with pi-literal numbers.

Accepted number forms: ``1.5``, ``3e-2``, ``pi``, ``0.6pi``, ``pi/40``,
``2pi/3``, ``41/2``, with an optional leading sign.  Lists are comma
separated; angle pairs are written ``theta:phi``.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields

import numpy as np

SCENARIO_NAMES = (
    "fig2-divergence",
    "fig3a-lyapunov-map",
    "fig3b-pr-map",
    "fig4-otoc-map",
    "fig5-spin-compare",
    "fig5b-trajectories",
    "fig6-epsilon-sweep",
    "validate",
)

_FLOAT = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_NUMBER_RE = re.compile(
    rf"^\s*(?P<sign>[+-])?\s*(?P<coef>{_FLOAT})?\s*(?P<pi>pi)?\s*(?:/\s*(?P<div>{_FLOAT}))?\s*$"
)


class ConfigError(ValueError):
    """Malformed configuration; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def parse_number(text: str, line: int | None = None) -> float:
    m = _NUMBER_RE.match(text)
    if not m or (m.group("coef") is None and m.group("pi") is None):
        raise ConfigError(f"cannot parse number {text!r}", line)
    value = float(m.group("coef")) if m.group("coef") else 1.0
    if m.group("pi"):
        value *= np.pi
    if m.group("div"):
        divisor = float(m.group("div"))
        if divisor == 0:
            raise ConfigError(f"division by zero in {text!r}", line)
        value /= divisor
    if m.group("sign") == "-":
        value = -value
    return value


def _parse_int(text: str, line: int) -> int:
    value = parse_number(text, line)
    if abs(value - round(value)) > 1e-9:
        raise ConfigError(f"expected an integer, got {text!r}", line)
    return int(round(value))


def _parse_list(text: str, line: int) -> list[float]:
    items = [s for s in (part.strip() for part in text.split(",")) if s]
    if not items:
        raise ConfigError("empty list", line)
    return [parse_number(s, line) for s in items]


def _parse_pairs(text: str, line: int) -> list[tuple[float, float]]:
    pairs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ConfigError(f"expected theta:phi pair, got {part!r}", line)
        a, b = part.split(":", 1)
        pairs.append((parse_number(a.strip(), line), parse_number(b.strip(), line)))
    if not pairs:
        raise ConfigError("empty pair list", line)
    return pairs


@dataclass
class ScenarioConfig:
    """Scenario selection plus every tunable with its default value."""

    scenario: str = "validate"
    alpha: float = 1.0
    beta: float = 1.5
    gamma: float = 0.05
    omega: float = 1.5
    spin: float = 41 / 2
    epsilon: float = np.pi / 40
    epsilons: list[float] = field(
        default_factory=lambda: [np.pi / 400, np.pi / 40, np.pi / 10, np.pi / 8, np.pi / 6, np.pi / 4]
    )
    spins: list[float] = field(default_factory=lambda: [7 / 2, 21 / 2, 41 / 2])
    seeds: list[tuple[float, float]] = field(default_factory=list)
    snapshot_times: list[float] = field(default_factory=lambda: [1.0, 2.0, 5.0, 10.0, 50.0])
    times: list[float] = field(default_factory=list)  # explicit trajectory grid
    t_max: float = 100.0                  # averaging horizon, periods
    n_theta: int = 50
    n_phi: int = 100
    lyapunov_periods: int = 200           # map duration; single seeds use 1000
    n_dirs: int = 360
    steps_per_period: int = 3000
    divergence_periods: int = 100
    delta0: float = 1e-8
    segments: int = 2000
    shots: int | None = None
    rng_seed: int = 0
    threads: int = 0                      # 0 = resolve from env, else 1
    output_dir: str = "out"

    def validate(self) -> None:
        if self.scenario not in SCENARIO_NAMES:
            raise ConfigError(
                f"unknown scenario {self.scenario!r}; valid: {', '.join(SCENARIO_NAMES)}"
            )
        if self.n_theta < 2 or self.n_phi < 2:
            raise ConfigError("grid resolution must be at least 2 x 2")
        if self.omega <= 0:
            raise ConfigError("omega must be positive")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be a positive count")
        if self.t_max <= 0 or self.lyapunov_periods < 1 or self.divergence_periods < 1:
            raise ConfigError("durations must be positive")
        if 2 * self.spin != round(2 * self.spin) or self.spin <= 0:
            raise ConfigError(f"spin must be a positive half-integer, got {self.spin}")


_INT_KEYS = {
    "n_theta",
    "n_phi",
    "lyapunov_periods",
    "n_dirs",
    "steps_per_period",
    "divergence_periods",
    "segments",
    "shots",
    "rng_seed",
    "threads",
}
_FLOAT_KEYS = {"alpha", "beta", "gamma", "omega", "spin", "epsilon", "t_max", "delta0"}
_LIST_KEYS = {"epsilons", "spins", "snapshot_times", "times"}
_PAIR_KEYS = {"seeds"}
_STR_KEYS = {"scenario", "output_dir"}


def parse_config(text: str) -> ScenarioConfig:
    """Parse configuration text; raises ConfigError with the line number."""
    cfg = ScenarioConfig()
    known = {f.name for f in fields(ScenarioConfig)}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", line_no)
        if not value:
            raise ConfigError(f"missing value for {key!r}", line_no)
        if key in _STR_KEYS:
            if key == "scenario" and value not in SCENARIO_NAMES:
                raise ConfigError(
                    f"unknown scenario {value!r}; valid: {', '.join(SCENARIO_NAMES)}", line_no
                )
            setattr(cfg, key, value)
        elif key in _INT_KEYS:
            setattr(cfg, key, _parse_int(value, line_no))
        elif key in _FLOAT_KEYS:
            setattr(cfg, key, parse_number(value, line_no))
        elif key in _LIST_KEYS:
            setattr(cfg, key, _parse_list(value, line_no))
        elif key in _PAIR_KEYS:
            setattr(cfg, key, _parse_pairs(value, line_no))
    try:
        cfg.validate()
    except ConfigError:
        raise
    return cfg


def config_echo(cfg: ScenarioConfig) -> list[str]:
    """Canonical ``key = value`` lines echoing the effective configuration."""
    lines = []
    for f in fields(ScenarioConfig):
        value = getattr(cfg, f.name)
        if f.name in _PAIR_KEYS:
            rendered = ", ".join(f"{a!r}:{b!r}" for a, b in value)
        elif f.name in _LIST_KEYS:
            rendered = ", ".join(repr(v) for v in value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return lines
