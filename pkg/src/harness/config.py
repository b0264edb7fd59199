# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

import logging
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Mapping, Optional

from dotenv import dotenv_values

from src.core.errors import ConfigError
from src.simnet.adversary import parse_adversary
from src.utility.helpers import env_int, parse_bool, parse_int, parse_time, parse_values

logger = logging.getLogger('config')

SYNCHRONIZERS = ('doubling', 'broadcast', 'cogsworth')
LEADER_MAPS = ('roundrobin', 'random')
DELAY_MODES = ('worst', 'uniform')


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Everything that determines a simulated run. Times are exact Fractions
    in delta units.

    Attributes:
        synchronizer (str): doubling, broadcast or cogsworth.
        n (int): Number of nodes.
        f (int): Fault threshold; n >= 3f+1.
        delta (Fraction): Post-GST delivery bound.
        gst (Fraction): Global stabilization time.
        wish_interval (Fraction): Spacing of wishToAdvance calls; None picks
            the synchronizer's default.
        beta (Fraction): First view duration of the doubling synchronizer.
        c (Fraction): Required synchronization length.
        horizon (Fraction): Simulated time span.
        seed (int): Seed for the leader map and random delays.
        leader_map (str): roundrobin or random.
        adversary (str): Adversary specification, e.g. crash:leader@0.
        delay_mode (str): worst or uniform.
        start_times (tuple): Per node start times, None for all at 0.
        start_views (tuple): Per node start views (doubling only).
        enforce_wish_floor (bool): Apply the wish interval bounds.
    """
    synchronizer: str = 'cogsworth'
    n: int = 4
    f: int = 1
    delta: Fraction = Fraction(1)
    gst: Fraction = Fraction(0)
    wish_interval: Optional[Fraction] = None
    beta: Fraction = Fraction(10)
    c: Fraction = Fraction(0)
    horizon: Fraction = Fraction(200)
    seed: int = 0
    leader_map: str = 'roundrobin'
    adversary: str = 'none'
    delay_mode: str = 'worst'
    start_times: Optional[tuple] = None
    start_views: Optional[tuple] = None
    enforce_wish_floor: bool = True

    def __post_init__(self):
        for name in ('delta', 'gst', 'beta', 'c', 'horizon'):
            object.__setattr__(self, name, parse_time(getattr(self, name), name))
        if self.wish_interval is not None:
            object.__setattr__(self, 'wish_interval', parse_time(self.wish_interval, 'wish_interval'))
        if self.start_times is not None:
            object.__setattr__(self, 'start_times', tuple(parse_time(t, 'start_times') for t in self.start_times))
        if self.start_views is not None:
            object.__setattr__(self, 'start_views', tuple(parse_int(v, 'start_views') for v in self.start_views))

    @property
    def effective_wish_interval(self) -> Fraction:
        if self.wish_interval is not None:
            return self.wish_interval
        if self.synchronizer == 'doubling':
            return self.beta
        floor = self.wish_floor()
        return floor + self.delta

    def wish_floor(self) -> Fraction:
        """Smallest wish interval the synchronizer accepts (2δ+c broadcast, 4δ+c cogsworth)."""
        rounds = 4 if self.synchronizer == 'cogsworth' else 2
        return rounds * self.delta + self.c

    def validate(self) -> ScenarioConfig:
        """
        Checks every constraint, raising on the first one that fails.

        Returns:
            ScenarioConfig: self, for chaining.

        Raises:
            ConfigError: Naming the violated constraint.
        """
        if self.synchronizer not in SYNCHRONIZERS:
            raise ConfigError(f"unknown synchronizer '{self.synchronizer}', expected one of {', '.join(SYNCHRONIZERS)}")
        if self.n < 1:
            raise ConfigError(f"n must be at least 1, got {self.n}")
        if self.f < 0:
            raise ConfigError(f"f must be non-negative, got {self.f}")
        if self.n < 3 * self.f + 1:
            raise ConfigError(f"n={self.n} violates n >= 3f+1 = {3 * self.f + 1}")
        if self.delta <= 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if self.gst < 0:
            raise ConfigError(f"gst must be non-negative, got {self.gst}")
        if self.horizon <= self.gst:
            raise ConfigError(f"horizon {self.horizon} must exceed gst {self.gst}")
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.c < 0:
            raise ConfigError(f"c must be non-negative, got {self.c}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.leader_map not in LEADER_MAPS:
            raise ConfigError(f"unknown leader map '{self.leader_map}', expected one of {', '.join(LEADER_MAPS)}")
        if self.delay_mode not in DELAY_MODES:
            raise ConfigError(f"unknown delay mode '{self.delay_mode}', expected one of {', '.join(DELAY_MODES)}")
        self._validate_wish_interval()
        self._validate_starts()
        parse_adversary(self.adversary, self.n).validate(self.n, self.f, self.synchronizer)
        return self

    def _validate_wish_interval(self):
        interval = self.effective_wish_interval
        if interval <= 0:
            raise ConfigError(f"wish interval must be positive, got {interval}")
        if not self.enforce_wish_floor:
            return
        if self.synchronizer == 'doubling':
            if interval > self.beta:
                raise ConfigError(f"doubling needs 0 < wish interval <= beta={self.beta}, got {interval}")
        elif interval < self.wish_floor():
            raise ConfigError(f"{self.synchronizer} needs wish interval >= {self.wish_floor()} "
                              f"(delta={self.delta}, c={self.c}), got {interval}")

    def _validate_starts(self):
        if self.start_times is not None:
            if len(self.start_times) != self.n:
                raise ConfigError(f"start_times lists {len(self.start_times)} values for n={self.n}")
            for start in self.start_times:
                if start < 0:
                    raise ConfigError(f"start time {start} is negative")
                if start > self.gst:
                    raise ConfigError(f"start time {start} is after gst {self.gst}")
        if self.start_views is not None:
            if self.synchronizer != 'doubling':
                raise ConfigError("start_views only apply to the doubling synchronizer")
            if len(self.start_views) != self.n:
                raise ConfigError(f"start_views lists {len(self.start_views)} values for n={self.n}")
            if any(view < 0 for view in self.start_views):
                raise ConfigError("start views must be non-negative")

    def with_changes(self, **changes) -> ScenarioConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        """Plain, ordered representation with Fractions as strings."""
        result = {}
        for item in fields(self):
            value = getattr(self, item.name)
            if isinstance(value, Fraction):
                value = str(value)
            elif isinstance(value, tuple):
                value = [str(v) for v in value]
            result[item.name] = value
        return result

    @classmethod
    def from_dict(cls, data: Mapping) -> ScenarioConfig:
        return cls(**{key: tuple(value) if isinstance(value, list) else value for key, value in data.items()})


def _list_of(parser):
    return lambda text, field: tuple(parser(item, field) for item in parse_values(text))


FIELD_PARSERS = {
    'synchronizer': lambda text, field: str(text).strip(),
    'n': parse_int,
    'f': parse_int,
    'delta': parse_time,
    'gst': parse_time,
    'wish_interval': parse_time,
    'beta': parse_time,
    'c': parse_time,
    'horizon': parse_time,
    'seed': parse_int,
    'leader_map': lambda text, field: str(text).strip(),
    'adversary': lambda text, field: str(text).strip(),
    'delay_mode': lambda text, field: str(text).strip(),
    'start_times': _list_of(parse_time),
    'start_views': _list_of(parse_int),
    'enforce_wish_floor': parse_bool,
}


def parse_settings(values: Mapping) -> dict:
    """
    Converts textual settings (config file lines, CLI strings) into typed
    ScenarioConfig fields. Keys are case-insensitive; dashes count as underscores.

    Raises:
        ConfigError: On unknown keys or unparseable values.
    """
    parsed = {}
    for key, raw in values.items():
        name = key.strip().lower().replace('-', '_')
        if name not in FIELD_PARSERS:
            raise ConfigError(f"unknown scenario setting '{key}'")
        if raw is None or (isinstance(raw, str) and not raw.strip()):
            continue
        parsed[name] = FIELD_PARSERS[name](raw, name) if isinstance(raw, str) else raw
    return parsed


def load_config_file(path) -> dict:
    """
    Reads a flat KEY=value scenario file.

    Raises:
        ConfigError: If the file is missing or holds unknown keys.
    """
    try:
        with open(path, encoding='utf-8') as handle:
            values = dotenv_values(stream=handle)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}")
    logger.info(f"Loaded {len(values)} settings from {path}")
    return parse_settings(values)


def resolve_config(preset=None, config_path=None, overrides: Optional[Mapping] = None) -> ScenarioConfig:
    """
    Builds a validated configuration. Later sources win: built-in defaults,
    environment (VIEWSYNC_DEFAULT_SEED), preset, config file, then explicit
    overrides such as command line flags.

    Args:
        preset: A Preset whose settings apply over the defaults.
        config_path (str): Optional scenario file.
        overrides (dict): Typed or textual field values.

    Returns:
        ScenarioConfig: The validated configuration.
    """
    settings = {'seed': env_int('VIEWSYNC_DEFAULT_SEED', 0)}
    if preset is not None:
        settings.update(preset.settings)
    if config_path:
        settings.update(load_config_file(config_path))
    if overrides:
        settings.update(parse_settings({k: v for k, v in overrides.items() if v is not None}))
    try:
        config = ScenarioConfig(**settings)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid scenario: {e}")
    return config.validate()
