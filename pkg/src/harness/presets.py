# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from src.core.errors import ConfigError

SIZE_AXIS = (4, 7, 10, 13, 16)


@dataclass(frozen=True)
class Preset:
    """
    A named scenario.

    Attributes:
        name (str): Lookup key.
        description (str): One line shown by ``viewsync presets``.
        settings (dict): ScenarioConfig fields set by the preset.
        axis (str): Default sweep axis (n, t or seed).
        values (tuple): Default sweep values.
        adversary_template (str): Adversary with a ``{t}`` placeholder for t sweeps.
        expected_order (str): Growth order of communication along the
            default axis (linear or quadratic), if the preset predicts one.
    """
    name: str
    description: str
    settings: dict = field(default_factory=dict)
    axis: str = 'n'
    values: tuple = SIZE_AXIS
    adversary_template: str = ''
    expected_order: str = ''


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    n: int
    f: int
    trials: int


def _preset(name, description, **kwargs):
    return name, Preset(name, description, **kwargs)


_FAULTLESS_COGSWORTH = {'synchronizer': 'cogsworth', 'n': 4, 'f': 1, 'gst': Fraction(0),
                        'wish_interval': Fraction(4), 'c': Fraction(0)}

PRESETS = dict([
    _preset('doubling-faultless', "View doubling, all honest: zero messages, growing latency",
            settings={'synchronizer': 'doubling', 'n': 4, 'f': 1, 'beta': Fraction(1), 'horizon': Fraction(1000)}),
    _preset('broadcast-faultless', "Broadcast synchronizer, all honest: n^2 messages per view",
            settings={'synchronizer': 'broadcast', 'n': 4, 'f': 1, 'wish_interval': Fraction(3)},
            expected_order='quadratic'),
    _preset('broadcast-benign', "Broadcast synchronizer with crashed leaders",
            settings={'synchronizer': 'broadcast', 'n': 16, 'f': 5, 'wish_interval': Fraction(3),
                      'adversary': 'crash:leader@0'},
            axis='t', values=(1, 2, 3, 4, 5), adversary_template='crash:spread{t}@0'),
    _preset('cogsworth-faultless', "Cogsworth, all honest: 5n messages and 4 delta per view",
            settings=dict(_FAULTLESS_COGSWORTH), expected_order='linear'),
    _preset('cogsworth-benign', "Cogsworth with crashed leaders (t axis crashes every other leader)",
            settings={'synchronizer': 'cogsworth', 'n': 16, 'f': 5, 'adversary': 'crash:leader@0',
                      'horizon': Fraction(400)},
            axis='t', values=(1, 2, 3, 4, 5), adversary_template='crash:spread{t}@0', expected_order='linear'),
    _preset('cogsworth-byzantine', "Cogsworth with one TC-amplifying Byzantine node",
            settings={'synchronizer': 'cogsworth', 'n': 4, 'f': 1, 'adversary': 'amplify:1'},
            expected_order='quadratic'),
    _preset('cogsworth-amplify-cascade', "Cogsworth whose first t leaders amplify every TC they see",
            settings={'synchronizer': 'cogsworth', 'n': 16, 'f': 5, 'adversary': 'amplify:leader',
                      'horizon': Fraction(200)},
            axis='t', values=(1, 2, 3, 4, 5), adversary_template='amplify:leaders{t}'),
    _preset('cogsworth-withhold', "Cogsworth whose view 1 leader withholds its QCs",
            settings={'synchronizer': 'cogsworth', 'n': 4, 'f': 1, 'adversary': 'withhold:leader'},
            axis='seed', values=tuple(range(10))),
    _preset('doubling-gap', "View doubling with start views 0, 1, 2, 4: first sync in view 4",
            settings={'synchronizer': 'doubling', 'n': 4, 'f': 0, 'beta': Fraction(1), 'wish_interval': Fraction(1),
                      'c': Fraction(1), 'start_views': (0, 1, 2, 4), 'horizon': Fraction(100)},
            axis='seed', values=(0,)),
])

# Names the growth comparison table uses for its cells.
ALIASES = {
    'table1-doubling': 'doubling-faultless',
    'table1-broadcast': 'broadcast-faultless',
    'table1-broadcast-worst': 'broadcast-benign',
    'table1-cogsworth-faultless': 'cogsworth-faultless',
    'table1-cogsworth-benign': 'cogsworth-benign',
    'table1-cogsworth-byzantine': 'cogsworth-byzantine',
    'table1-cogsworth-byzantine-worst': 'cogsworth-amplify-cascade',
}

EXPERIMENTS = {
    'expected-x': Experiment('expected-x', "Mean leaders enlisted after GST under random rotations",
                             n=100, f=33, trials=10000),
}


def get_preset(name: str) -> Preset:
    """
    Looks a preset up by name or alias.

    Raises:
        ConfigError: If no preset has that name.
    """
    try:
        return PRESETS[ALIASES.get(name, name)]
    except KeyError:
        raise ConfigError(f"unknown preset '{name}', see 'viewsync presets'")


def get_experiment(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise ConfigError(f"unknown experiment '{name}', see 'viewsync presets'")


def list_presets() -> list:
    rows = [(p.name, 'scenario', p.description) for p in PRESETS.values()]
    rows.extend((alias, 'alias', f"Same as {target}") for alias, target in ALIASES.items())
    rows.extend((e.name, 'experiment', e.description) for e in EXPERIMENTS.values())
    return rows
