# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

import pytest

from src.core.leader import LeaderMap
from src.harness.config import ScenarioConfig
from src.simnet import run as simulate


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ('VIEWSYNC_LOG_LEVEL', 'VIEWSYNC_DEFAULT_SEED', 'VIEWSYNC_WORKERS', 'VIEWSYNC_PAGE_SIZE'):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def rotation4():
    return LeaderMap.round_robin(4)


@pytest.fixture
def make_config():
    def factory(**settings):
        return ScenarioConfig(**settings).validate()
    return factory


@pytest.fixture
def run_trace(make_config):
    def factory(**settings):
        return simulate(make_config(**settings))
    return factory
