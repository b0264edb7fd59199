# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from src.core.types import MessageKind
from src.harness.config import resolve_config
from src.harness.emit import render
from src.harness.fitting import preferred_order
from src.harness.presets import PRESETS, SIZE_AXIS, get_preset
from src.harness.runner import estimate_x, run_scenario, run_sweep
from src.metrics import (
    check_agreement_bound, check_honest_leader_bound, check_quorum_bound, detect_sync_intervals, measure_recovery,
)
from src.simnet import RecordKind
from src.sync.doubling import min_sync_view, predicted_entry_time


def _settings_grid(adversaries, seeds):
    for n, gst, (name, adversary), seed in product((4, 7, 10), (0, 20), adversaries, seeds):
        f = (n - 1) // 3
        # Escalating past f crashed leaders in a row needs a wish interval above 2f delta.
        yield dict(n=n, f=f, gst=gst, horizon=gst + 80, seed=seed, delay_mode='uniform', wish_interval=2 * f + 3,
                   leader_map='random' if seed % 2 else 'roundrobin', adversary=adversary.format(f=f))


def _assert_bound_holds(traces, check):
    checked = 0
    for settings, trace in traces:
        report = check(trace)
        assert report.passed, f"{settings}: {report.violations[0][1]}"
        checked += report.checked
    assert checked > 0


class TestCogsworthBounds:
    ADVERSARIES = [('none', 'none'), ('crash', 'crash:leaders{f}@0'), ('silent', 'silent:leader'),
                   ('withhold', 'withhold:leader'), ('amplify', 'amplify:1')]

    def test_honest_leader_views_gather_everyone_within_four_delta(self, run_trace):
        grid = list(_settings_grid(self.ADVERSARIES, range(7)))
        assert len(grid) >= 200
        _assert_bound_holds(((s, run_trace(**s)) for s in grid), check_honest_leader_bound)

    def test_withholding_leader_still_gathers_a_quorum(self, run_trace):
        grid = list(_settings_grid([('withhold', 'withhold:leader')], range(17)))
        assert len(grid) >= 100
        _assert_bound_holds(((s, run_trace(**s)) for s in grid), check_quorum_bound)


class TestBroadcastBound:
    def test_entry_spread_within_two_delta(self, run_trace):
        adversaries = [('none', 'none'), ('crash', 'crash:leaders{f}@0'), ('silent', 'silent:1')]
        grid = [dict(s, synchronizer='broadcast') for s in _settings_grid(adversaries, range(6))]
        assert len(grid) >= 100
        _assert_bound_holds(((s, run_trace(**s)) for s in grid), check_agreement_bound)


class TestCountLaws:
    @pytest.mark.parametrize("synchronizer, settings, per_sync", [
        ('doubling', {'beta': 1, 'horizon': 300}, 0),
        ('broadcast', {'wish_interval': 3}, 16),
        ('cogsworth', {'wish_interval': 4}, 20),
    ])
    def test_faultless_messages_per_synchronization(self, synchronizer, settings, per_sync):
        report = run_scenario(resolve_config(overrides=dict(settings, synchronizer=synchronizer, n=4, f=1)))
        assert report.synchronized
        assert report.communication == per_sync


class TestGrowthTrends:
    @pytest.mark.parametrize("preset, expected", [
        ('cogsworth-faultless', 'linear'),
        ('broadcast-faultless', 'quadratic'),
        ('cogsworth-byzantine', 'quadratic'),
    ])
    def test_communication_over_n(self, preset, expected):
        table = run_sweep(resolve_config(get_preset(preset)), 'n', SIZE_AXIS, workers=2)
        fits = table.fits['communication']
        assert preferred_order(fits) == expected
        assert fits[expected].r2 >= 0.98

    def test_benign_communication_over_n_is_linear(self):
        base = resolve_config(get_preset('cogsworth-benign'))
        table = run_sweep(base, 'n', SIZE_AXIS, workers=2)
        fits = table.fits['communication']
        assert preferred_order(fits) == 'linear'
        assert fits['linear'].r2 >= 0.98

    def test_amplification_grows_faster_than_n(self):
        table = run_sweep(resolve_config(get_preset('cogsworth-byzantine')), 'n', SIZE_AXIS)
        per_node = [p.report.communication / p.value for p in table.points]
        assert all(a < b for a, b in zip(per_node, per_node[1:]))

    def test_crashed_leaders_over_t(self):
        preset = get_preset('table1-cogsworth-benign')
        table = run_sweep(resolve_config(preset), 't', preset.values, workers=2,
                          adversary_template=preset.adversary_template)
        assert all(p.error is None for p in table.points)
        for metric in ('communication', 'latency'):
            fits = table.fits[metric]
            assert preferred_order(fits) == 'linear', metric
            assert fits['linear'].r2 >= 0.98, metric
        latencies = [p.report.recovery.latency for p in table.points]
        assert all(a < b for a, b in zip(latencies, latencies[1:]))

    def test_wish_overhead_grows_with_t_times_n(self, run_trace):
        n, f = 16, 5
        for t in range(1, f + 1):
            trace = run_trace(n=n, f=f, adversary=f'crash:spread{t}@0', horizon=100)
            recovery = measure_recovery(trace, detect_sync_intervals(trace, 0))
            wishes = sum(1 for r in trace.honest_sends() if r.message_kind is MessageKind.WISH
                         and r.time < recovery.latency)
            honest = n - t
            extra = wishes - recovery.view * honest
            assert t * honest <= extra <= 3 * t * honest, t

    def test_amplifying_leaders_over_t(self):
        preset = get_preset('table1-cogsworth-byzantine-worst')
        config = resolve_config(preset)
        table = run_sweep(config, 't', preset.values, workers=2, adversary_template=preset.adversary_template)
        assert all(p.error is None and p.report.validity_passed for p in table.points)
        costs = [p.report.recovery.communication for p in table.points]
        for point in table.points:
            assert point.report.recovery.communication / point.report.recovery.view > 7 * config.n
        assert costs[-1] > costs[0]


class TestEnlistedLeaders:
    def test_mean_near_the_geometric_value(self):
        estimate = estimate_x(100, 33, 10000, seed=0)
        assert abs(estimate.mean_enlisted - 100 / 67) <= 0.05


class TestDoublingClosedForms:
    @pytest.mark.parametrize("start_views, beta", [((0, 1, 2, 3), 1), ((2, 2, 5, 0), Fraction(1, 2)),
                                                  ((4, 0, 1, 1), 3)])
    def test_entry_times_match(self, run_trace, start_views, beta):
        trace = run_trace(synchronizer='doubling', n=4, f=0, beta=beta, start_views=start_views,
                          horizon=beta * 2 ** 9)
        proposals = list(trace.of_kind(RecordKind.PROPOSE))
        assert proposals
        for record in proposals:
            assert record.time == predicted_entry_time(record.view, start_views[record.node - 1], beta)

    def test_first_sync_view_matches_min_sync_view(self, run_trace):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            k = int(rng.integers(0, 4))
            l = k + int(rng.integers(1, 6))
            c = Fraction(int(rng.integers(0, 65)), int(rng.integers(1, 5)))
            beta = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 4)))
            expected = min_sync_view(c, k, l, beta)
            trace = run_trace(synchronizer='doubling', n=2, f=0, beta=beta, c=c, start_views=(k, l),
                              horizon=beta * 2 ** (expected + 2))
            intervals = detect_sync_intervals(trace, c)
            assert intervals, (k, l, c, beta)
            assert intervals[0].view == expected, (k, l, c, beta)

    def test_first_sync_grows_with_the_gap(self, run_trace):
        first = []
        for gap in range(1, 7):
            trace = run_trace(synchronizer='doubling', n=2, f=0, beta=1, start_views=(0, gap),
                              horizon=2 ** (gap + 2))
            first.append(detect_sync_intervals(trace, 0)[0].s_k)
        assert first == [2 ** gap - 1 for gap in range(1, 7)]
        assert all(a < b for a, b in zip(first, first[1:]))


class TestPresets:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_valid_and_reproducible(self, name):
        config = resolve_config(get_preset(name))
        first = run_scenario(config)
        assert first.validity_passed, first.validity_violation
        assert not first.integrity_violations
        assert first.claim_violations == 0
        assert render(first, 'csv') == render(run_scenario(config), 'csv')
