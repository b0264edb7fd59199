# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

import csv
import json
import re
from fractions import Fraction

import pytest

from src.core.errors import ConfigError, EmitError
from src.harness import runner
from src.harness.config import ScenarioConfig, load_config_file, parse_settings, resolve_config
from src.harness.emit import emit, infer_format, render
from src.harness.fitting import fit_both, fit_growth, preferred_order
from src.harness.presets import ALIASES, PRESETS, get_experiment, get_preset, list_presets
from src.harness.report import SweepPoint, SweepTable, SyncReport
from src.harness.runner import estimate_x, point_config, run_scenario, run_sweep
from src.utility.views import ReportView, SweepView


class TestConfigValidation:
    @pytest.mark.parametrize("settings, message", [
        ({'synchronizer': 'pbft'}, "unknown synchronizer"),
        ({'n': 0, 'f': 0}, "n must be at least 1"),
        ({'f': -1}, "f must be non-negative"),
        ({'n': 3, 'f': 1}, "violates n >= 3f+1"),
        ({'delta': 0}, "delta must be positive"),
        ({'gst': -1}, "gst must be non-negative"),
        ({'gst': 5, 'horizon': 5}, "must exceed gst"),
        ({'beta': 0}, "beta must be positive"),
        ({'c': -1}, "c must be non-negative"),
        ({'seed': -1}, "seed must be non-negative"),
        ({'leader_map': 'fixed'}, "unknown leader map"),
        ({'delay_mode': 'zero'}, "unknown delay mode"),
        ({'wish_interval': 0}, "wish interval must be positive"),
        ({'synchronizer': 'doubling', 'beta': 1, 'wish_interval': 2}, "doubling needs"),
        ({'wish_interval': Fraction(7, 2)}, "cogsworth needs wish interval >= 4"),
        ({'synchronizer': 'broadcast', 'c': 1, 'wish_interval': 2}, "broadcast needs wish interval >= 3"),
        ({'start_times': (0, 0)}, "start_times lists 2 values"),
        ({'start_times': (0, 0, 0, -1)}, "is negative"),
        ({'start_times': (0, 0, 0, 1)}, "is after gst"),
        ({'start_views': (0, 0, 0, 0)}, "only apply to the doubling"),
        ({'synchronizer': 'doubling', 'start_views': (0, 1)}, "start_views lists 2 values"),
        ({'synchronizer': 'doubling', 'start_views': (0, 0, 0, -1)}, "must be non-negative"),
        ({'adversary': 'crash:1,2@0'}, "but f=1"),
        ({'adversary': 'withhold:2', 'synchronizer': 'broadcast'}, "only applies to the cogsworth"),
    ])
    def test_each_constraint_has_its_message(self, settings, message):
        with pytest.raises(ConfigError, match=re.escape(message)):
            ScenarioConfig(**settings).validate()

    def test_defaults_are_valid(self):
        config = ScenarioConfig().validate()
        assert config.effective_wish_interval == 5

    def test_synchronizer_default_wish_intervals(self):
        assert ScenarioConfig(synchronizer='broadcast').effective_wish_interval == 3
        assert ScenarioConfig(synchronizer='doubling', beta=7).effective_wish_interval == 7
        assert ScenarioConfig(c=2).effective_wish_interval == 7

    def test_floor_can_be_lifted(self):
        ScenarioConfig(synchronizer='doubling', beta=1, wish_interval=10, enforce_wish_floor=False).validate()

    def test_dict_round_trip(self):
        config = ScenarioConfig(synchronizer='doubling', wish_interval=Fraction(9, 2), start_views=(0, 1, 2, 4),
                                start_times=(0, 0, 0, 0))
        assert ScenarioConfig.from_dict(json.loads(json.dumps(config.to_dict()))) == config


class TestConfigSources:
    def test_textual_settings(self):
        parsed = parse_settings({'Wish-Interval': '4.5', 'N': '7', 'START_TIMES': '0, 1/2,1',
                                 'enforce_wish_floor': 'no', 'seed': ''})
        assert parsed == {'wish_interval': Fraction(9, 2), 'n': 7,
                          'start_times': (Fraction(0), Fraction(1, 2), Fraction(1)), 'enforce_wish_floor': False}

    @pytest.mark.parametrize("values", [{'colour': 'red'}, {'n': 'four'}, {'delta': 'fast'},
                                        {'enforce_wish_floor': 'maybe'}])
    def test_bad_settings(self, values):
        with pytest.raises(ConfigError):
            parse_settings(values)

    def test_config_file(self, tmp_path):
        path = tmp_path / 'scenario.env'
        path.write_text("# broadcast at n=7\nSYNCHRONIZER=broadcast\nN=7\nF=2\nWISH_INTERVAL=9/2\n")
        assert load_config_file(path)['wish_interval'] == Fraction(9, 2)
        config = resolve_config(config_path=path)
        assert (config.synchronizer, config.n, config.f) == ('broadcast', 7, 2)

    def test_missing_or_invalid_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / 'absent.env')
        bad = tmp_path / 'bad.env'
        bad.write_text("SPEED=3\n")
        with pytest.raises(ConfigError, match="SPEED"):
            load_config_file(bad)

    def test_precedence(self, tmp_path, monkeypatch):
        monkeypatch.setenv('VIEWSYNC_DEFAULT_SEED', '9')
        preset = get_preset('cogsworth-faultless')
        assert resolve_config().seed == 9
        assert resolve_config(preset).seed == 9

        path = tmp_path / 'seed.env'
        path.write_text("SEED=3\nN=7\nF=2\n")
        from_file = resolve_config(preset, path)
        assert (from_file.seed, from_file.n, from_file.wish_interval) == (3, 7, 4)

        flagged = resolve_config(preset, path, {'seed': '5', 'n': None})
        assert (flagged.seed, flagged.n) == (5, 7)

    def test_bad_environment(self, monkeypatch):
        monkeypatch.setenv('VIEWSYNC_DEFAULT_SEED', 'many')
        with pytest.raises(ConfigError, match="VIEWSYNC_DEFAULT_SEED"):
            resolve_config()


class TestPresets:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_every_preset_is_valid(self, name):
        resolve_config(get_preset(name))

    def test_unknown_names(self):
        with pytest.raises(ConfigError):
            get_preset('table9')
        with pytest.raises(ConfigError):
            get_experiment('expected-y')

    @pytest.mark.parametrize("alias, target", sorted(ALIASES.items()))
    def test_aliases_resolve(self, alias, target):
        assert get_preset(alias) is PRESETS[target]

    def test_listing(self):
        rows = list_presets()
        assert ('expected-x', 'experiment') == rows[-1][:2]
        assert ('table1-cogsworth-benign', 'alias', "Same as cogsworth-benign") in rows
        assert len(rows) == len(PRESETS) + len(ALIASES) + 1


class TestFitting:
    def test_linear_series(self):
        fit = fit_growth([4, 7, 10], [20, 35, 50], 'linear')
        assert fit.slope == pytest.approx(5)
        assert fit.intercept == pytest.approx(0, abs=1e-9)
        assert fit.r2 == pytest.approx(1)

    def test_quadratic_series_prefers_quadratic(self):
        n = [4, 7, 10, 13, 16]
        fits = fit_both(n, [x * x for x in n])
        assert preferred_order(fits) == 'quadratic'
        assert fits['quadratic'].r2 == pytest.approx(1)
        assert fits['linear'].r2 < 0.98

    def test_constant_series(self):
        fits = fit_both([1, 2, 3], [0, 0, 0])
        assert fits['linear'].r2 == 1 and fits['quadratic'].r2 == 1
        assert preferred_order(fits) == 'linear'

    def test_bad_input(self):
        with pytest.raises(ValueError):
            fit_growth([1, 2], [1, 2], 'cubic')
        with pytest.raises(ValueError):
            fit_growth([1], [1], 'linear')


class TestRunScenario:
    def test_faultless_cogsworth_preset(self):
        report = run_scenario(resolve_config(get_preset('cogsworth-faultless')))
        assert report.latency == 4
        assert report.communication == 20
        assert report.validity_passed
        assert not report.integrity_violations
        assert report.claim_violations == 0

    def test_doubling_gap_preset(self):
        report = run_scenario(resolve_config(get_preset('doubling-gap')))
        assert report.intervals[0].view == 4
        assert report.intervals[0].s_k == 15
        assert report.communication == 0

    def test_n_equal_to_3f_is_rejected(self):
        with pytest.raises(ConfigError, match="3f\\+1"):
            run_scenario(ScenarioConfig(n=3, f=1))

    def test_report_round_trip(self):
        report = run_scenario(ScenarioConfig(n=7, f=2, adversary='crash:leader@0', delay_mode='uniform',
                                             seed=3, horizon=80))
        assert SyncReport.from_dict(json.loads(json.dumps(report.to_dict()))) == report

    def test_estimate_x_wrapper(self):
        assert estimate_x(4, 1, 100).trials == 100
        with pytest.raises(ConfigError):
            estimate_x(3, 1, 100)
        with pytest.raises(ConfigError):
            estimate_x(4, 1, 0)


class TestSweeps:
    @pytest.fixture
    def base(self):
        return resolve_config(get_preset('cogsworth-faultless'))

    def test_points_follow_the_axis(self, base):
        table = run_sweep(base, 'seed', [3, 1, 2], workers=3)
        assert [p.value for p in table.points] == [1, 2, 3]
        assert all(p.report.config.seed == p.value for p in table.points)

    def test_n_axis_sets_f(self, base):
        assert point_config(base, 'n', 13).f == 4
        table = run_sweep(base, 'n', [4, 7, 10])
        assert [p.report.communication for p in table.points] == [20, 35, 50]
        assert preferred_order(table.fits['communication']) == 'linear'

    def test_failing_point_does_not_stop_the_sweep(self, base):
        table = run_sweep(base, 't', [1, 2], adversary_template='crash:spread{t}@0')
        assert table.points[0].report is not None
        assert table.points[1].report is None and "f=1" in table.points[1].error

    def test_t_axis_fits_the_recovery_cost(self, base):
        base = base.with_changes(n=7, f=2)
        table = run_sweep(base, 't', [1, 2], adversary_template='crash:spread{t}@0')
        recoveries = [p.report.recovery for p in table.points]
        assert all(recoveries)
        for metric in ('communication', 'latency'):
            expected = fit_both([1, 2], [float(getattr(r, metric)) for r in recoveries])
            assert table.fits[metric] == expected

    def test_unexpected_error_is_recorded(self, base, monkeypatch):
        simulate_point = runner.run_scenario

        def flaky(config):
            if config.seed == 2:
                raise RuntimeError("boom")
            return simulate_point(config)

        monkeypatch.setattr(runner, 'run_scenario', flaky)
        table = run_sweep(base, 'seed', [1, 2, 3])
        assert [p.error is None for p in table.points] == [True, False, True]
        assert table.points[1].error == "RuntimeError: boom"

    def test_t_axis_needs_a_template(self, base):
        table = run_sweep(base, 't', [1])
        assert "template" in table.points[0].error
        assert table.fits == {}

    def test_unknown_axis(self, base):
        with pytest.raises(ConfigError):
            run_sweep(base, 'delta', [1, 2])


class TestEmit:
    @pytest.fixture(scope='class')
    def report(self):
        return run_scenario(ScenarioConfig(n=4, f=1, wish_interval=4, horizon=40))

    def test_report_csv(self, report, tmp_path):
        path = emit(report, tmp_path / 'report.csv')
        rows = list(csv.DictReader(path.open()))
        assert len(rows) == 1
        assert rows[0]['communication'] == '20' and rows[0]['latency'] == '4'

    def test_report_jsonl_round_trip(self, report, tmp_path):
        path = emit(report, tmp_path / 'report.jsonl')
        lines = path.read_text().splitlines()
        assert len(lines) == 1
        assert SyncReport.from_dict(json.loads(lines[0])) == report

    def test_empty_sweep_is_header_only(self, tmp_path):
        path = emit(SweepTable('n', (), {}), tmp_path / 'empty.csv')
        assert len(path.read_text().splitlines()) == 1

    def test_five_point_sweep(self, tmp_path):
        base = ScenarioConfig(n=4, f=1, wish_interval=4, horizon=30)
        table = run_sweep(base, 'seed', range(5))
        path = emit(table, tmp_path / 'sweep.csv')
        assert len(path.read_text().splitlines()) == 6
        jsonl = emit(table, tmp_path / 'sweep.jsonl')
        assert [json.loads(line)['value'] for line in jsonl.read_text().splitlines()] == [0, 1, 2, 3, 4]

    def test_re_emission_is_byte_identical(self, report, tmp_path):
        first = emit(report, tmp_path / 'a.csv').read_bytes()
        assert emit(report, tmp_path / 'b.csv').read_bytes() == first

    def test_format_inference(self):
        assert infer_format('out.jsonl') == 'jsonl'
        assert infer_format('out.JSON') == 'jsonl'
        assert infer_format('out.txt') == 'csv'

    def test_explicit_format_wins(self, report, tmp_path):
        path = emit(report, tmp_path / 'report.txt', 'jsonl')
        assert json.loads(path.read_text())['latency'] == '4'

    def test_unknown_format(self, report):
        with pytest.raises(EmitError):
            render(report, 'xml')

    def test_io_failure_names_the_path(self, report, tmp_path):
        target = tmp_path / 'missing' / 'report.csv'
        with pytest.raises(EmitError) as error:
            emit(report, target)
        assert error.value.path == str(target)


class TestViews:
    @pytest.fixture(scope='class')
    def report(self):
        return run_scenario(ScenarioConfig(n=4, f=1, wish_interval=4, horizon=40))

    def test_report_pages(self, report):
        view = ReportView(report, rows_per_page=4)
        assert len(report.intervals) == 9
        assert view.total_pages() == 3
        assert "page 1/3" in view.render_page()
        assert view.next_page() and view.next_page()
        assert not view.next_page()
        assert view.current_page == 2

    def test_report_without_synchronizations(self):
        report = run_scenario(ScenarioConfig(n=4, f=1, wish_interval=4, horizon=3))
        view = ReportView(report)
        assert view.total_pages() == 1
        assert "No synchronization was detected." in view.render_page()
        assert "latency: none" in view.summary()

    def test_page_size_from_environment(self, report, monkeypatch):
        monkeypatch.setenv('VIEWSYNC_PAGE_SIZE', '2')
        assert ReportView(report).total_pages() == 5

    def test_sweep_fits_on_the_last_page(self):
        table = run_sweep(ScenarioConfig(n=4, f=1, wish_interval=4, horizon=30), 'n', [4, 7, 10])
        view = SweepView(table, rows_per_page=2)
        assert "communication vs n" not in view.render_page()
        assert view.next_page()
        assert "communication vs n" in view.render_page()

    def test_failed_point_shows_its_error(self):
        table = SweepTable('t', (SweepPoint(3, error="adversary corrupts 3 nodes but f=1"),), {})
        assert "but f=1" in SweepView(table).render_page()
