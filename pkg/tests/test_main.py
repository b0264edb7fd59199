# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

import asyncio
import csv
import io
import json

import pytest

from src.core.errors import ConfigError, EmitError, InvariantViolation
from src.main import ViewSyncApp, main


def invoke(*argv):
    stream = io.StringIO()
    code = asyncio.run(main(list(argv), stream=stream))
    return code, stream.getvalue()


class TestRun:
    def test_preset_report(self):
        code, output = invoke('run', '--preset', 'cogsworth-faultless', '--horizon', '40')
        assert code == 0
        assert "latency" in output.lower()

    def test_explicit_flags_and_csv(self, tmp_path):
        out = tmp_path / 'report.csv'
        code, _ = invoke('run', '--sync', 'cogsworth', '--n', '4', '--f', '1', '--delta', '1', '--gst', '0',
                         '--wish-interval', '4.5', '--horizon', '100', '--seed', '7', '--adversary', 'crash:leader@0',
                         '--out', str(out))
        assert code == 0
        row = next(csv.DictReader(out.open()))
        assert row['wish_interval'] == '9/2'
        assert row['adversary'] == 'crash:leader@0'

    def test_jsonl_output(self, tmp_path):
        out = tmp_path / 'report.out'
        code, _ = invoke('run', '--preset', 'doubling-gap', '--out', str(out), '--format', 'jsonl')
        assert code == 0
        assert json.loads(out.read_text())['intervals'][0]['view'] == 4

    def test_same_flags_same_file(self, tmp_path):
        for name in ('a.csv', 'b.csv'):
            invoke('run', '--preset', 'cogsworth-withhold', '--delay-mode', 'uniform', '--seed', '3',
                   '--out', str(tmp_path / name))
        assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()

    def test_rejected_configuration_exits_two(self, capsys):
        code, output = invoke('run', '--n', '3', '--f', '1')
        assert code == 2
        assert output == ''
        assert "3f+1" in capsys.readouterr().err

    def test_unknown_preset_exits_two(self):
        assert invoke('run', '--preset', 'table7')[0] == 2

    def test_unwritable_output_exits_one(self, tmp_path):
        code, _ = invoke('run', '--preset', 'cogsworth-faultless', '--out', str(tmp_path / 'no' / 'r.csv'))
        assert code == 1

    def test_page_of_a_run_without_synchronizations(self):
        code, output = invoke('run', '--n', '4', '--f', '1', '--horizon', '3', '--page', '1')
        assert code == 0
        assert "No synchronization was detected." in output

    def test_config_file(self, tmp_path):
        path = tmp_path / 'broadcast.env'
        path.write_text("SYNCHRONIZER=broadcast\nN=4\nF=1\nHORIZON=40\n")
        out = tmp_path / 'r.csv'
        assert invoke('run', '--config', str(path), '--out', str(out))[0] == 0
        assert next(csv.DictReader(out.open()))['communication'] == '16'


class TestOtherCommands:
    def test_presets(self):
        code, output = invoke('presets')
        assert code == 0
        assert "cogsworth-faultless" in output and "expected-x" in output

    def test_estimate_x_exact(self):
        code, output = invoke('estimate-x', '--n', '4', '--f', '1', '--trials', '500', '--exact')
        assert code == 0
        assert "5/4" in output

    def test_estimate_x_exact_needs_small_n(self):
        assert invoke('estimate-x', '--trials', '10', '--exact')[0] == 2

    def test_sweep_writes_one_row_per_point(self, tmp_path):
        out = tmp_path / 'sweep.csv'
        code, output = invoke('sweep', '--preset', 'cogsworth-faultless', '--values', '4,7',
                              '--horizon', '60', '--out', str(out))
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert [row['value'] for row in rows] == ['4', '7']
        assert [row['communication'] for row in rows] == ['20', '35']

    def test_sweep_over_crashed_leaders_by_table_name(self, tmp_path):
        out = tmp_path / 't.csv'
        code, output = invoke('sweep', '--preset', 'table1-cogsworth-benign', '--axis', 't', '--values', '1,2',
                              '--out', str(out))
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert [row['value'] for row in rows] == ['1', '2']
        assert all(row['recovery_latency'] for row in rows)

    def test_sweep_axis_without_preset(self):
        code, output = invoke('sweep', '--axis', 'seed', '--values', '1,2', '--horizon', '30')
        assert code == 0


class TestErrorHandler:
    @pytest.mark.parametrize("error, code", [
        (ConfigError("bad"), 2),
        (EmitError('out.csv', "denied"), 1),
        (InvariantViolation("broken"), 1),
        (RuntimeError("boom"), 1),
    ])
    def test_exit_codes(self, error, code):
        assert ViewSyncApp().on_command_error('run', error) == code
