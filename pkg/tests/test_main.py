import json
import os
import sys
import pytest
from schrosym import main
from schrosym.controller import selftest
from schrosym.error import BlowUpError
from schrosym.report import Report

SIMULATE = """\
grid:
  dimension: 1
  points: 256
  half_width: 30.0
simulate:
  nonlinearity:
    type: power
    lambda: -1.0
    k: 1.0
  initial:
    type: soliton
    eta: 1.0
  dt: 0.002
  steps: 50
  record_every: 5
  snapshot_every: 25
  snapshot_format: binary
"""


def run(monkeypatch, *argv):
    monkeypatch.setattr(sys, 'argv', ['schrosym'] + list(argv))
    main.main()


def summary(directory):
    with open(os.path.join(directory, 'summary.json')) as fh:
        return json.load(fh)


def test_selftest_run_passes(monkeypatch, tmp_path):
    config = tmp_path / 'selftest.yml'
    config.write_text("specfun-selftest:\n  samples: 50\n")
    out = str(tmp_path / 'out')
    run(monkeypatch, 'specfun-selftest', '--config', str(config), '--out', out, '--seed', '3')
    result = summary(out)
    assert result['passed'] is True
    assert result['metadata']['seed'] == 3
    assert os.path.exists(os.path.join(out, 'identities.csv'))
    assert os.path.exists(os.path.join(out, 'config.yml'))


def test_simulate_run_writes_snapshots(monkeypatch, tmp_path):
    config = tmp_path / 'simulate.yml'
    config.write_text(SIMULATE)
    out = str(tmp_path / 'out')
    run(monkeypatch, 'simulate', '--config', str(config), '--out', out)
    result = summary(out)
    assert result['passed'] is True
    assert result['measurements']['snapshots']['count'] == 3
    assert sorted(name for name in os.listdir(out) if name.endswith('.bin')) == ['snapshot0000.bin',
                                                                               'snapshot0001.bin',
                                                                               'snapshot0002.bin']
    with open(os.path.join(out, 'timeseries.csv')) as fh:
        assert len(fh.read().splitlines()) == 12


def test_failed_check_exits_with_one(monkeypatch, tmp_path):
    def failing(clargs, config):
        report = Report('specfun-selftest', config.seed)
        report.add('gamma.one', 1.0, 1e-14)
        return report

    monkeypatch.setattr(selftest, 'main', failing)
    with pytest.raises(SystemExit) as e:
        run(monkeypatch, 'specfun-selftest', '--out', str(tmp_path))
    assert e.value.code == 1


def test_solver_error_exits_with_one_and_leaves_no_partial_output(monkeypatch, tmp_path, capsys):
    out = str(tmp_path / 'out')

    def diverging(clargs, config):
        os.makedirs(os.path.join(config.output_directory, '.partial-abc123'))
        raise BlowUpError("The peak amplitude grew from 1 to 2e6 by t = 0.4")

    monkeypatch.setattr(selftest, 'main', diverging)
    with pytest.raises(SystemExit) as e:
        run(monkeypatch, 'specfun-selftest', '--out', out)
    assert e.value.code == 1
    assert 'BlowUpError' in capsys.readouterr().out
    assert os.listdir(out) == []


def test_config_error_exits_with_two(monkeypatch, tmp_path, capsys):
    config = tmp_path / 'broken.yml'
    config.write_text("grids:\n  points: 64\n")
    with pytest.raises(SystemExit) as e:
        run(monkeypatch, 'kernel-residuals', '--config', str(config), '--out', str(tmp_path))
    assert e.value.code == 2
    assert 'grids' in capsys.readouterr().out


def test_usage_error_exits_with_two(monkeypatch):
    with pytest.raises(SystemExit) as e:
        run(monkeypatch, 'levitate')
    assert e.value.code == 2
