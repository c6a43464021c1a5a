import json
import logging
import os
import numpy as np
import pytest
from schrosym.config import CommandLineArguments, ExperimentConfig, load_config
from schrosym.error import ConfigError
from schrosym.report import Check, Report
from schrosym.spectral import SpectralGrid

CONFIG = """\
subcommand: simulate
seed: 4
output: results
grid:
  dimension: 1
  points: 64
physics:
  mass: 0.5
simulate:
  dt: 0.005
  steps: 40
  c: 0.5
"""


def arguments(command='simulate', **flags):
    raw = {'--config': None, '--out': None, '--seed': None, '--grid': None, '--dim': None,
           '--process-limit': None, '-v': 0, command: True}
    raw.update(flags)
    return raw


def test_reads_sections_and_parameters():
    config = ExperimentConfig.from_text(CONFIG)
    assert config.subcommand == 'simulate'
    assert config.seed == 4
    assert config.output_directory == 'results'
    assert config.parameter('dt', 0.01) == 0.005
    assert config.parameter('steps', 200, int) == 40
    assert config.parameter('record_every', 10, int) == 10
    assert config.parameters('c', [1.0, 2.0]) == [0.5]
    assert config.phys.mass == 0.5
    assert config.phys.hbar == 1.0
    grid = config.grid(dimension=2, points=128, half_width=12.0)
    assert grid == SpectralGrid(1, 64, 12.0, config.phys)
    assert config.value('grid.missing.deeper', 'fallback') == 'fallback'


def test_defaults_without_a_file():
    config = ExperimentConfig().with_overrides(subcommand='kernel-residuals')
    assert config.seed == 0
    assert config.output_directory == 'schrosym-output'
    assert config.grid(dimension=3).points_per_axis == 64


def test_bad_value_names_its_path_and_line():
    config = ExperimentConfig.from_text("simulate:\n  steps: many\n").with_overrides(subcommand='simulate')
    with pytest.raises(ConfigError) as e:
        config.parameter('steps', 200, int)
    message = str(e.value)
    assert 'simulate.steps' in message
    assert 'line 2, column 10' in message


@pytest.mark.parametrize('text, fragment', [("grids:\n  points: 64\n", 'grids'),
                                            ("- 1\n- 2\n", 'mapping'),
                                            ("seed: [1, 2\n", 'not valid YAML'),
                                            ("grid: 5\n", 'grid'),
                                            ("subcommand: fly\n", 'fly')])
def test_invalid_files(text, fragment):
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_text(text)
    assert fragment in str(e.value)


def test_type_checks():
    config = ExperimentConfig.from_text("seed: 2.5\nsimulate:\n  steps: true\n  flag: 1\n", 'run.yml')
    with pytest.raises(ConfigError) as e:
        config.seed
    assert str(e.value).startswith('run.yml: seed')
    with pytest.raises(ConfigError):
        config.value('simulate.steps', 1, int)
    with pytest.raises(ConfigError):
        config.value('simulate.flag', False, bool)


def test_grid_and_physics_errors():
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_text("grid:\n  points: 100\n").grid()
    assert 'grid' in str(e.value)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text("physics:\n  mass: -1.0\n").phys


def test_overrides_and_round_trip():
    config = ExperimentConfig.from_text(CONFIG).with_overrides(seed=9, points=32, output_directory='elsewhere')
    assert config.seed == 9
    assert config.value('grid.points', None, int) == 32
    assert config.value('grid.dimension', None, int) == 1
    assert config.output_directory == 'elsewhere'
    assert ExperimentConfig.from_text(config.serialized) == config
    assert ExperimentConfig.from_text(CONFIG).seed == 4


def test_command_line_arguments(tmp_path):
    clargs = CommandLineArguments(arguments('hurley-check', **{'--seed': '12', '-v': 2, '--process-limit': '3'}),
                                  str(tmp_path))
    assert clargs.command == 'hurley-check'
    assert clargs.seed == 12
    assert clargs.log_level == logging.INFO
    assert clargs.process_limit == 3
    assert clargs.output_directory is None
    assert clargs.config_path is None
    assert CommandLineArguments(arguments(**{'-v': 7}), str(tmp_path)).log_level == logging.DEBUG
    assert CommandLineArguments(arguments(), str(tmp_path)).log_level == logging.ERROR


def test_load_config_applies_flags(tmp_path):
    (tmp_path / 'run.yml').write_text(CONFIG)
    clargs = CommandLineArguments(arguments('simulate', **{'--config': 'run.yml', '--seed': '5', '--dim': '2'}),
                                  str(tmp_path))
    config = load_config(clargs)
    assert config.subcommand == 'simulate'
    assert config.seed == 5
    assert config.output_directory == 'results'
    assert config.value('grid.dimension', None, int) == 2
    clargs = CommandLineArguments(arguments('simulate', **{'--config': 'missing.yml'}), str(tmp_path))
    with pytest.raises(ConfigError):
        load_config(clargs)
    clargs = CommandLineArguments(arguments('simulate', **{'--out': 'out'}), str(tmp_path))
    assert load_config(clargs).output_directory == str(tmp_path / 'out')


def test_checks():
    assert Check('a', 1e-9, 1e-8).passed
    assert not Check('a', 1e-7, 1e-8).passed
    assert not Check('a', float('nan'), 1e-8).passed
    assert Check('a', 5.0, 1e-8, binding=False).passed
    assert Check('a', 5.0).passed
    assert Check.condition('holds', True).passed
    assert not Check.condition('fails', False).passed


def test_report_outcome():
    report = Report('kernel-residuals', seed=3)
    report.add('zeta', 1e-9, 1e-8)
    report.add('alpha', 1e-3, 1e-8)
    report.add('informational', 10.0, binding=False)
    report.add_condition('monotone', True)
    assert not report.passed
    assert [check.name for check in report.failures] == ['alpha']
    assert [check.name for check in report.checks] == ['alpha', 'informational', 'monotone', 'zeta']


def test_tables_are_sorted_and_extended():
    report = Report('simulate')
    report.table('series', ['t', 'norm'], [[0.2, 1.0], [0.1, 1.0]])
    report.table('series', ['t', 'norm'], [[0.0, 1.0]])
    assert report.rows('series') == [[0.0, 1.0], [0.1, 1.0], [0.2, 1.0]]
    with pytest.raises(ValueError):
        report.table('series', ['time', 'norm'], [])


def test_serialized_summary():
    report = Report('simulate', seed=1, grid=SpectralGrid(2, 16, 4.0))
    report.add('norm_drift', np.float64(1e-12), 1e-8)
    report.measure('kappa', {'value': 1.0 + 2.0j, 'flags': np.array([True, False])})
    summary = json.loads(report.serialized)
    assert summary['passed'] is True
    assert summary['metadata']['grid'] == {'dimension': 2, 'points': 16, 'half_width': 4.0, 'mass': 1.0,
                                           'hbar': 1.0}
    assert summary['measurements']['kappa'] == {'value': [1.0, 2.0], 'flags': [True, False]}
    assert summary['checks'][0]['name'] == 'norm_drift'


def test_write_places_every_file(tmp_path):
    report = Report('simulate', seed=1)
    report.add('check', 0.5, 1.0)
    report.table('series', ['t', 'label'], [[0.1, 'a,b'], [0.0, 'plain']])
    written = []

    def extra(path):
        written.append(path)
        with open(path, 'w') as fh:
            fh.write('extra')

    files = report.write(str(tmp_path / 'out'), 'seed: 1\n', extra={'extra.txt': extra})
    names = sorted(os.path.basename(path) for path in files)
    assert names == ['config.yml', 'extra.txt', 'series.csv', 'summary.json']
    assert len(written) == 1
    with open(str(tmp_path / 'out' / 'series.csv'), newline='') as fh:
        assert fh.read() == 't,label\r\n0.0,plain\r\n0.1,"a,b"\r\n'
    assert (tmp_path / 'out' / 'config.yml').read_text() == 'seed: 1\n'
    assert not [name for name in os.listdir(str(tmp_path / 'out')) if name.startswith('.partial-')]


def test_write_leaves_nothing_on_failure(tmp_path):
    def broken(path):
        raise RuntimeError("disk full")

    report = Report('simulate')
    report.table('series', ['t'], [[0.0]])
    with pytest.raises(RuntimeError):
        report.write(str(tmp_path), extra={'snapshot.bin': broken})
    assert os.listdir(str(tmp_path)) == []
