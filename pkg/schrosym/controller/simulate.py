import functools
import logging
import numpy as np
from schrosym import kernels, snapshots
from schrosym.error import ConfigError, ParameterError, SchrosymError
from schrosym.nse_dynamics import (AubersonSabatier, DoebnerGoldin, Power, TimeSeries, nonlinearity_from_config,
                                   split_step_evolve)
from schrosym.report import Report
from schrosym.spectral import PhysParams, WaveField
from schrosym.symmetry_ops import random_wave_packets

log = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-8
SOLITON_TOLERANCE = 1e-4
SNAPSHOT_FORMATS = ('hdf5', 'binary')


def soliton_profile(grid, eta, lam, t=0.0):
    """ The bright soliton of the focusing cubic equation in one dimension, centred at the origin. """
    phys = grid.phys
    m, hbar = phys.mass, phys.hbar
    amplitude = eta * hbar / np.sqrt(-lam * m)
    x = grid.coordinates[0]
    return amplitude / np.cosh(eta * x) * np.exp(1j * hbar * eta ** 2 * t / (2.0 * m))


def initial_field(grid, data, nl, seed):
    """ Initial data from a mapping such as {'type': 'packets', 'width': 1.6}. """
    kind = data.get('type', 'packets')
    if kind == 'packets':
        rng = np.random.default_rng([seed, 5])
        return random_wave_packets(grid, rng, count=int(data.get('count', 3)), width=float(data.get('width', 1.6)),
                                   carrier=float(data.get('carrier', 1.0)), spread=float(data.get('spread', 0.25)))
    if kind == 'gaussian':
        values = kernels.case2_kernel(grid.points(), 0.0, float(data.get('beta', 0.5)), grid.phys)
        return WaveField(grid, values * float(data.get('amplitude', 1.0)))
    if kind == 'soliton':
        if grid.dimension != 1 or not isinstance(nl, Power) or nl.k != 1 or nl.lam.imag != 0 or nl.lam.real >= 0:
            raise ParameterError("Soliton data needs one dimension and a focusing cubic nonlinearity")
        return WaveField(grid, soliton_profile(grid, float(data.get('eta', 1.0)), nl.lam.real))
    raise ParameterError("Unknown initial data type %r; choose packets, gaussian or soliton" % kind)


def conserves_norm(nl):
    # every exact substep except the dissipative power one keeps |psi|
    if isinstance(nl, DoebnerGoldin):
        return False
    if isinstance(nl, Power):
        return nl.lam.imag == 0
    return True


def _snapshot_writers(fields, kind):
    if kind == 'hdf5':
        def write(path):
            for index, field in enumerate(fields):
                snapshots.write_hdf5(field, path, name='snapshot%04d' % index)
        return {'snapshots.h5': write}
    return dict(('snapshot%04d.bin' % index, functools.partial(snapshots.write_binary, field))
                for index, field in enumerate(fields))


def main(clargs, config):
    """ Runs the split-step solver for one nonlinearity, recording a time series and snapshots. """
    seed = config.seed
    try:
        nl = nonlinearity_from_config(config.parameter('nonlinearity', {'type': 'power', 'lambda': 1.0, 'k': 1.0},
                                                       None))
    except SchrosymError as e:
        raise ConfigError("simulate.nonlinearity: %s" % e)
    # the Auberson-Sabatier equation is posed with hbar = 1 and 2m = 1
    phys = PhysParams(0.5, 1.0) if isinstance(nl, AubersonSabatier) else config.phys
    grid = config.grid(dimension=2, points=128, half_width=12.0, phys=phys)
    dt = config.parameter('dt', 0.01)
    steps = config.parameter('steps', 200, int)
    record_every = config.parameter('record_every', 10, int)
    snapshot_every = config.parameter('snapshot_every', 100, int)
    snapshot_format = config.parameter('snapshot_format', 'hdf5', str)
    if snapshot_format not in SNAPSHOT_FORMATS:
        raise ConfigError("simulate.snapshot_format must be one of %s, got %r"
                          % (', '.join(SNAPSHOT_FORMATS), snapshot_format))
    if steps < 1 or record_every < 1 or snapshot_every < 1:
        raise ConfigError("simulate.steps, record_every and snapshot_every must be positive")
    initial_data = config.parameter('initial', {'type': 'packets'}, None)
    try:
        field = initial_field(grid, initial_data, nl, seed)
    except ParameterError as e:
        raise ConfigError("simulate.initial: %s" % e)
    report = Report('simulate', seed, grid)
    report.measure('nonlinearity', nl.serialized)

    log.info("Evolving %r for %d steps of %g on %r", nl, steps, dt, grid)
    series = TimeSeries()
    series.record(field)
    fields = [field]
    done = 0
    completed = True
    try:
        while done < steps:
            chunk = min(snapshot_every, steps - done)
            segment = TimeSeries()
            field = split_step_evolve(field, nl, dt, chunk, segment, record_every=1)
            # the first row repeats the end of the previous chunk
            for offset, row in enumerate(segment.rows[1:], start=1):
                if (done + offset) % record_every == 0:
                    series.rows.append(row)
            done += chunk
            fields.append(field)
    except SchrosymError as e:
        log.error("The run stopped after %d steps: %s", done, e)
        completed = False
        report.measure('stopped', str(e))
    report.add_condition('run.completed', completed)

    norms = series.norms
    drift = float(np.max(np.abs(norms - norms[0])) / norms[0])
    report.add('norm_drift', drift, NORM_TOLERANCE, binding=conserves_norm(nl))
    if completed and initial_data.get('type') == 'soliton':
        expected = soliton_profile(grid, float(initial_data.get('eta', 1.0)), nl.lam.real, field.time)
        deviation = float(np.max(np.abs(np.abs(field.values) - np.abs(expected))) / np.max(np.abs(expected)))
        report.add('soliton.shape', deviation, SOLITON_TOLERANCE)
    report.table('timeseries', ['t', 'norm', 'max_abs_psi'], series.rows)
    report.measure('snapshots', {'count': len(fields), 'format': snapshot_format,
                                 'times': [float(item.time) for item in fields]})

    report.write(config.output_directory, config.serialized, extra=_snapshot_writers(fields, snapshot_format))
    return report
