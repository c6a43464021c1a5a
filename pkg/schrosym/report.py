"""
Check results and the files a subcommand leaves behind: summary.json, one CSV per detail table and the
effective configuration as config.yml.

"""
import csv
import datetime
import json
import logging
import os
import shutil
import tempfile
import numpy as np
from schrosym.constants import VERSION

log = logging.getLogger(__name__)

STAGING_PREFIX = '.partial-'


def _plain(value):
    """ numpy scalars and arrays to JSON-friendly Python values. """
    if isinstance(value, dict):
        return dict((str(key), _plain(item)) for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return repr(complex(value))
    return str(value)


class Check(object):
    """
    One named measurement. Binding checks pass when value <= tolerance; informational ones only report.

    """
    def __init__(self, name, value, tolerance=None, binding=True):
        self.name = name
        self.value = float(value)
        self.tolerance = tolerance
        self.binding = binding and tolerance is not None

    @classmethod
    def condition(cls, name, holds, binding=True):
        """ A yes/no check, stored as 0 (holds) or 1 against a tolerance of 0. """
        return cls(name, 0.0 if holds else 1.0, 0.0, binding)

    @property
    def passed(self):
        if not self.binding:
            return True
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)

    @property
    def serialized(self):
        return {'name': self.name, 'value': self.value, 'tolerance': self.tolerance, 'binding': self.binding,
                'passed': self.passed}

    def __repr__(self):
        return "Check(%s=%.3g, tolerance=%r, binding=%s)" % (self.name, self.value, self.tolerance, self.binding)


class Report(object):
    """ Everything a subcommand measured, and where it goes on disk. """
    def __init__(self, subcommand, seed=None, grid=None):
        self.subcommand = subcommand
        self.seed = seed
        self.grid = grid
        self._checks = []
        self._tables = {}
        self._measurements = {}
        self._started = datetime.datetime.now(datetime.timezone.utc)

    def add(self, name, value, tolerance=None, binding=True):
        check = Check(name, value, tolerance, binding)
        self._checks.append(check)
        if not check.passed:
            log.warning("%s = %.3g exceeds the tolerance %g", name, check.value, tolerance)
        else:
            log.info("%s = %.3g", name, check.value)
        return check

    def add_condition(self, name, holds, binding=True):
        check = Check.condition(name, holds, binding)
        self._checks.append(check)
        if not check.passed:
            log.warning("%s does not hold", name)
        return check

    def measure(self, name, value):
        """ Free-form informational data for summary.json. """
        self._measurements[name] = _plain(value)

    def table(self, name, header, rows):
        """ A CSV detail table. Rows are sorted, so the file does not depend on the order they arrived in. """
        rows = [list(row) for row in rows]
        existing = self._tables.get(name)
        if existing is not None:
            if existing[0] != list(header):
                raise ValueError("Detail table %s was started with a different header" % name)
            rows = existing[1] + rows
        self._tables[name] = (list(header), sorted(rows))

    @property
    def checks(self):
        return sorted(self._checks, key=lambda check: check.name)

    def rows(self, name):
        return self._tables[name][1]

    @property
    def table_names(self):
        return sorted(self._tables)

    @property
    def passed(self):
        return all(check.passed for check in self._checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    @property
    def serialized(self):
        finished = datetime.datetime.now(datetime.timezone.utc)
        metadata = {'subcommand': self.subcommand, 'seed': self.seed, 'version': VERSION,
                    'started': self._started.isoformat(), 'finished': finished.isoformat()}
        if self.grid is not None:
            metadata['grid'] = {'dimension': self.grid.dimension, 'points': self.grid.points_per_axis,
                                'half_width': self.grid.half_width, 'mass': self.grid.phys.mass,
                                'hbar': self.grid.phys.hbar}
        data = {'metadata': metadata,
                'checks': [check.serialized for check in self.checks],
                'measurements': self._measurements,
                'passed': self.passed}
        return json.dumps(_plain(data), sort_keys=True, indent=2)

    def _write_table(self, name, directory):
        header, rows = self._tables[name]
        with open(os.path.join(directory, '%s.csv' % name), 'w', newline='', encoding='utf-8') as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator='\r\n')
            writer.writerow(header)
            writer.writerows([_cell(value) for value in row] for row in rows)

    def write(self, output_directory, config_text=None, extra=None):
        """
        Writes everything into a temporary directory inside output_directory and moves the files into place
        once all of them exist. On failure nothing is left behind. extra maps file names to callables that
        write that file given its path.

        """
        if not os.path.isdir(output_directory):
            os.makedirs(output_directory)
        staging = tempfile.mkdtemp(prefix=STAGING_PREFIX, dir=output_directory)
        try:
            for name in self.table_names:
                self._write_table(name, staging)
            if config_text is not None:
                with open(os.path.join(staging, 'config.yml'), 'w', encoding='utf-8') as fh:
                    fh.write(config_text)
            for filename, writer in sorted((extra or {}).items()):
                writer(os.path.join(staging, filename))
            with open(os.path.join(staging, 'summary.json'), 'w', encoding='utf-8') as fh:
                fh.write(self.serialized)
            written = sorted(os.listdir(staging))
            for filename in written:
                os.replace(os.path.join(staging, filename), os.path.join(output_directory, filename))
        finally:
            shutil.rmtree(staging, ignore_errors=True)
        log.info("Wrote %d file(s) to %s", len(written), output_directory)
        return [os.path.join(output_directory, filename) for filename in written]


def discard_partial(output_directory):
    """ Removes staging directories that an aborted run left in output_directory. Returns how many. """
    if not os.path.isdir(output_directory):
        return 0
    stale = [name for name in os.listdir(output_directory) if name.startswith(STAGING_PREFIX)]
    for name in stale:
        shutil.rmtree(os.path.join(output_directory, name), ignore_errors=True)
    if stale:
        log.info("Removed %d partial output director%s from %s", len(stale), 'y' if len(stale) == 1 else 'ies',
                 output_directory)
    return len(stale)
