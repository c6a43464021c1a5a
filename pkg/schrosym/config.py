import logging
import os
import yaml
from schrosym.constants import DEFAULT_POINTS
from schrosym.error import ConfigError, ParameterError
from schrosym.spectral import PhysParams, SpectralGrid

# This file contains information about commands and the user-defined inputs. New flags are added to the usage text
# in main.py and given a property here.

COMMANDS = ('verify-commutators',
            'kernel-residuals',
            'hurley-check',
            'transform-check',
            'simulate',
            'asymptotic-compare',
            'specfun-selftest')


class CommandLineArguments(object):
    """
    Wraps the raw arguments provided by docopt.

    """
    def __init__(self, arguments, current_directory):
        self._arguments = arguments
        self._current_directory = current_directory

    @property
    def command(self):
        # We have to do this weird loop to deal with the way docopt stores the command name
        for possible_command in COMMANDS:
            if self._arguments.get(possible_command):
                return possible_command

    @property
    def config_path(self):
        path = self._arguments.get('--config')
        return os.path.join(self._current_directory, path) if path else None

    @property
    def dimension(self):
        dimension = self._arguments.get('--dim')
        return int(dimension) if dimension is not None else None

    @property
    def grid_points(self):
        points = self._arguments.get('--grid')
        return int(points) if points is not None else None

    @property
    def log_level(self):
        log_level = {0: logging.ERROR,
                     1: logging.WARN,
                     2: logging.INFO,
                     3: logging.DEBUG}
        # default to silent if the user supplies no verbosity setting
        return log_level.get(min(self._arguments.get('-v') or 0, 3), logging.ERROR)

    @property
    def output_directory(self):
        # None leaves the choice to the configuration file
        directory = self._arguments.get('--out')
        return os.path.join(self._current_directory, directory) if directory else None

    @property
    def process_limit(self):
        # 0 indicates unlimited
        return int(self._arguments.get('--process-limit') or 0)

    @property
    def seed(self):
        seed = self._arguments.get('--seed')
        return int(seed) if seed is not None else None


def _mark(node, path):
    """ The YAML node at a dotted path, or the deepest existing ancestor. """
    for key in path:
        if not isinstance(node, yaml.MappingNode):
            break
        for key_node, value_node in node.value:
            if key_node.value == key:
                node = value_node
                break
        else:
            break
    return node.start_mark if node is not None else None


class ExperimentConfig(object):
    """
    The effective configuration of one run: subcommand, seed, output directory, grid, physical constants and a
    parameter block named after the subcommand. Values missing from the file fall back to the defaults the
    controllers pass in.

    """
    def __init__(self, data=None, node=None, source='<config>'):
        self._data = data if data is not None else {}
        self._node = node
        self._source = source
        self._validate_data()

    @classmethod
    def from_text(cls, text, source='<config>'):
        try:
            data = yaml.safe_load(text)
            node = yaml.compose(text)
        except yaml.MarkedYAMLError as e:
            mark = e.problem_mark
            location = " at line %d, column %d" % (mark.line + 1, mark.column + 1) if mark else ""
            raise ConfigError("%s is not valid YAML%s: %s" % (source, location, e.problem))
        except yaml.YAMLError as e:
            raise ConfigError("%s is not valid YAML: %s" % (source, e))
        return cls({} if data is None else data, node, source)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                text = fh.read()
        except IOError as e:
            raise ConfigError("Could not read the configuration file %s: %s" % (path, e))
        return cls.from_text(text, path)

    def _error(self, path, message):
        location = ''
        mark = _mark(self._node, path) if self._node is not None else None
        if mark is not None:
            location = ' (line %d, column %d)' % (mark.line + 1, mark.column + 1)
        return ConfigError("%s: %s%s: %s" % (self._source, '.'.join(path), location, message))

    def _validate_data(self):
        if not isinstance(self._data, dict):
            raise ConfigError("%s: the top level must be a mapping of sections" % self._source)
        allowed = set(('subcommand', 'seed', 'output', 'grid', 'physics') + COMMANDS)
        for key in sorted(self._data, key=str):
            if key not in allowed:
                raise self._error((key,), "unknown section; expected one of %s" % ', '.join(sorted(allowed)))
        for key in ('grid', 'physics') + COMMANDS:
            if key in self._data and not isinstance(self._data[key], dict):
                raise self._error((key,), "must be a mapping")
        subcommand = self._data.get('subcommand')
        if subcommand is not None and subcommand not in COMMANDS:
            raise self._error(('subcommand',), "unknown subcommand %r" % subcommand)

    def value(self, path, default=None, kind=float):
        """ The value at a dotted path such as 'grid.points', converted with kind. """
        path = tuple(path.split('.')) if isinstance(path, str) else tuple(path)
        node = self._data
        for key in path:
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        if node is None:
            return default
        if kind is None:
            return node
        try:
            if kind is bool and not isinstance(node, bool):
                raise ValueError("expected true or false")
            if kind in (int, float) and isinstance(node, bool):
                raise ValueError("expected a number")
            if kind is int and float(node) != int(node):
                raise ValueError("expected an integer")
            return kind(node)
        except (TypeError, ValueError) as e:
            raise self._error(path, "cannot read %r as %s (%s)" % (node, kind.__name__, e))

    def values(self, path, default=None, kind=float):
        """ A list of values at a dotted path; a scalar is promoted to a one-element list. """
        raw = self.value(path, None, None)
        if raw is None:
            return list(default) if default is not None else None
        path = tuple(path.split('.')) if isinstance(path, str) else tuple(path)
        items = raw if isinstance(raw, list) else [raw]
        try:
            return [kind(item) if kind is not None else item for item in items]
        except (TypeError, ValueError) as e:
            raise self._error(path, "cannot read %r as a list of %s (%s)" % (raw, kind.__name__, e))

    def section(self, name=None):
        """ The parameter block of a subcommand (the configured one by default). """
        return dict(self._data.get(name or self.subcommand) or {})

    def parameter(self, name, default=None, kind=float):
        return self.value((self.subcommand, name), default, kind)

    def parameters(self, name, default=None, kind=float):
        return self.values((self.subcommand, name), default, kind)

    @property
    def subcommand(self):
        return self._data.get('subcommand')

    @property
    def seed(self):
        return self.value('seed', 0, int)

    @property
    def output_directory(self):
        return self.value('output', 'schrosym-output', str)

    @property
    def phys(self):
        try:
            return PhysParams(self.value('physics.mass', 1.0), self.value('physics.hbar', 1.0))
        except ParameterError as e:
            raise self._error(('physics',), str(e))

    def grid(self, dimension=2, points=None, half_width=12.0, phys=None):
        """ The SpectralGrid of this run; the arguments are the controller's defaults. """
        dimension = self.value('grid.dimension', dimension, int)
        points = self.value('grid.points', points or DEFAULT_POINTS.get(dimension, 64), int)
        half_width = self.value('grid.half_width', half_width)
        try:
            return SpectralGrid(dimension, points, half_width, phys or self.phys)
        except ParameterError as e:
            raise self._error(('grid',), str(e))

    def with_overrides(self, subcommand=None, seed=None, output_directory=None, points=None, dimension=None):
        """ A copy with command line values taking precedence over the file. """
        data = yaml.safe_load(yaml.safe_dump(self._data))
        if subcommand is not None:
            data['subcommand'] = subcommand
        if seed is not None:
            data['seed'] = seed
        if output_directory is not None:
            data['output'] = output_directory
        grid = data.setdefault('grid', {})
        if points is not None:
            grid['points'] = points
        if dimension is not None:
            grid['dimension'] = dimension
        if not grid:
            del data['grid']
        data.setdefault('seed', 0)
        return ExperimentConfig(data, self._node, self._source)

    @property
    def data(self):
        return yaml.safe_load(yaml.safe_dump(self._data))

    @property
    def serialized(self):
        return yaml.safe_dump(self._data, default_flow_style=False, sort_keys=True)

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self._data == other.data

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "ExperimentConfig(%r)" % self._data


def load_config(clargs):
    """ The configuration file (if any) with the command line flags applied on top. """
    config = ExperimentConfig.from_file(clargs.config_path) if clargs.config_path else ExperimentConfig()
    return config.with_overrides(subcommand=clargs.command, seed=clargs.seed,
                                 output_directory=clargs.output_directory, points=clargs.grid_points,
                                 dimension=clargs.dimension)
