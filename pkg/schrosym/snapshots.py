"""
Reading and writing field snapshots.

Binary layout: int64 dimension, int64 points, float64 L, float64 t, then the complex128 amplitudes of every
component in C order, all little-endian. CSV is only written for small grids. HDF5 stores the amplitudes and
positions as datasets and the grid description as attributes.

"""
import csv
import logging
import h5py
import numpy as np
from schrosym.error import ParameterError
from schrosym.spectral import PhysParams, SpectralGrid, WaveField, POSITION

log = logging.getLogger(__name__)

HEADER = np.dtype([('dimension', '<i8'), ('points', '<i8'), ('half_width', '<f8'), ('time', '<f8')])
CSV_POINT_LIMIT = 4096


def write_binary(field, path):
    header = np.array([(field.grid.dimension, field.grid.points_per_axis, field.grid.half_width, field.time)],
                      dtype=HEADER)
    with open(path, 'wb') as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(field.amplitudes, dtype='<c16').tobytes())


def read_binary(path, phys=None):
    with open(path, 'rb') as fh:
        header = np.frombuffer(fh.read(HEADER.itemsize), dtype=HEADER)
        payload = np.frombuffer(fh.read(), dtype='<c16')
    if header.size != 1:
        raise ParameterError("%s is too short to hold a snapshot header" % path)
    dimension, points, half_width, time = header[0]
    grid = SpectralGrid(int(dimension), int(points), float(half_width), phys)
    if payload.size == 0 or payload.size % grid.size:
        raise ParameterError("Payload of %s does not hold a whole number of components" % path)
    amplitudes = payload.reshape((payload.size // grid.size,) + grid.shape)
    return WaveField(grid, amplitudes, float(time))


def write_csv(field, path):
    """ One row per grid point: coordinates, then the real and imaginary part of each component. """
    grid = field.grid
    if grid.size > CSV_POINT_LIMIT:
        raise ParameterError("CSV snapshots are limited to %d grid points, this grid has %d"
                             % (CSV_POINT_LIMIT, grid.size))
    positions = grid.points().reshape(-1, grid.dimension)
    values = field.amplitudes.reshape(field.components, -1)
    header = ['x%d' % (a + 1) for a in range(grid.dimension)]
    for component in range(field.components):
        header += ['re%d' % component, 'im%d' % component]
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator='\r\n')
        writer.writerow(header)
        for index in range(grid.size):
            row = [repr(float(x)) for x in positions[index]]
            for component in range(field.components):
                value = values[component, index]
                row += [repr(float(value.real)), repr(float(value.imag))]
            writer.writerow(row)


def write_hdf5(field, path, name='field'):
    grid = field.grid
    with h5py.File(path, 'a') as h5:
        if name in h5:
            del h5[name]
        group = h5.create_group(name)
        group.create_dataset('amplitudes', data=field.amplitudes)
        group.create_dataset('positions', data=grid.axis)
        group.attrs['dimension'] = grid.dimension
        group.attrs['points'] = grid.points_per_axis
        group.attrs['half_width'] = grid.half_width
        group.attrs['time'] = field.time
        group.attrs['mass'] = grid.phys.mass
        group.attrs['hbar'] = grid.phys.hbar
        group.attrs['representation'] = field.representation


def read_hdf5(path, name='field'):
    with h5py.File(path, 'r') as h5:
        group = h5[name]
        attrs = group.attrs
        phys = PhysParams(float(attrs['mass']), float(attrs['hbar']))
        grid = SpectralGrid(int(attrs['dimension']), int(attrs['points']), float(attrs['half_width']), phys)
        representation = attrs.get('representation', POSITION)
        if isinstance(representation, bytes):
            representation = representation.decode()
        return WaveField(grid, group['amplitudes'][()], float(attrs['time']), representation)


def snapshot_names(path):
    with h5py.File(path, 'r') as h5:
        return sorted(h5.keys())
