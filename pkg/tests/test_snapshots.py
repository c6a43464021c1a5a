import csv
import numpy as np
import pytest
from numpy.testing import assert_array_equal
from schrosym import snapshots
from schrosym.error import ParameterError
from schrosym.spectral import PhysParams, SpectralGrid, WaveField


@pytest.fixture
def field(rng):
    grid = SpectralGrid(2, 8, 3.0, PhysParams(2.0, 0.5))
    values = rng.normal(size=(2,) + grid.shape) + 1j * rng.normal(size=(2,) + grid.shape)
    return WaveField(grid, values, 0.75)


def test_binary_snapshot(field, tmp_path):
    path = str(tmp_path / 'field.bin')
    snapshots.write_binary(field, path)
    with open(path, 'rb') as fh:
        header = np.frombuffer(fh.read(snapshots.HEADER.itemsize), dtype=snapshots.HEADER)[0]
    assert (header['dimension'], header['points'], header['half_width'], header['time']) == (2, 8, 3.0, 0.75)
    restored = snapshots.read_binary(path, field.grid.phys)
    assert restored.grid == field.grid
    assert restored.components == 2
    assert restored.time == 0.75
    assert_array_equal(restored.amplitudes, field.amplitudes)


def test_truncated_binary_snapshot(field, tmp_path):
    path = str(tmp_path / 'field.bin')
    snapshots.write_binary(field, path)
    with open(path, 'rb') as fh:
        data = fh.read()
    with open(path, 'wb') as fh:
        fh.write(data[:-16])
    with pytest.raises(ParameterError):
        snapshots.read_binary(path)


def test_csv_snapshot(field, tmp_path):
    path = str(tmp_path / 'field.csv')
    snapshots.write_csv(field, path)
    with open(path, newline='') as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ['x1', 'x2', 're0', 'im0', 're1', 'im1']
    assert len(rows) == field.grid.size + 1
    assert float(rows[1][0]) == -3.0
    assert float(rows[1][2]) == field.amplitudes[0, 0, 0].real


def test_csv_limit(tmp_path):
    grid = SpectralGrid(2, 128, 3.0)
    with pytest.raises(ParameterError):
        snapshots.write_csv(WaveField(grid, np.zeros(grid.shape)), str(tmp_path / 'big.csv'))


def test_hdf5_snapshots(field, tmp_path):
    path = str(tmp_path / 'snapshots.h5')
    snapshots.write_hdf5(field, path, name='snapshot0001')
    snapshots.write_hdf5(field.replace(time=1.5), path, name='snapshot0000')
    assert snapshots.snapshot_names(path) == ['snapshot0000', 'snapshot0001']
    restored = snapshots.read_hdf5(path, 'snapshot0000')
    assert restored.grid == field.grid
    assert restored.time == 1.5
    assert_array_equal(restored.amplitudes, field.amplitudes)
