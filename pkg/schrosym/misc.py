"""
A space for miscellaneous useful functions.
"""
import functools
import logging
import math
import multiprocessing
import numpy as np

log = logging.getLogger(__name__)

# Central difference weights, indexed by offset from -radius to +radius
FIRST_DERIVATIVE_WEIGHTS = np.array([1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0])
SECOND_DERIVATIVE_WEIGHTS = np.array([1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0,
                                      3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0])


def calculate_process_count(task_count):
    # Leave at least two processors free so we don't totally hammer the machine
    num_processes = max(multiprocessing.cpu_count() - 2, 1)
    chunksize = max(1, min(32, int(math.ceil(float(task_count) / float(num_processes)))))
    return num_processes, chunksize


def run_parallel(func, tasks, process_limit=0, args=()):
    """
    Applies func(*args, task) to every task, through a process pool when more than one process is allowed.
    Results come back in task order. A process_limit of 1 runs everything in this process; 0 means no limit.

    """
    tasks = list(tasks)
    worker = functools.partial(func, *args)
    num_processes, chunksize = calculate_process_count(len(tasks))
    if process_limit > 0:
        num_processes = min(process_limit, num_processes)
    if num_processes <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    log.debug("Running %d tasks on %d cores with chunksize %d", len(tasks), num_processes, chunksize)
    pool = multiprocessing.Pool(num_processes)
    try:
        results = pool.map_async(worker, tasks, chunksize=chunksize).get()
    finally:
        pool.close()
        pool.join()
    return results


def is_power_of_2(x):
    return x > 0 and (x & (x - 1)) == 0


def stencil_offsets(weights):
    radius = len(weights) // 2
    return np.arange(-radius, radius + 1)


def laplacian_at_points(func, points, h):
    """
    Sixth-order central-difference Laplacian of func at each row of points (shape (..., n)).
    func must accept an array of points with a trailing axis of length n.

    """
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    offsets = stencil_offsets(SECOND_DERIVATIVE_WEIGHTS)
    # All stencil points go through func in a single call so that any data-dependent
    # quadrature order is shared by the whole stencil.
    shifted = []
    for axis in range(n):
        unit = np.zeros(n)
        unit[axis] = h
        for offset in offsets:
            shifted.append(points + offset * unit)
    values = func(np.stack(shifted))
    values = values.reshape((n, len(offsets)) + points.shape[:-1])
    return np.einsum('k,ak...->...', SECOND_DERIVATIVE_WEIGHTS, values) / h ** 2


def gradient_at_points(func, points, h):
    """ Fourth-order central-difference gradient, returned with a trailing axis of length n. """
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    offsets = stencil_offsets(FIRST_DERIVATIVE_WEIGHTS)
    shifted = []
    for axis in range(n):
        unit = np.zeros(n)
        unit[axis] = h
        for offset in offsets:
            shifted.append(points + offset * unit)
    values = func(np.stack(shifted))
    values = values.reshape((n, len(offsets)) + points.shape[:-1])
    gradient = np.einsum('k,ak...->a...', FIRST_DERIVATIVE_WEIGHTS, values) / h
    return np.moveaxis(gradient, 0, -1)


def time_derivative(func, t, dt):
    """ Fourth-order central difference of a function of time. func(t) may return an array. """
    offsets = stencil_offsets(FIRST_DERIVATIVE_WEIGHTS)
    total = 0.0
    for weight, offset in zip(FIRST_DERIVATIVE_WEIGHTS, offsets):
        if weight != 0.0:
            total = total + weight * func(t + offset * dt)
    return total / dt


def relative_norm(numerator, denominator):
    scale = np.linalg.norm(denominator)
    if scale == 0.0:
        return float(np.linalg.norm(numerator))
    return float(np.linalg.norm(numerator) / scale)
