''' Utility helpers shared by the numerical modules.
'''
from concurrent.futures import ThreadPoolExecutor
import logging
import os
from typing import Callable, Iterable, List, Optional
import numpy
import portion
import psutil

LOGGER = logging.getLogger(__name__)

#: Environment variable which caps worker threads
THREADS_ENV = 'FRACWILL_THREADS'


def worker_count(threads: Optional[int] = None) -> int:
    ''' Resolve the number of worker threads to use.

    :param threads: An explicit configured cap, or None.
    :return: The thread count, at least one.
    '''
    count = psutil.cpu_count(logical=True) or 1
    if threads:
        count = min(count, int(threads))
    env_cap = os.environ.get(THREADS_ENV)
    if env_cap:
        try:
            count = min(count, int(env_cap))
        except ValueError:
            LOGGER.warning('Ignoring invalid %s value %r', THREADS_ENV, env_cap)
    return max(1, count)


def parallel_map(func: Callable, items: Iterable, threads: Optional[int] = None) -> List:
    ''' Evaluate a function over items with results in submission order.
    '''
    items = list(items)
    count = min(worker_count(threads), len(items))
    if count <= 1:
        return [func(item) for item in items]
    LOGGER.debug('Mapping %d items over %d threads', len(items), count)
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(func, items))


def row_chunks(rows, size: int = 256):
    ''' Split an index array into contiguous chunks.
    '''
    rows = numpy.asarray(rows)
    for start in range(0, len(rows), size):
        yield rows[start:start + size]


def arc_window(lower: float, upper: float, length: Optional[float]) -> portion.Interval:
    ''' Get an arc-length window as a half-open interval set.

    On a closed curve of the given length the window wraps around, so the
    result may contain two atomic intervals.

    :param lower: The window start in arc length.
    :param upper: The window end in arc length.
    :param length: The period, or None for an open curve.
    :return: The interval set within [0, length).
    '''
    if upper < lower:
        raise ValueError('Window end {} before start {}'.format(upper, lower))
    if length is None:
        return portion.closed(lower, upper)
    if upper - lower >= length:
        return portion.closedopen(0, length)
    start = lower % length
    end = start + (upper - lower)
    if end <= length:
        return portion.closedopen(start, end)
    return portion.closedopen(start, length) | portion.closedopen(0, end - length)


def window_mask(params: numpy.ndarray, window: portion.Interval) -> numpy.ndarray:
    ''' Mark which arc parameters lie inside a window.
    '''
    mask = numpy.zeros(len(params), dtype=bool)
    for atomic in window:
        if atomic.empty:
            continue
        if atomic.left == portion.CLOSED:
            lo_ok = params >= atomic.lower
        else:
            lo_ok = params > atomic.lower
        if atomic.right == portion.CLOSED:
            hi_ok = params <= atomic.upper
        else:
            hi_ok = params < atomic.upper
        mask |= lo_ok & hi_ok
    return mask


def count_clusters(positions, spacing: float, length: Optional[float]) -> List[portion.Interval]:
    ''' Merge marked arc positions into connected clusters.

    :param positions: Marked node arc positions.
    :param spacing: Node spacing, each mark covers one cell.
    :param length: The period for a closed curve, or None.
    :return: One interval per cluster.
    '''
    merged = portion.empty()
    for pos in positions:
        merged |= portion.closed(pos - spacing / 2, pos + spacing / 2)
    clusters = list(merged)
    if length is not None and len(clusters) > 1:
        first, last = clusters[0], clusters[-1]
        # a cluster straddling the parameter origin is one cluster
        if first.lower <= spacing and last.upper >= length - spacing:
            clusters = clusters[1:-1] + [portion.closed(last.lower, length + first.upper)]
    return clusters
