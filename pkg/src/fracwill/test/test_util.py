''' Test the module :py:mod:`fracwill.util`.
'''
import os
import unittest
from unittest import mock
import numpy
import portion

from fracwill.util import (
    THREADS_ENV, arc_window, count_clusters, parallel_map, row_chunks,
    window_mask, worker_count,
)


class TestWorkers(unittest.TestCase):

    def testExplicitCap(self):
        self.assertEqual(worker_count(1), 1)

    def testEnvironmentCap(self):
        with mock.patch.dict(os.environ, {THREADS_ENV: '1'}):
            self.assertEqual(worker_count(), 1)
        with mock.patch.dict(os.environ, {THREADS_ENV: 'many'}):
            self.assertGreaterEqual(worker_count(), 1)

    def testMapOrder(self):
        self.assertEqual(parallel_map(lambda val: val * val, range(20), 4), [val * val for val in range(20)])
        self.assertEqual(parallel_map(abs, [], 4), [])

    def testChunks(self):
        chunks = list(row_chunks(numpy.arange(10), 4))
        self.assertEqual([chunk.tolist() for chunk in chunks], [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9]])


class TestWindows(unittest.TestCase):

    def testOpenWindow(self):
        self.assertEqual(arc_window(0.2, 0.4, None), portion.closed(0.2, 0.4))

    def testWrapping(self):
        win = arc_window(5.0, 7.0, 6.0)
        self.assertEqual(win, portion.closedopen(5.0, 6.0) | portion.closedopen(0.0, 1.0))
        self.assertEqual(arc_window(1.0, 8.0, 6.0), portion.closedopen(0.0, 6.0))
        self.assertEqual(arc_window(7.0, 8.0, 6.0), portion.closedopen(1.0, 2.0))

    def testReversed(self):
        with self.assertRaises(ValueError):
            arc_window(2.0, 1.0, 6.0)

    def testMask(self):
        params = numpy.arange(6.0)
        mask = window_mask(params, arc_window(5.0, 7.0, 6.0))
        self.assertEqual(mask.tolist(), [True, False, False, False, False, True])
        mask = window_mask(params, portion.closed(1.0, 3.0))
        self.assertEqual(mask.tolist(), [False, True, True, True, False, False])
        mask = window_mask(params, portion.open(1.0, 3.0))
        self.assertEqual(mask.tolist(), [False, False, True, False, False, False])

    def testClusters(self):
        self.assertEqual(len(count_clusters([0.0, 0.1, 5.9], 0.1, 6.0)), 1)
        self.assertEqual(len(count_clusters([0.0, 0.1, 5.9], 0.1, None)), 2)
        self.assertEqual(len(count_clusters([1.0, 3.0], 0.1, 6.0)), 2)
        self.assertEqual(count_clusters([], 0.1, 6.0), [])


if __name__ == '__main__':
    unittest.main()
