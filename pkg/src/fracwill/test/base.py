''' Shared helpers for the test cases.
'''
import os
import shutil
import tempfile
import unittest
import numpy


class BaseTestCase(unittest.TestCase):
    ''' Include helper functions for array comparison and scratch files.
    '''

    def assertAllClose(self, actual, desired, rtol=1e-7, atol=0.0):
        numpy.testing.assert_allclose(actual, desired, rtol=rtol, atol=atol)

    def assertRelative(self, actual, desired, rtol):
        ''' Assert ``|actual - desired| <= rtol |desired|``. '''
        err = abs(actual - desired) / abs(desired)
        self.assertLessEqual(err, rtol, msg='{} vs {}: relative error {}'.format(actual, desired, err))


class TempDirTestCase(BaseTestCase):
    ''' A test case with a fresh scratch directory. '''

    def setUp(self):
        super().setUp()
        self._tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self._tmpdir)
        super().tearDown()

    def _path(self, *parts):
        return os.path.join(self._tmpdir, *parts)
